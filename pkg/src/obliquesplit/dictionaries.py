"""Atom-family generators for the benchmark experiments.

Covers cardinal B-spline bases and redundant B-spline dictionaries (Cox-de
Boor recursion on uniform knots, atoms truncated at the interval boundary),
power-law and Gaussian-bump noise backgrounds, mutually orthogonal cosine
vectors, and seeded random sparse test instances.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatch
from .hilbert import AtomFamily, SpaceSpec, combine

__all__ = [
    "SplineSpec", "GroundTruth",
    "bspline_family", "power_background", "cosine_family",
    "gaussian_background", "random_instance",
    "family_to_csv", "family_from_csv",
]


@dataclass(frozen=True)
class SplineSpec:
    """Geometry of a B-spline basis or dictionary over an interval.

    The atoms are splines of order `order` (cubic = 4, i.e. order counts the
    knot intervals per atom) whose own knot spacing is
    support_scale * knot_spacing, placed at every multiple of
    translation_step that overlaps the interval. support_scale = 1 with
    translation_step = knot_spacing is the basis case; larger support_scale
    with a reduced translation_step gives the redundant dictionary variant.
    """

    interval: tuple
    knot_spacing: float
    order: int = 4
    support_scale: int = 1
    translation_step: Optional[float] = None

    def __post_init__(self):
        a, b = self.interval
        if not b > a:
            raise ValueError("empty interval")
        if self.knot_spacing <= 0:
            raise ValueError("knot_spacing must be positive")
        n = (b - a) / self.knot_spacing
        if abs(n - round(n)) > 1e-12 * max(1.0, n):
            raise ValueError(
                f"knot_spacing {self.knot_spacing} does not divide [{a}, {b}]")
        if self.order < 1 or self.support_scale < 1:
            raise ValueError("order and support_scale must be >= 1")
        if self.translation_step is None:
            object.__setattr__(self, "translation_step", self.knot_spacing)
        if self.translation_step <= 0:
            raise ValueError("translation_step must be positive")

    @property
    def atom_knot_spacing(self) -> float:
        return self.support_scale * self.knot_spacing

    @property
    def support_width(self) -> float:
        return self.order * self.atom_knot_spacing


def _bspline_values(x: np.ndarray, knots: np.ndarray, order: int) -> np.ndarray:
    """Cox-de Boor recursion; 0/0 terms are taken as 0 (repeated knots ok)."""
    n_b = len(knots) - 1
    b = np.zeros((n_b, x.size))
    for i in range(n_b):
        b[i] = np.where((x >= knots[i]) & (x < knots[i + 1]), 1.0, 0.0)
    b[-1] = np.where((x >= knots[-2]) & (x <= knots[-1]), 1.0, b[-1])
    for k in range(2, order + 1):
        nxt = np.zeros((n_b - k + 1, x.size))
        for i in range(n_b - k + 1):
            dl = knots[i + k - 1] - knots[i]
            dr = knots[i + k] - knots[i + 1]
            if dl > 0:
                nxt[i] += (x - knots[i]) / dl * b[i]
            if dr > 0:
                nxt[i] += (knots[i + k] - x) / dr * b[i + 1]
        b = nxt
    return b[0]


def bspline_family(spec: SplineSpec, space: SpaceSpec,
                   scale: float = 1.0) -> AtomFamily:
    """Sampled B-spline translates covering the spec interval.

    Atom j starts at a + j * translation_step; every translate whose open
    support meets (a, b) is kept and sampled on the grid (boundary atoms are
    truncated implicitly). The basis case on [0, 10] at knot spacing 1/16
    yields M = 163 atoms. `scale` multiplies the partition-of-unity-normalized
    values uniformly.
    """
    a, b = spec.interval
    if space.grid[0] > a + 1e-12 or space.grid[-1] < b - 1e-12:
        raise DimensionMismatch("space grid does not cover the spline interval")
    step = spec.translation_step
    width = spec.support_width
    h = spec.atom_knot_spacing
    j_min = int(np.floor((-width) / step + 1e-9)) + 1
    j_max = int(np.ceil((b - a) / step - 1e-9)) - 1
    atoms = []
    labels = []
    for j in range(j_min, j_max + 1):
        start = a + j * step
        knots = start + h * np.arange(spec.order + 1)
        atoms.append(scale * _bspline_values(space.grid, knots, spec.order))
        labels.append(f"b{j}")
    return AtomFamily(space, np.array(atoms), labels=tuple(labels))


def power_background(count: int, space: SpaceSpec) -> AtomFamily:
    """Decaying power-law atoms (x + 1)^(-0.05 i), i = 1..count."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if space.grid[0] <= -1.0:
        raise ValueError("power atoms need grid values > -1")
    atoms = np.array([(space.grid + 1.0) ** (-0.05 * i)
                      for i in range(1, count + 1)])
    return AtomFamily(space, atoms,
                      labels=tuple(f"y{i}" for i in range(1, count + 1)))


def cosine_family(L: int, M: int) -> AtomFamily:
    """M cosine vectors in R^L: v_i(j) = cos(pi (2j-1)(i-1) / (2L)).

    Mutually orthogonal under the Euclidean inner product (DCT-II rows).
    """
    if M > L:
        raise ValueError("need M <= L")
    space = SpaceSpec("euclidean", np.arange(1, L + 1, dtype=float))
    j = np.arange(1, L + 1)
    atoms = np.array([np.cos(np.pi * (2 * j - 1) * (i - 1) / (2 * L))
                      for i in range(1, M + 1)])
    return AtomFamily(space, atoms,
                      labels=tuple(f"c{i}" for i in range(1, M + 1)))


def gaussian_background(count: int, L: int, *,
                        literal_index: bool = False) -> AtomFamily:
    """Gaussian bumps exp(-35000 (x_j - 0.005 i)^2), i = 1..count, in R^L.

    The abscissa is x_j = j / L by default; literal_index=True uses x_j = j,
    under which almost every atom vanishes on the grid (kept available for
    comparison). Atoms centered beyond the grid are numerically zero and are
    meant to be removed by downstream rank filtering.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    space = SpaceSpec("euclidean", np.arange(1, L + 1, dtype=float))
    j = np.arange(1, L + 1, dtype=float)
    x = j if literal_index else j / L
    atoms = np.array([np.exp(-35000.0 * (x - 0.005 * i) ** 2)
                      for i in range(1, count + 1)])
    return AtomFamily(space, atoms,
                      labels=tuple(f"g{i}" for i in range(1, count + 1)))


@dataclass(frozen=True)
class GroundTruth:
    """Planted sparse signal: support, coefficients, and both components."""

    support: np.ndarray
    coefficients: np.ndarray
    component: np.ndarray
    background_coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "support", np.asarray(self.support, dtype=int))
        object.__setattr__(self, "coefficients",
                           np.asarray(self.coefficients, dtype=float))


def random_instance(signal_family: AtomFamily, background_family: AtomFamily,
                    K: int, seed, coeff_law: str = "uniform", *,
                    background_coeffs: Optional[np.ndarray] = None):
    """Draw f = f1 + f2 with K-sparse f1 and a random background f2.

    coeff_law "uniform": signal coefficients ~ U[-1, 1], background ~ U[0, 1];
    coeff_law "normal": both standard normal. Fully reproducible from `seed`
    (any value np.random.default_rng accepts). A fixed background can be
    passed through background_coeffs to share noise across trials.
    """
    m = len(signal_family)
    if K > m:
        raise ValueError(f"K = {K} exceeds family size {m}")
    if signal_family.space != background_family.space:
        raise DimensionMismatch("signal and background families on different spaces")
    rng = np.random.default_rng(seed)
    support = np.sort(rng.choice(m, size=K, replace=False)) if K else np.zeros(0, int)
    if coeff_law == "uniform":
        coeffs = rng.uniform(-1.0, 1.0, size=K)
        draw_bg = lambda n: rng.uniform(0.0, 1.0, size=n)
    elif coeff_law == "normal":
        coeffs = rng.standard_normal(K)
        draw_bg = rng.standard_normal
    else:
        raise ValueError(f"unknown coeff_law {coeff_law!r}")
    if background_coeffs is None:
        background_coeffs = draw_bg(len(background_family))
    background_coeffs = np.asarray(background_coeffs, dtype=float)
    component = coeffs @ signal_family.atoms[support] if K \
        else np.zeros(signal_family.space.size)
    f2 = combine(background_family, background_coeffs)
    truth = GroundTruth(support=support, coefficients=coeffs,
                        component=component, background_coeffs=background_coeffs)
    return component + f2, truth


def family_to_csv(family: AtomFamily, path) -> None:
    """Write a family as CSV: grid in the first column, one atom per column."""
    labels = family.labels or tuple(f"atom{i}" for i in range(len(family)))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["grid", *labels])
        for k in range(family.space.size):
            writer.writerow([_fmt(family.space.grid[k]),
                             *(_fmt(family.atoms[i, k]) for i in range(len(family)))])


def family_from_csv(path, space: Optional[SpaceSpec] = None) -> AtomFamily:
    """Read a family written by family_to_csv.

    Without an explicit space, a euclidean space over the stored grid column
    is assumed (suitable for round-tripping custom experiment inputs).
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [list(map(float, row)) for row in reader if row]
    data = np.array(rows)
    if data.size == 0:
        raise ValueError(f"no samples in {path}")
    grid = data[:, 0]
    atoms = data[:, 1:].T
    if space is None:
        space = SpaceSpec("euclidean", grid)
    return AtomFamily(space, atoms, labels=tuple(header[1:]))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")
