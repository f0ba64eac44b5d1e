"""Discretized inner-product spaces.

A signal is a vector of samples over a fixed grid. Inner products are either
quadrature sums (composite trapezoid by default) or plain Euclidean dot
products. Everything downstream (Gram matrices, orthonormal bases,
projections) is built on `inner`.

All formulas are written conjugate-correct (conjugate-linear in the first
argument) even though the shipped experiments are real-valued.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, NotOrthonormal

__all__ = [
    "SpaceSpec", "AtomFamily", "GramMatrix",
    "space_trapezoid", "space_euclidean",
    "inner", "norm", "gram", "orthonormalize", "project_orthogonal",
    "analyze", "combine",
]

ORTHONORMALITY_TOL = 1e-8


@dataclass(frozen=True)
class SpaceSpec:
    """Sample grid plus quadrature weights defining the inner product.

    kind "quadrature": <f, g> = sum_k weights_k * conj(f_k) * g_k.
    kind "euclidean": <f, g> = sum_k conj(f_k) * g_k (weights is None).
    """

    kind: str
    grid: np.ndarray
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in ("quadrature", "euclidean"):
            raise ValueError(f"unknown space kind {self.kind!r}")
        grid = np.asarray(self.grid, dtype=float)
        object.__setattr__(self, "grid", grid)
        if grid.ndim != 1 or grid.size == 0:
            raise ValueError("grid must be a nonempty 1-D array")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if self.kind == "quadrature":
            if self.weights is None:
                raise ValueError("quadrature space requires weights")
            w = np.asarray(self.weights, dtype=float)
            object.__setattr__(self, "weights", w)
            if w.shape != grid.shape:
                raise DimensionMismatch("weights length must equal grid length")
            if np.any(w < 0):
                raise ValueError("quadrature weights must be nonnegative")
        elif self.weights is not None:
            raise ValueError("euclidean space takes no weights")
        self.grid.setflags(write=False)
        if self.weights is not None:
            self.weights.setflags(write=False)

    @property
    def size(self) -> int:
        return self.grid.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpaceSpec):
            return NotImplemented
        if self.kind != other.kind or not np.array_equal(self.grid, other.grid):
            return False
        if self.kind == "euclidean":
            return True
        return np.array_equal(self.weights, other.weights)


def space_trapezoid(a: float, b: float, step: float) -> SpaceSpec:
    """Uniform grid on [a, b] with composite-trapezoid weights."""
    n = int(round((b - a) / step))
    if n < 1 or abs(a + n * step - b) > 1e-9 * max(1.0, abs(b - a)):
        raise ValueError(f"step {step} does not tile [{a}, {b}]")
    grid = a + step * np.arange(n + 1)
    grid[-1] = b
    w = np.full(n + 1, step)
    w[0] = w[-1] = step / 2
    return SpaceSpec("quadrature", grid, w)


def space_euclidean(length: int) -> SpaceSpec:
    """Plain R^length with the unweighted dot product."""
    return SpaceSpec("euclidean", np.arange(length, dtype=float))


@dataclass(frozen=True)
class AtomFamily:
    """Ordered collection of sample-value vectors over one space.

    Atoms are stored as the rows of a (M, len(grid)) array. Redundant or
    numerically tiny atoms are allowed here; rank handling happens in
    `orthonormalize` and in the projector construction.
    """

    space: SpaceSpec
    atoms: np.ndarray
    labels: Optional[tuple] = None

    def __post_init__(self):
        atoms = np.atleast_2d(np.asarray(self.atoms, dtype=float))
        object.__setattr__(self, "atoms", atoms)
        if atoms.shape[1] != self.space.size and atoms.size > 0:
            raise DimensionMismatch(
                f"atoms have {atoms.shape[1]} samples, space has {self.space.size}")
        if self.labels is not None and len(self.labels) != atoms.shape[0]:
            raise ValueError("labels length must match atom count")
        self.atoms.setflags(write=False)

    def __len__(self) -> int:
        return self.atoms.shape[0]

    def atom(self, i: int) -> np.ndarray:
        return self.atoms[i]

    def norms(self) -> np.ndarray:
        """Norm of every atom under the family's inner product."""
        return np.sqrt(np.maximum(_sq_norms(self.atoms, self.space), 0.0))

    @classmethod
    def empty(cls, space: SpaceSpec) -> "AtomFamily":
        return cls(space, np.zeros((0, space.size)))


@dataclass(frozen=True)
class GramMatrix:
    """Matrix of pairwise inner products with provenance tags."""

    entries: np.ndarray
    row_family: str = ""
    col_family: str = ""

    def __post_init__(self):
        object.__setattr__(self, "entries", np.asarray(self.entries))
        self.entries.setflags(write=False)


def _check_conforms(f: np.ndarray, space: SpaceSpec) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != (space.size,):
        raise DimensionMismatch(
            f"vector of length {f.shape} does not conform to space of size {space.size}")
    return f


def _weighted(g: np.ndarray, space: SpaceSpec) -> np.ndarray:
    """Apply quadrature weights along the sample (last) axis."""
    if space.kind == "quadrature":
        return space.weights * g
    return g


def _sq_norms(atoms: np.ndarray, space: SpaceSpec) -> np.ndarray:
    return np.real(np.einsum("ij,ij->i", np.conj(atoms), _weighted(atoms, space)))


def inner(f: np.ndarray, g: np.ndarray, space: SpaceSpec):
    """Inner product <f, g>, conjugate-linear in f."""
    f = _check_conforms(f, space)
    g = _check_conforms(g, space)
    return np.conj(f) @ _weighted(g, space)


def norm(f: np.ndarray, space: SpaceSpec) -> float:
    return float(np.sqrt(max(np.real(inner(f, f, space)), 0.0)))


def analyze(family: AtomFamily, f: np.ndarray) -> np.ndarray:
    """Vector of coefficients <atom_i, f> for every atom."""
    f = _check_conforms(f, family.space)
    return np.conj(family.atoms) @ _weighted(f, family.space)


def combine(family: AtomFamily, coeffs: np.ndarray) -> np.ndarray:
    """Linear combination sum_i coeffs_i * atom_i."""
    coeffs = np.asarray(coeffs)
    if coeffs.shape != (len(family),):
        raise DimensionMismatch("one coefficient per atom required")
    if len(family) == 0:
        return np.zeros(family.space.size)
    return coeffs @ family.atoms


def gram(rows: AtomFamily, cols: AtomFamily) -> GramMatrix:
    """Gram matrix entries(i, j) = <rows.atom_i, cols.atom_j>."""
    if rows.space != cols.space:
        raise DimensionMismatch("row and column families live on different spaces")
    entries = np.conj(rows.atoms) @ _weighted(cols.atoms, rows.space).T
    return GramMatrix(entries,
                      row_family=str(rows.labels or ""),
                      col_family=str(cols.labels or ""))


def orthonormalize(family: AtomFamily, rank_tol: float = 1e-10):
    """Modified Gram-Schmidt with one full re-orthogonalization pass.

    Atoms whose residual norm drops below rank_tol times the largest input
    atom norm are discarded. Returns (ortho_family, rank, map) where
    map[i, :] expresses kept atom q_i as a combination of the input atoms.
    """
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    space = family.space
    m = len(family)
    if m == 0:
        return AtomFamily.empty(space), 0, np.zeros((0, 0))
    input_norms = family.norms()
    scale = float(np.max(input_norms))
    if scale == 0.0:
        return AtomFamily.empty(space), 0, np.zeros((0, m))
    qs: list[np.ndarray] = []
    coeff_rows: list[np.ndarray] = []
    for i in range(m):
        v = family.atoms[i].astype(float).copy()
        c = np.zeros(m)
        c[i] = 1.0
        # double pass keeps <q_i, q_j> deviations near machine precision
        for _ in range(2):
            for q, qc in zip(qs, coeff_rows):
                proj = inner(q, v, space)
                v -= proj * q
                c -= proj * qc
        nrm = norm(v, space)
        if nrm > rank_tol * scale:
            qs.append(v / nrm)
            coeff_rows.append(c / nrm)
    if not qs:
        return AtomFamily.empty(space), 0, np.zeros((0, m))
    ortho = AtomFamily(space, np.array(qs))
    return ortho, len(qs), np.array(coeff_rows)


def _orthonormality_defect(basis: AtomFamily) -> float:
    g = gram(basis, basis).entries
    return float(np.max(np.abs(g - np.eye(len(basis))))) if len(basis) else 0.0


def project_orthogonal(basis: AtomFamily, f: np.ndarray, *, check: bool = True) -> np.ndarray:
    """Orthogonal projection sum_i q_i <q_i, f> onto span(basis)."""
    f = _check_conforms(f, basis.space)
    if len(basis) == 0:
        return np.zeros_like(f)
    if check:
        defect = _orthonormality_defect(basis)
        if defect > ORTHONORMALITY_TOL:
            raise NotOrthonormal(
                f"basis deviates from orthonormality by {defect:.3e}")
    return analyze(basis, f) @ basis.atoms
