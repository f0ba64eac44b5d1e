"""Oblique projectors onto a signal subspace along a structured-noise subspace.

Given spanning atoms {v_i} of V and a raw spanning set of the noise subspace
Wperp, the complement atoms u_i = v_i - P_{Wperp} v_i span W, the orthogonal
complement of Wperp inside V + Wperp. The projector onto V along Wperp is
assembled from the singular system of the coupling between the orthonormalized
u-side and the v-side:

    E = sum_n eta_n <xi_n, .>,   xi_n in W orthonormal,  eta_n in V,

with sigma_n the singular values of the matrix <q_i, v_j> (q = orthonormalized
u). Small sigma_n flag near-intersection of V and Wperp; the pseudo-inverse
rank cut keeps lambda_n = sigma_n^2 above rank_tol * lambda_1. Truncation
below the kept rank is a separate, explicit operation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFamily, DimensionMismatch, SubspaceIntersection
from .hilbert import AtomFamily, analyze, gram, orthonormalize

__all__ = [
    "ObliqueProjector", "TruncatedProjector",
    "complement_family", "build_oblique_projector", "apply_projector",
    "measurement_vectors", "truncate_projector", "min_angle",
    "subspace_min_angle",
]

# eigenvalue cut for the pseudo-inverse; deliberately tiny so that genuinely
# small singular values (the interesting, ill-posed ones) are kept
RANK_TOL_EIGENVALUE = 1e-14
# rank cut for orthonormalizing raw noise atoms / intersection detection
RANK_TOL_COMPLEMENT = 1e-10
# inside the build, u-atoms are dropped only when numerically zero; rank
# control belongs to the eigenvalue cut above
_RANK_TOL_U_ORTHO = 1e-13


@dataclass(frozen=True)
class ObliqueProjector:
    """Full singular system of the oblique projector onto V along Wperp.

    Fields follow the construction: psi holds the Gram eigenvectors
    (columns, one per kept singular value), sigma the kept singular values in
    descending order, xi an orthonormal basis of W and eta the dual family in
    V with <xi_m, eta_n> = delta_{mn}.
    """

    v_family: AtomFamily
    wperp_basis: AtomFamily
    u_family: AtomFamily
    psi: np.ndarray
    sigma: np.ndarray
    xi: AtomFamily
    eta: AtomFamily

    def __post_init__(self):
        object.__setattr__(self, "psi", np.asarray(self.psi, dtype=float))
        object.__setattr__(self, "sigma", np.asarray(self.sigma, dtype=float))
        self.psi.setflags(write=False)
        self.sigma.setflags(write=False)
        if np.any(self.sigma <= 0) or np.any(np.diff(self.sigma) > 0):
            raise ValueError("sigma must be strictly positive and non-increasing")

    @property
    def rank(self) -> int:
        return self.sigma.size

    @property
    def space(self):
        return self.v_family.space


@dataclass(frozen=True)
class TruncatedProjector:
    """Leading-r part of a projector's singular expansion.

    Still an oblique projector (onto span{eta_1..eta_r}), but it annihilates
    the discarded xi/eta directions, so it is *not* the projector onto V
    along Wperp unless r equals the parent rank.
    """

    parent: ObliqueProjector
    r: int

    def __post_init__(self):
        if not 1 <= self.r <= self.parent.rank:
            raise ValueError(f"r must lie in [1, {self.parent.rank}], got {self.r}")


def complement_family(v_family: AtomFamily, wperp_raw: AtomFamily,
                      rank_tol: float = RANK_TOL_COMPLEMENT):
    """Build u_i = v_i - P_{Wperp} v_i and the orthonormal basis of Wperp.

    Raises SubspaceIntersection when some u_i is numerically zero, i.e. the
    subspaces intersect at working precision.
    """
    if v_family.space != wperp_raw.space:
        raise DimensionMismatch("families live on different spaces")
    if len(v_family) == 0:
        raise DegenerateFamily("empty v family")
    v_norms = v_family.norms()
    if np.any(v_norms <= rank_tol * np.max(v_norms)):
        raise DegenerateFamily("v family contains numerically zero atoms")
    wperp_basis, _, _ = orthonormalize(wperp_raw, rank_tol)
    if len(wperp_basis) == 0:
        return v_family, wperp_basis
    # u_i = v_i - sum_q q <q, v_i>, vectorized over the family
    coeff = np.conj(wperp_basis.atoms) @ _weighted_cols(v_family)
    u_atoms = v_family.atoms - coeff.T @ wperp_basis.atoms
    u_family = AtomFamily(v_family.space, u_atoms, labels=v_family.labels)
    u_norms = u_family.norms()
    bad = u_norms < rank_tol * v_norms
    if np.any(bad):
        idx = int(np.argmax(bad))
        raise SubspaceIntersection(
            f"subspaces intersect numerically: ||u_{idx}|| = {u_norms[idx]:.3e} "
            f"< {rank_tol:.1e} * ||v_{idx}||")
    return u_family, wperp_basis


def _weighted_cols(family: AtomFamily) -> np.ndarray:
    """Atoms as columns with quadrature weights applied."""
    if family.space.kind == "quadrature":
        return (family.atoms * family.space.weights).T
    return family.atoms.T


def build_oblique_projector(v_family: AtomFamily, wperp_raw: AtomFamily,
                            rank_tol: float = RANK_TOL_EIGENVALUE,
                            complement_tol: float = RANK_TOL_COMPLEMENT) -> ObliqueProjector:
    """Construct the projector onto span(v_family) along span(wperp_raw).

    Works through the orthonormalized u-side for stability: the singular
    values of B[i, j] = <q_i, v_j> are the square roots of the eigenvalues of
    the Hermitian Gram of the u-family, and the eigenvectors psi_n are the
    right singular vectors of B. Eigenvalues at or below rank_tol * lambda_1
    are dropped.
    """
    u_family, wperp_basis = complement_family(v_family, wperp_raw, complement_tol)
    q_family, q_rank, _ = orthonormalize(u_family, _RANK_TOL_U_ORTHO)
    if q_rank == 0:
        raise DegenerateFamily("coupling matrix has zero rank")
    b = gram(q_family, v_family).entries  # <q_i, v_j>, R x M
    u_mat, s, vh = np.linalg.svd(b, full_matrices=False)
    lam = s ** 2
    keep = lam > rank_tol * lam[0]
    n_keep = int(np.count_nonzero(keep))
    if n_keep == 0:
        raise DegenerateFamily("coupling matrix has zero rank")
    sigma = s[:n_keep]
    psi = np.conj(vh[:n_keep]).T  # (M, N) Gram eigenvectors
    # xi_n = W psi_n / sigma_n expressed exactly in the q basis: no division
    xi_atoms = u_mat[:, :n_keep].T @ q_family.atoms
    # eta_n = V psi_n / sigma_n carries the (intentional) ill-posed division
    eta_atoms = (psi / sigma).T @ v_family.atoms
    space = v_family.space
    return ObliqueProjector(
        v_family=v_family, wperp_basis=wperp_basis, u_family=u_family,
        psi=psi, sigma=sigma,
        xi=AtomFamily(space, xi_atoms), eta=AtomFamily(space, eta_atoms))


def _terms(p) -> tuple[AtomFamily, AtomFamily]:
    """(xi, eta) pairs effectively present in a projector's expansion."""
    if isinstance(p, TruncatedProjector):
        parent = p.parent
        space = parent.space
        return (AtomFamily(space, parent.xi.atoms[:p.r]),
                AtomFamily(space, parent.eta.atoms[:p.r]))
    return p.xi, p.eta


def apply_projector(p, f: np.ndarray) -> np.ndarray:
    """Apply sum_n eta_n <xi_n, f> (full or truncated expansion)."""
    xi, eta = _terms(p)
    return analyze(xi, f) @ eta.atoms


def measurement_vectors(p: ObliqueProjector) -> AtomFamily:
    """Dual vectors w_i with E f = sum_i v_i <w_i, f>.

    w_i = sum_n xi_n sigma_n^{-1} conj(psi_n(i)).
    """
    w_atoms = (np.conj(p.psi) / p.sigma) @ p.xi.atoms
    return AtomFamily(p.space, w_atoms, labels=p.v_family.labels)


def truncate_projector(p: ObliqueProjector, r: int) -> TruncatedProjector:
    """Keep the leading r terms of the singular expansion."""
    return TruncatedProjector(parent=p, r=r)


def subspace_min_angle(basis_a: AtomFamily, basis_b: AtomFamily) -> float:
    """Angle theta with cos(theta) = min singular value of the cross-Gram.

    Both arguments must be orthonormal bases. cos(theta) equals
    inf_{a in A, ||a||=1} ||P_B a||, the quantity controlling the oblique
    projection error inflation 1/cos(theta).
    """
    cross = gram(basis_a, basis_b).entries
    if cross.size == 0:
        return float(np.pi / 2)
    s = np.linalg.svd(cross, compute_uv=False)
    c = min(1.0, max(0.0, float(s[-1])))
    return float(np.arccos(c))


def min_angle(p: ObliqueProjector) -> float:
    """Minimum angle between V and W, a conditioning diagnostic."""
    v_basis, _, _ = orthonormalize(p.v_family, _RANK_TOL_U_ORTHO)
    return subspace_min_angle(v_basis, p.xi)
