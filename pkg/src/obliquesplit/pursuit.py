"""Adaptive sparse-subspace search for structured-noise filtering.

When the oblique projector onto the full signal subspace V along the noise
subspace Wperp is numerically ill posed, the splitting is sought on a sparse
sub-subspace instead. Forward selection runs an OOMP-style criterion on the
orthogonal projection of the signal onto W = span{u_i}: at each step the
candidate maximizing |<gamma_n, f>| / ||gamma_n|| is added, where
gamma_n = u_n - P_{W_k} u_n. Measurement vectors and coefficients are
maintained by rank-one recursions; backward steps remove atoms, and swap
cycles (backward deletions followed by forward replacements, committed only
when the consistency residual strictly drops) refine a stalled support, with
re-initialization from a different first atom as the last resort.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, StabilityStop
from .hilbert import AtomFamily, orthonormalize, project_orthogonal
from .oblique import complement_family

__all__ = [
    "PursuitConfig", "PursuitState", "PursuitResult", "Prepared",
    "prepare_families", "init_state", "select_forward", "forward_step",
    "select_backward", "backward_step", "swap_refine", "consistency_error",
    "oblique_pursuit",
]

DEFAULT_STOP_TOL = 1e-8
DEFAULT_STAB_TOL = 1e-7
# relative residual-square improvement a swap must achieve to be committed;
# guards against cycling on numerical noise
SWAP_COMMIT_RTOL = 1e-12


@dataclass
class PursuitConfig:
    """Stopping and budget knobs for the adaptive search."""

    stop_tol: float = DEFAULT_STOP_TOL      # on ||P_W f - P_{W_k} f|| / ||P_W f||
    stab_tol: float = DEFAULT_STAB_TOL      # minimum ||gamma|| / ||u|| to proceed
    r_max: Optional[int] = None             # cap on selected atoms (default M)
    max_swap_depth: int = 3                 # atoms per swap cycle at escalation end
    max_restarts: int = 10                  # re-initialization budget

    def __post_init__(self):
        if self.stop_tol <= 0 or self.stab_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_swap_depth < 1 or self.max_restarts < 0:
            raise ValueError("invalid budget")


@dataclass
class Prepared:
    """Families shared by every pursuit over the same (V, Wperp) pair."""

    v_family: AtomFamily
    u_family: AtomFamily
    wperp_basis: AtomFamily
    w_basis: AtomFamily  # orthonormal basis of W = span{u_i}


def prepare_families(v_family: AtomFamily, wperp_raw: AtomFamily,
                     rank_tol: float = 1e-10) -> Prepared:
    """One-time setup: complement atoms and the orthonormal basis of W."""
    u_family, wperp_basis = complement_family(v_family, wperp_raw, rank_tol)
    w_basis, _, _ = orthonormalize(u_family, rank_tol)
    return Prepared(v_family, u_family, wperp_basis, w_basis)


class PursuitState:
    """Mutable search state: selected support plus recursion caches.

    selected : ordered original atom indices l_1..l_k
    w        : (k, n) measurement vectors, dual to the selected v atoms
    coeffs   : (k,) coefficients c_i = <w_i, f>
    q_sel    : (k, n) orthonormal basis of W_k accumulated from the gammas
    gamma    : (M, n) residual atoms u_n - P_{W_k} u_n, all candidates
    target_pw: P_W f, fixed at initialization
    pw_f     : P_{W_k} f, kept in sync with q_sel
    f_work   : f - P_{Wperp} f; since every direction used by the pursuit
               lies in W, inner products against f_work equal those against
               f exactly, but the (potentially large) noise component no
               longer leaks through the numerically deepest directions of W
    """

    def __init__(self, prepared: Prepared, f: np.ndarray):
        space = prepared.v_family.space
        f = np.asarray(f, dtype=float)
        if f.shape != (space.size,):
            raise DimensionMismatch("signal does not conform to the space")
        self.space = space
        self.v_atoms = prepared.v_family.atoms
        self.u_atoms = prepared.u_family.atoms
        self.u_norms = prepared.u_family.norms()
        self.f = f
        self.f_work = f - project_orthogonal(prepared.wperp_basis, f, check=False)
        self.target_pw = project_orthogonal(prepared.w_basis, self.f_work,
                                            check=False)
        self.selected: list[int] = []
        n = space.size
        self.w = np.zeros((0, n))
        self.coeffs = np.zeros(0)
        self.q_sel = np.zeros((0, n))
        self.gamma = self.u_atoms.copy()
        self.pw_f = np.zeros(n)
        self.forward_steps = 0
        self.committed_swaps = 0

    # -- inner-product helpers against the space weights ------------------
    def _wdot(self, a: np.ndarray, b: np.ndarray):
        """<a, b> rows-against-(vector|columns); real build: order immaterial."""
        if self.space.kind == "quadrature":
            w = self.space.weights
            return a @ (w[:, None] * b if b.ndim == 2 else w * b)
        return a @ b

    @property
    def k(self) -> int:
        return len(self.selected)

    @property
    def M(self) -> int:
        return self.u_atoms.shape[0]

    def gamma_norms(self) -> np.ndarray:
        if self.space.kind == "quadrature":
            sq = np.einsum("ij,ij->i", self.gamma, self.gamma * self.space.weights)
        else:
            sq = np.einsum("ij,ij->i", self.gamma, self.gamma)
        return np.sqrt(np.maximum(sq, 0.0))

    def residual(self) -> float:
        """||P_W f - P_{W_k} f||."""
        d = self.target_pw - self.pw_f
        return float(np.sqrt(max(self._wdot(d, d), 0.0)))

    def target_norm(self) -> float:
        t = self.target_pw
        return float(np.sqrt(max(self._wdot(t, t), 0.0)))

    def copy(self) -> "PursuitState":
        dup = object.__new__(PursuitState)
        dup.space = self.space
        dup.v_atoms = self.v_atoms
        dup.u_atoms = self.u_atoms
        dup.u_norms = self.u_norms
        dup.f = self.f
        dup.f_work = self.f_work
        dup.target_pw = self.target_pw
        dup.selected = list(self.selected)
        dup.w = self.w.copy()
        dup.coeffs = self.coeffs.copy()
        dup.q_sel = self.q_sel.copy()
        dup.gamma = self.gamma.copy()
        dup.pw_f = self.pw_f.copy()
        dup.forward_steps = self.forward_steps
        dup.committed_swaps = self.committed_swaps
        return dup

    def restore(self, other: "PursuitState") -> None:
        self.selected = list(other.selected)
        self.w = other.w.copy()
        self.coeffs = other.coeffs.copy()
        self.q_sel = other.q_sel.copy()
        self.gamma = other.gamma.copy()
        self.pw_f = other.pw_f.copy()
        self.forward_steps = other.forward_steps
        self.committed_swaps = other.committed_swaps

    def reset(self) -> None:
        """Back to the empty selection (families and target unchanged)."""
        n = self.space.size
        self.selected = []
        self.w = np.zeros((0, n))
        self.coeffs = np.zeros(0)
        self.q_sel = np.zeros((0, n))
        self.gamma = self.u_atoms.copy()
        self.pw_f = np.zeros(n)


def init_state(f: np.ndarray, v_family: AtomFamily, u_family: AtomFamily,
               wperp_basis: AtomFamily, *, w_basis: Optional[AtomFamily] = None) -> PursuitState:
    """Fresh state: empty selection, gamma_n = u_n, target P_W f.

    Pass a precomputed orthonormal basis of W through w_basis to avoid
    re-orthonormalizing the u family for every signal.
    """
    if w_basis is None:
        w_basis, _, _ = orthonormalize(u_family)
    prepared = Prepared(v_family, u_family, wperp_basis, w_basis)
    return PursuitState(prepared, f)


def _orthonormal_rows(atoms: np.ndarray, state: PursuitState) -> np.ndarray:
    """Orthonormal basis of the row span, two-pass Gram-Schmidt, vectorized.

    The retained atoms of a backward step are stability-filtered, so no rank
    handling is needed beyond skipping exact zeros.
    """
    rows = []
    for a in atoms:
        v = a.astype(float).copy()
        for _ in range(2):
            if rows:
                q = np.asarray(rows)
                v -= state._wdot(q, v) @ q
        nrm = float(np.sqrt(max(state._wdot(v, v), 0.0)))
        if nrm > 0.0:
            rows.append(v / nrm)
    return np.asarray(rows) if rows else np.zeros((0, atoms.shape[1]))


def _scores(state: PursuitState, stab_tol: float):
    """Selection scores |<gamma_n, f>| / ||gamma_n|| and admissibility mask."""
    gnorms = state.gamma_norms()
    admissible = gnorms > stab_tol * state.u_norms
    admissible &= state.u_norms > 0
    if state.selected:
        admissible[np.asarray(state.selected, dtype=int)] = False
    corr = np.abs(state._wdot(state.gamma, state.f_work))
    with np.errstate(divide="ignore", invalid="ignore"):
        scores = np.where(admissible, corr / gnorms, -np.inf)
    return scores, admissible, gnorms


def select_forward(state: PursuitState, stab_tol: float = DEFAULT_STAB_TOL) -> int:
    """Index maximizing |<gamma_n, f>| / ||gamma_n|| over admissible candidates.

    Equivalent to one OOMP step on the projected signal P_W f, and to the
    exhaustive one-step minimization of ||P_W f - P_{W_{k+1}} f||. Ties break
    to the lowest atom index; raises StabilityStop when no candidate clears
    the stability threshold.
    """
    scores, admissible, _ = _scores(state, stab_tol)
    if not np.any(admissible):
        raise StabilityStop(
            f"no admissible candidate at k={state.k}: all residual atoms below "
            f"stab_tol={stab_tol:g}")
    return int(np.argmax(scores))  # argmax takes the first (lowest) index on ties


def consistency_error(state: PursuitState, index: int) -> float:
    """Relative consistency error |<gamma_l, f>| / ||gamma_l|| of a candidate."""
    g = state.gamma[index]
    gn = float(np.sqrt(max(state._wdot(g, g), 0.0)))
    if gn == 0.0:
        raise ValueError(f"candidate {index} has zero residual atom")
    return float(abs(state._wdot(g, state.f_work)) / gn)


def forward_step(state: PursuitState, index: int,
                 stab_tol: float = DEFAULT_STAB_TOL) -> PursuitState:
    """Add atom `index`, updating measurement vectors and coefficients.

    w_new = gamma_l / ||gamma_l||^2,
    w_i  <- w_i - w_new <v_l, w_i>,      c_i <- c_i - c_new <w_i, v_l>,
    and every cached gamma is downdated along the new orthonormal direction.
    """
    if index in state.selected:
        raise ValueError(f"atom {index} already selected")
    g = state.gamma[index]
    # the cache is downdated in a single pass per step, so its orthogonality
    # to W_k drifts like eps * cond(selection); re-orthogonalize the entering
    # atom once more so q_sel and w stay clean at machine level
    if state.k:
        g = g - state._wdot(state.q_sel, g) @ state.q_sel
    gn = float(np.sqrt(max(state._wdot(g, g), 0.0)))
    if gn <= stab_tol * state.u_norms[index]:
        raise StabilityStop(
            f"atom {index} is numerically dependent on the selection "
            f"(||gamma||/||u|| = {gn / max(state.u_norms[index], 1e-300):.3e})")
    w_new = g / gn ** 2
    c_new = float(state._wdot(w_new, state.f_work))
    v_l = state.v_atoms[index]
    if state.k:
        s = state._wdot(state.w, v_l)  # s_i = <v_l, w_i> (real symmetric)
        state.w -= np.outer(s, w_new)
        state.coeffs -= c_new * s
    state.w = np.vstack([state.w, w_new])
    state.coeffs = np.append(state.coeffs, c_new)
    q = g / gn
    state.q_sel = np.vstack([state.q_sel, q])
    t = state._wdot(state.gamma, q)  # <q, gamma_n>
    state.gamma -= np.outer(t, q)
    state.pw_f = state.pw_f + q * float(state._wdot(q, state.f_work))
    state.selected.append(int(index))
    state.forward_steps += 1
    return state


def select_backward(state: PursuitState) -> int:
    """Atom index minimizing |c_i| / ||w_i||; ties break to lowest atom index."""
    if not state.selected:
        raise ValueError("empty selection")
    weighted = state.w * state.space.weights if state.space.kind == "quadrature" \
        else state.w
    wn = np.sqrt(np.maximum(np.einsum("ij,ij->i", state.w, weighted), 0.0))
    ratios = np.abs(state.coeffs) / wn
    best = min(range(state.k), key=lambda i: (ratios[i], state.selected[i]))
    return state.selected[best]


def backward_step(state: PursuitState, index: int) -> PursuitState:
    """Remove atom `index` from the selection.

    Measurement vectors and coefficients follow the downdating recursions;
    q_sel is rebuilt by re-orthonormalizing the retained u atoms (stability
    over speed), and every gamma is recomputed against the new W_k basis.
    """
    if index not in state.selected:
        raise ValueError(f"atom {index} is not selected")
    pos = state.selected.index(index)
    w_j = state.w[pos].copy()
    c_j = state.coeffs[pos]
    wn2 = float(state._wdot(w_j, w_j))
    s = state._wdot(state.w, w_j)  # <w_j, w_i> (real symmetric)
    state.w = state.w - np.outer(s / wn2, w_j)
    state.coeffs = state.coeffs - c_j * s / wn2
    state.w = np.delete(state.w, pos, axis=0)
    state.coeffs = np.delete(state.coeffs, pos)
    state.selected.pop(pos)
    basis = _orthonormal_rows(state.u_atoms[state.selected], state) \
        if state.selected else np.zeros((0, state.space.size))
    if len(basis):
        state.q_sel = basis
        coeff = state._wdot(state.u_atoms, state.q_sel.T)  # <q_j, u_n>
        state.gamma = state.u_atoms - coeff @ state.q_sel
        state.pw_f = state._wdot(state.q_sel, state.f_work) @ state.q_sel
    else:
        state.q_sel = np.zeros((0, state.space.size))
        state.gamma = state.u_atoms.copy()
        state.pw_f = np.zeros(state.space.size)
    return state


def swap_refine(state: PursuitState, depth: int = 1,
                stab_tol: float = DEFAULT_STAB_TOL,
                commit_rtol: float = SWAP_COMMIT_RTOL) -> PursuitState:
    """Interchange `depth` selected atoms with new ones while it pays off.

    Each cycle removes `depth` atoms chosen by successive backward selection
    and then runs `depth` forward selections on the downdated state. The
    cycle is committed only when it strictly decreases
    ||P_W f - P_{W_k} f||^2; otherwise the state is rolled back and the
    refinement stops.
    """
    if depth < 1 or depth > state.k:
        raise ValueError(f"depth must lie in [1, {state.k}]")
    while True:
        obj0 = state.residual() ** 2
        snapshot = state.copy()
        try:
            for _ in range(depth):
                j = select_backward(state)
                backward_step(state, j)
            for _ in range(depth):
                l = select_forward(state, stab_tol)
                forward_step(state, l, stab_tol)
        except StabilityStop:
            state.restore(snapshot)
            return state
        obj1 = state.residual() ** 2
        if obj1 < obj0 * (1.0 - commit_rtol):
            state.committed_swaps += 1
            continue
        state.restore(snapshot)
        return state


@dataclass
class PursuitResult:
    """Outcome of the adaptive search."""

    support: list[int]
    coefficients: np.ndarray
    component: np.ndarray
    converged: bool
    diagnostics: dict = field(default_factory=dict)


def _forward_phase(state: PursuitState, config: PursuitConfig,
                   stop_abs: float, r_max: int) -> None:
    while state.residual() > stop_abs and state.k < r_max:
        try:
            l = select_forward(state, config.stab_tol)
            forward_step(state, l, config.stab_tol)
        except StabilityStop:
            break


def _swap_phase(state: PursuitState, config: PursuitConfig, stop_abs: float) -> None:
    for depth in range(1, config.max_swap_depth + 1):
        if state.residual() <= stop_abs or depth > state.k:
            return
        swap_refine(state, depth, config.stab_tol)


def _prune_phase(state: PursuitState, stop_abs: float) -> None:
    """Backward-eliminate atoms that the consistency check does not need.

    A converged selection may exceed the signal's sparsity, carrying (near)
    zero coefficients. Removing the weakest atom keeps the residual at its
    floor exactly when that atom is redundant, so deletions are committed
    while the stopping criterion still holds.
    """
    while state.k > 0:
        j = select_backward(state)
        snapshot = state.copy()
        backward_step(state, j)
        if state.residual() > stop_abs:
            state.restore(snapshot)
            return


def oblique_pursuit(f: np.ndarray, v_family: Optional[AtomFamily] = None,
                    wperp_raw: Optional[AtomFamily] = None,
                    config: Optional[PursuitConfig] = None, *,
                    prepared: Optional[Prepared] = None) -> PursuitResult:
    """Find a sparse support whose oblique splitting reproduces P_W f.

    Forward selection runs until the consistency residual meets stop_tol (in
    units of ||P_W f||), the stability threshold blocks further steps, or
    r_max is hit. A stalled search escalates through swap cycles of depth
    1..max_swap_depth and finally re-initializes with the next-best first
    atom, up to max_restarts times. On budget exhaustion the best state seen
    is returned with converged=False.
    """
    config = config or PursuitConfig()
    if prepared is None:
        if v_family is None or wperp_raw is None:
            raise ValueError("either prepared families or (v_family, wperp_raw) required")
        prepared = prepare_families(v_family, wperp_raw)
    state = PursuitState(prepared, np.asarray(f, dtype=float))
    target = state.target_norm()
    r_max = min(config.r_max or state.M, state.M)
    restarts_used = 0

    f_norm = float(np.sqrt(max(state._wdot(state.f, state.f), 0.0)))
    if target <= 1e-13 * f_norm:
        # signal has no component in W at working precision (f in Wperp,
        # or f = 0): the empty support is the splitting
        return PursuitResult(
            support=[], coefficients=np.zeros(0),
            component=np.zeros(state.space.size), converged=True,
            diagnostics={"iterations": 0, "swaps": 0, "restarts": 0,
                         "residual": 0.0})
    stop_abs = config.stop_tol * target

    # ranking of first atoms for the deterministic re-initialization schedule
    first_scores, admissible, _ = _scores(state, config.stab_tol)
    ranking = [int(i) for i in np.argsort(-first_scores, kind="stable")
               if admissible[i]]

    best: Optional[PursuitState] = None
    attempt = 0
    while True:
        if attempt > 0:
            state.reset()
            if attempt >= len(ranking):
                break
            forward_step(state, ranking[attempt], config.stab_tol)
            restarts_used += 1
        _forward_phase(state, config, stop_abs, r_max)
        if state.residual() > stop_abs and state.k > 0:
            _swap_phase(state, config, stop_abs)
        if state.residual() <= stop_abs:
            _prune_phase(state, stop_abs)
        if best is None or state.residual() < best.residual():
            best = state.copy()
        if state.residual() <= stop_abs or attempt >= config.max_restarts:
            break
        attempt += 1

    final = best if best is not None else state
    res = final.residual()
    converged = res <= stop_abs
    component = final.coeffs @ final.v_atoms[final.selected] if final.k \
        else np.zeros(final.space.size)
    return PursuitResult(
        support=list(final.selected),
        coefficients=final.coeffs.copy(),
        component=component,
        converged=converged,
        diagnostics={"iterations": final.forward_steps,
                     "swaps": final.committed_swaps,
                     "restarts": restarts_used,
                     "residual": res / target})
