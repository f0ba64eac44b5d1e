import numpy as np
import pytest

from conftest import random_family, well_conditioned_toy
from obliquesplit.errors import DegenerateFamily, SubspaceIntersection
from obliquesplit.hilbert import (AtomFamily, gram, inner, norm,
                                  orthonormalize, project_orthogonal,
                                  space_euclidean, space_trapezoid)
from obliquesplit.oblique import (apply_projector, build_oblique_projector,
                                  complement_family, measurement_vectors,
                                  min_angle, subspace_min_angle,
                                  truncate_projector)


class TestComplementFamily:
    def test_empty_noise_family_returns_v(self):
        sp = space_euclidean(4)
        v = AtomFamily(sp, np.eye(4)[:2])
        u, basis = complement_family(v, AtomFamily.empty(sp))
        assert np.abs(u.atoms - v.atoms).max() == 0.0
        assert len(basis) == 0

    def test_already_orthogonal(self):
        sp = space_euclidean(3)
        v = AtomFamily(sp, [[1.0, 0.0, 0.0]])
        wperp = AtomFamily(sp, [[0.0, 1.0, 0.0]])
        u, _ = complement_family(v, wperp)
        assert np.allclose(u.atoms, [[1.0, 0.0, 0.0]])

    def test_hand_projection(self):
        sp = space_euclidean(2)
        v = AtomFamily(sp, [[1.0, 0.0]])
        wperp = AtomFamily(sp, [[1.0, 1.0]])
        u, _ = complement_family(v, wperp)
        assert np.allclose(u.atoms, [[0.5, -0.5]])

    def test_intersection_detected(self):
        sp = space_euclidean(3)
        v = AtomFamily(sp, [[1.0, 2.0, 0.0]])
        wperp = AtomFamily(sp, [[1.0, 2.0, 0.0], [0.0, 0.0, 1.0]])
        with pytest.raises(SubspaceIntersection):
            complement_family(v, wperp)

    def test_zero_v_atom_rejected(self):
        sp = space_euclidean(3)
        v = AtomFamily(sp, [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        with pytest.raises(DegenerateFamily):
            complement_family(v, AtomFamily.empty(sp))


class TestBuildObliqueProjector:
    def test_orthonormal_v_without_noise(self):
        sp = space_euclidean(5)
        v = AtomFamily(sp, np.eye(5)[:3])
        p = build_oblique_projector(v, AtomFamily.empty(sp))
        assert np.allclose(p.sigma, 1.0)
        assert np.abs(p.xi.atoms - v.atoms).max() < 1e-12
        assert np.abs(p.eta.atoms - v.atoms).max() < 1e-12

    def test_hand_solved_r2_case(self):
        # f = alpha (1,0) + beta (1,1); for f = (2,1): alpha = 1, beta = 1
        sp = space_euclidean(2)
        v = AtomFamily(sp, [[1.0, 0.0]])
        wperp = AtomFamily(sp, [[1.0, 1.0]])
        p = build_oblique_projector(v, wperp)
        assert np.allclose(apply_projector(p, np.array([2.0, 1.0])),
                           [1.0, 0.0], atol=1e-12)

    def test_fixes_v_annihilates_wperp(self):
        rng = np.random.default_rng(2)
        space, v, wperp = well_conditioned_toy(rng)
        p = build_oblique_projector(v, wperp)
        f_v = rng.standard_normal(len(v)) @ v.atoms
        assert norm(apply_projector(p, f_v) - f_v, space) < 1e-8 * norm(f_v, space)
        f_w = rng.standard_normal(len(wperp)) @ wperp.atoms
        assert norm(apply_projector(p, f_w), space) < 1e-8 * norm(f_w, space)

    def test_idempotent_on_random_inputs(self):
        rng = np.random.default_rng(4)
        space, v, wperp = well_conditioned_toy(rng)
        p = build_oblique_projector(v, wperp)
        for _ in range(5):
            f = rng.standard_normal(space.size)
            once = apply_projector(p, f)
            assert norm(apply_projector(p, once) - once, space) \
                <= 1e-8 * max(norm(f, space), 1.0)

    def test_biorthogonality(self):
        rng = np.random.default_rng(6)
        _, v, wperp = well_conditioned_toy(rng)
        p = build_oblique_projector(v, wperp)
        cross = gram(p.xi, p.eta).entries
        assert np.abs(cross - np.eye(p.rank)).max() < 1e-8

    def test_xi_reproduced_from_u_and_psi(self):
        rng = np.random.default_rng(8)
        _, v, wperp = well_conditioned_toy(rng)
        p = build_oblique_projector(v, wperp)
        rebuilt = (p.psi / p.sigma).T @ p.u_family.atoms
        assert np.abs(rebuilt - p.xi.atoms).max() < 1e-8

    def test_sigma_descending_positive(self):
        rng = np.random.default_rng(10)
        _, v, wperp = well_conditioned_toy(rng, m_v=8)
        p = build_oblique_projector(v, wperp)
        assert np.all(p.sigma > 0)
        assert np.all(np.diff(p.sigma) <= 0)

    def test_redundant_v_family_handled_by_pseudo_inverse(self):
        rng = np.random.default_rng(12)
        sp = space_euclidean(20)
        base = rng.standard_normal((4, 20))
        v = AtomFamily(sp, np.vstack([base, base[0] + base[1]]))
        wperp = random_family(sp, 2, rng)
        p = build_oblique_projector(v, wperp)
        assert p.rank == 4
        f = rng.standard_normal(4) @ base
        assert norm(apply_projector(p, f) - f, sp) < 1e-8


class TestMeasurementVectors:
    def test_orthonormal_self_dual(self):
        sp = space_euclidean(4)
        v = AtomFamily(sp, np.eye(4)[:2])
        p = build_oblique_projector(v, AtomFamily.empty(sp))
        w = measurement_vectors(p)
        assert np.abs(w.atoms - v.atoms).max() < 1e-12

    def test_single_atom_dual(self):
        sp = space_euclidean(3)
        v = AtomFamily(sp, [[2.0, 0.0, 0.0]])
        wperp = AtomFamily(sp, [[0.0, 1.0, 0.0]])
        p = build_oblique_projector(v, wperp)
        w = measurement_vectors(p)
        u1 = p.u_family.atoms[0]
        assert np.allclose(w.atoms[0], u1 / (u1 @ u1))

    def test_duality_via_gram_inversion_oracle(self):
        rng = np.random.default_rng(14)
        space, v, wperp = well_conditioned_toy(rng, m_v=4)
        p = build_oblique_projector(v, wperp)
        w = measurement_vectors(p)
        cross = gram(w, v).entries
        assert np.abs(cross - np.eye(4)).max() < 1e-8
        # independent oracle: w = G^+ u row-combinations per the dual formula
        g = gram(p.u_family, v).entries
        w_oracle = np.linalg.pinv(g) @ p.u_family.atoms
        assert np.abs(w_oracle - w.atoms).max() < 1e-8

    def test_representation_equivalence(self):
        rng = np.random.default_rng(16)
        space, v, wperp = well_conditioned_toy(rng)
        p = build_oblique_projector(v, wperp)
        w = measurement_vectors(p)
        for _ in range(5):
            f = rng.standard_normal(space.size)
            via_w = np.array([inner(wi, f, space) for wi in w.atoms]) @ v.atoms
            assert norm(via_w - apply_projector(p, f), space) < 1e-8


class TestTruncation:
    def test_full_rank_truncation_matches_projector(self):
        rng = np.random.default_rng(18)
        space, v, wperp = well_conditioned_toy(rng)
        p = build_oblique_projector(v, wperp)
        t = truncate_projector(p, p.rank)
        f = rng.standard_normal(space.size)
        assert norm(apply_projector(t, f) - apply_projector(p, f), space) < 1e-10

    def test_annihilates_discarded_directions(self):
        rng = np.random.default_rng(20)
        space, v, wperp = well_conditioned_toy(rng, m_v=6)
        p = build_oblique_projector(v, wperp)
        r = p.rank - 2
        t = truncate_projector(p, r)
        for j in range(r, p.rank):
            out = apply_projector(t, p.eta.atoms[j])
            assert norm(out, space) < 1e-8 * norm(p.eta.atoms[j], space)
            out_xi = apply_projector(t, p.xi.atoms[j])
            assert norm(out_xi, space) < 1e-8

    def test_keeps_leading_directions(self):
        rng = np.random.default_rng(22)
        space, v, wperp = well_conditioned_toy(rng, m_v=6)
        p = build_oblique_projector(v, wperp)
        t = truncate_projector(p, 2)
        for j in range(2):
            out = apply_projector(t, p.eta.atoms[j])
            assert norm(out - p.eta.atoms[j], space) < 1e-8

    def test_r_out_of_range(self):
        sp = space_euclidean(4)
        v = AtomFamily(sp, np.eye(4)[:2])
        p = build_oblique_projector(v, AtomFamily.empty(sp))
        with pytest.raises(ValueError):
            truncate_projector(p, 0)
        with pytest.raises(ValueError):
            truncate_projector(p, p.rank + 1)


class TestMinAngle:
    def test_identical_subspaces(self):
        sp = space_euclidean(4)
        v = AtomFamily(sp, np.eye(4)[:2])
        p = build_oblique_projector(v, AtomFamily.empty(sp))
        assert min_angle(p) == pytest.approx(0.0, abs=1e-7)

    def test_orthogonal_lines_helper(self):
        sp = space_euclidean(2)
        a = AtomFamily(sp, [[1.0, 0.0]])
        b = AtomFamily(sp, [[0.0, 1.0]])
        assert subspace_min_angle(a, b) == pytest.approx(np.pi / 2)

    def test_quarter_turn(self):
        sp = space_euclidean(2)
        v = AtomFamily(sp, [[1.0, 0.0]])
        wperp = AtomFamily(sp, [[1.0, 1.0]])
        p = build_oblique_projector(v, wperp)
        assert min_angle(p) == pytest.approx(np.pi / 4, abs=1e-12)

    def test_error_bound_sandwich(self):
        rng = np.random.default_rng(24)
        space, v, wperp = well_conditioned_toy(rng)
        p = build_oblique_projector(v, wperp)
        v_basis, _, _ = orthonormalize(v)
        inflation = 1.0 / np.cos(min_angle(p))
        for _ in range(10):
            f = rng.standard_normal(space.size)
            best = norm(f - project_orthogonal(v_basis, f), space)
            oblique = norm(f - apply_projector(p, f), space)
            assert best <= oblique + 1e-8
            assert oblique <= inflation * best + 1e-8


class TestPropertyOne:
    def test_pw_after_projector_equals_pw(self):
        # P_W applied after the oblique projector acts like P_W itself
        rng = np.random.default_rng(26)
        space, v, wperp = well_conditioned_toy(rng)
        p = build_oblique_projector(v, wperp)
        for _ in range(5):
            f = rng.standard_normal(space.size)
            lhs = project_orthogonal(p.xi, apply_projector(p, f), check=False)
            rhs = project_orthogonal(p.xi, f, check=False)
            assert norm(lhs - rhs, space) < 1e-8
