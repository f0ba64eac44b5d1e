import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from obliquesplit.errors import DimensionMismatch, NotOrthonormal
from obliquesplit.hilbert import (AtomFamily, SpaceSpec, gram, inner, norm,
                                  orthonormalize, project_orthogonal,
                                  space_euclidean, space_trapezoid)


class TestSpaceSpec:
    def test_trapezoid_weights_sum_to_length(self):
        sp = space_trapezoid(0.0, 10.0, 0.01)
        assert sp.weights.sum() == pytest.approx(10.0)

    def test_grid_must_increase(self):
        with pytest.raises(ValueError):
            SpaceSpec("euclidean", np.array([0.0, 0.0, 1.0]))

    def test_negative_weights_rejected(self):
        with pytest.raises(ValueError):
            SpaceSpec("quadrature", np.array([0.0, 1.0]), np.array([1.0, -1.0]))

    def test_weights_length_mismatch(self):
        with pytest.raises(DimensionMismatch):
            SpaceSpec("quadrature", np.array([0.0, 1.0]), np.array([1.0]))

    def test_step_must_tile_interval(self):
        with pytest.raises(ValueError):
            space_trapezoid(0.0, 1.0, 0.3)


class TestInner:
    def test_constant_on_0_10_is_exact(self):
        sp = space_trapezoid(0.0, 10.0, 0.05)
        one = np.ones(sp.size)
        assert inner(one, one, sp) == pytest.approx(10.0, abs=1e-12)

    def test_integral_of_x_squared(self):
        # closed-form integral of x^2 over [0, 1] as the oracle
        sp = space_trapezoid(0.0, 1.0, 0.001)
        x = sp.grid
        assert inner(x, x, sp) == pytest.approx(1.0 / 3.0, abs=1e-6)

    def test_euclidean_dot(self):
        sp = space_euclidean(2)
        assert inner(np.array([1.0, 2.0]), np.array([3.0, 4.0]), sp) == 11.0

    def test_length_mismatch(self):
        sp = space_euclidean(3)
        with pytest.raises(DimensionMismatch):
            inner(np.ones(2), np.ones(3), sp)

    @given(st.lists(st.floats(-1e3, 1e3), min_size=4, max_size=4),
           st.lists(st.floats(-1e3, 1e3), min_size=4, max_size=4))
    @settings(max_examples=50, deadline=None)
    def test_conjugate_symmetry(self, a, b):
        sp = space_trapezoid(0.0, 1.0, 1.0 / 3.0)
        f, g = np.array(a), np.array(b)
        assert inner(f, g, sp) == pytest.approx(np.conj(inner(g, f, sp)))

    @given(st.lists(st.floats(-1e3, 1e3).map(
        lambda x: 0.0 if abs(x) < 1e-100 else x), min_size=4, max_size=4))
    @settings(max_examples=50, deadline=None)
    def test_positivity(self, a):
        # magnitudes are kept away from the subnormal range where squares
        # underflow to exact zero
        sp = space_trapezoid(0.0, 1.0, 1.0 / 3.0)
        f = np.array(a)
        val = inner(f, f, sp)
        assert val >= 0.0
        if np.any(f != 0.0):
            assert val > 0.0


class TestGram:
    def test_orthonormal_family_gives_identity(self):
        sp = space_euclidean(4)
        fam = AtomFamily(sp, np.eye(4)[:3])
        g = gram(fam, fam).entries
        assert np.abs(g - np.eye(3)).max() < 1e-12

    def test_hand_computed_entries(self):
        sp = space_euclidean(2)
        fam = AtomFamily(sp, [[1.0, 0.0], [1.0, 1.0]])
        g = gram(fam, fam).entries
        assert np.allclose(g, [[1.0, 1.0], [1.0, 2.0]])

    def test_hermitian_psd_when_families_coincide(self):
        rng = np.random.default_rng(3)
        sp = space_trapezoid(0.0, 1.0, 0.05)
        fam = AtomFamily(sp, rng.standard_normal((6, sp.size)))
        g = gram(fam, fam).entries
        assert np.abs(g - g.T).max() < 1e-14
        assert np.linalg.eigvalsh(g).min() > -1e-12

    def test_space_mismatch(self):
        a = AtomFamily(space_euclidean(3), np.eye(3))
        b = AtomFamily(space_euclidean(4), np.eye(4))
        with pytest.raises(DimensionMismatch):
            gram(a, b)


class TestOrthonormalize:
    def test_orthonormal_input_is_fixed_point(self):
        sp = space_euclidean(5)
        fam = AtomFamily(sp, np.eye(5)[:4])
        ortho, rank, cmap = orthonormalize(fam)
        assert rank == 4
        assert np.abs(ortho.atoms - fam.atoms).max() < 1e-14
        assert np.allclose(cmap, np.eye(4, 4))

    def test_duplicate_atoms_give_rank_one(self):
        sp = space_euclidean(4)
        fam = AtomFamily(sp, [[1.0, 2.0, 0.0, 1.0]] * 2)
        _, rank, _ = orthonormalize(fam)
        assert rank == 1

    def test_all_zero_family(self):
        sp = space_euclidean(4)
        fam = AtomFamily(sp, np.zeros((3, 4)))
        ortho, rank, cmap = orthonormalize(fam)
        assert rank == 0 and len(ortho) == 0 and cmap.shape == (0, 3)

    def test_random_family_against_gram_eigendecomposition(self):
        # eigen-oracle: numerical rank of the input Gram fixes the basis size
        rng = np.random.default_rng(7)
        sp = space_euclidean(10)
        atoms = rng.standard_normal((5, 10))
        fam = AtomFamily(sp, atoms)
        ortho, rank, cmap = orthonormalize(fam)
        g = gram(ortho, ortho).entries
        assert np.abs(g - np.eye(rank)).max() < 1e-12
        eigs = np.linalg.eigvalsh(gram(fam, fam).entries)
        assert rank == np.sum(eigs > 1e-20 * eigs.max())
        # the coefficient map reconstructs every q from the input atoms
        assert np.abs(cmap @ atoms - ortho.atoms).max() < 1e-10

    def test_rerun_is_stable(self):
        rng = np.random.default_rng(11)
        sp = space_trapezoid(0.0, 1.0, 0.02)
        fam = AtomFamily(sp, rng.standard_normal((6, sp.size)))
        once, rank, _ = orthonormalize(fam)
        twice, rank2, _ = orthonormalize(once)
        assert rank2 == rank
        assert np.abs(twice.atoms - once.atoms).max() < 1e-12


class TestProjectOrthogonal:
    def test_fixes_vectors_in_span(self):
        rng = np.random.default_rng(5)
        sp = space_euclidean(8)
        basis, _, _ = orthonormalize(
            AtomFamily(sp, rng.standard_normal((3, 8))))
        f = rng.standard_normal(3) @ basis.atoms
        assert np.abs(project_orthogonal(basis, f) - f).max() < 1e-10

    def test_annihilates_orthogonal_complement(self):
        sp = space_euclidean(4)
        basis = AtomFamily(sp, np.eye(4)[:2])
        f = np.array([0.0, 0.0, 1.0, -2.0])
        assert np.abs(project_orthogonal(basis, f)).max() < 1e-10

    def test_hand_evaluated_projection(self):
        sp = space_euclidean(2)
        basis = AtomFamily(sp, [[1.0 / np.sqrt(2.0), 1.0 / np.sqrt(2.0)]])
        out = project_orthogonal(basis, np.array([1.0, 0.0]))
        assert np.allclose(out, [0.5, 0.5])

    def test_rejects_non_orthonormal_basis(self):
        sp = space_euclidean(3)
        basis = AtomFamily(sp, [[1.0, 1.0, 0.0]])
        with pytest.raises(NotOrthonormal):
            project_orthogonal(basis, np.ones(3))

    def test_idempotent_and_self_adjoint(self):
        rng = np.random.default_rng(13)
        sp = space_trapezoid(0.0, 2.0, 0.05)
        basis, _, _ = orthonormalize(
            AtomFamily(sp, rng.standard_normal((4, sp.size))))
        for _ in range(5):
            f = rng.standard_normal(sp.size)
            g = rng.standard_normal(sp.size)
            pf = project_orthogonal(basis, f)
            assert np.abs(project_orthogonal(basis, pf) - pf).max() < 1e-10
            assert norm(pf, sp) <= norm(f, sp) + 1e-12
            assert inner(pf, g, sp) == pytest.approx(
                inner(f, project_orthogonal(basis, g), sp), abs=1e-10)
