import numpy as np
import pytest

from obliquesplit.hilbert import AtomFamily, space_euclidean, space_trapezoid


@pytest.fixture
def euclid5():
    return space_euclidean(5)


def random_family(space, m, rng, scale=1.0):
    return AtomFamily(space, scale * rng.standard_normal((m, space.size)))


def well_conditioned_toy(rng, n=40, m_v=6, m_w=3):
    """Random V and Wperp families with healthy separation.

    Gaussian atoms in moderate dimension are nearly orthogonal, so the
    resulting projector is well conditioned with overwhelming probability.
    """
    space = space_euclidean(n)
    v = random_family(space, m_v, rng)
    wperp = random_family(space, m_w, rng)
    return space, v, wperp


def ill_conditioned_toy(rng, n=30, m_v=10, m_w=3, closeness=1e-4):
    """V and Wperp sharing near-common directions.

    A few v atoms are nudged toward the span of wperp so that the coupling
    spectrum acquires tiny singular values without an exact intersection.
    """
    space = space_euclidean(n)
    wperp_atoms = rng.standard_normal((m_w, n))
    v_atoms = rng.standard_normal((m_v, n))
    for i in range(min(3, m_v)):
        direction = wperp_atoms[i % m_w]
        direction = direction / np.linalg.norm(direction)
        v_atoms[i] = closeness * v_atoms[i] + direction
    return space, AtomFamily(space, v_atoms), AtomFamily(space, wperp_atoms)
