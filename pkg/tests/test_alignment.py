import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gframe.alignment import (
    align,
    aligned_product,
    center_of_mass_assignment,
    is_alignable,
    qrf_transform_aligned,
)
from gframe.errors import GroupMismatchError, NotAlignableError
from gframe.relframes import frame_change
from gframe.spaces import KinSpace
from gframe.states import basis_state, superposition, translated_pair
from gframe.symmetry import SymmetryAssignment, observationally_equivalent, random_assignment

import oracles


def rand_density(dim, rng):
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = A @ A.conj().T
    return rho / np.trace(rho).real


def aligned_random(sp, rng):
    """|e><e|_1 (x) sigma followed by a random symmetry."""
    sigma = rand_density(sp.d ** (sp.N - 1), rng)
    rho = aligned_product(sp, 1, 0, sigma)
    return sigma, random_assignment(sp, rng).apply(rho)


def test_aligned_product_is_alignable_identity_table():
    sp = KinSpace(3, 2)
    rho = aligned_product(sp, 1, 0, rand_density(3, np.random.default_rng(0)))
    assert is_alignable(sp, rho) == SymmetryAssignment.identity(sp)


def test_alignability_examples():
    sp = KinSpace(2, 2)
    bell = superposition(sp, [(0, 0), (1, 1)])
    assert is_alignable(sp, bell) is None
    assert is_alignable(sp, np.outer(bell, bell.conj())) is None
    with pytest.raises(NotAlignableError):
        align(sp, bell)
    sp3, psi, psi_prime, _ = translated_pair(5)
    assert is_alignable(sp3, psi) is not None
    assert is_alignable(sp3, psi_prime) is not None
    with pytest.raises(GroupMismatchError):
        is_alignable(sp, np.ones(3))


def test_terms_in_different_sectors_stay_alignable():
    # |0,0> and |1,0> carry different relations, so their superposition is alignable
    sp = KinSpace(2, 2)
    psi = superposition(sp, [(0, 0), (1, 0)])
    assert is_alignable(sp, psi) is not None
    assert is_alignable(sp, (np.diag([1, 0, 0, 0]) + np.diag([0, 0, 1, 0])) / 2) is not None


def test_same_sector_superposition_and_mixture_not_alignable():
    sp = KinSpace(2, 2)
    a, b = (0, 0), (1, 1)
    assert is_alignable(sp, basis_state(sp, a)) is not None
    assert is_alignable(sp, basis_state(sp, b)) is not None
    assert is_alignable(sp, superposition(sp, [a, b])) is None
    mix = (np.outer(basis_state(sp, a), basis_state(sp, a)) + np.outer(basis_state(sp, b), basis_state(sp, b))) / 2
    assert is_alignable(sp, mix) is None


def test_align_already_aligned():
    sp = KinSpace(3, 3)
    sigma = rand_density(9, np.random.default_rng(1))
    res = align(sp, aligned_product(sp, 1, 0, sigma), 1)
    assert np.abs(res.reduced - sigma).max() < 1e-12
    assert res.orientation == (0,)


@pytest.mark.parametrize("n,N", [(2, 2), (3, 2), (2, 3), (3, 3), (4, 3)])
def test_align_recovers_reduced_state_and_symmetry(n, N):
    sp = KinSpace(n, N)
    rng = np.random.default_rng(2)
    for _ in range(3):
        sigma, rho = aligned_random(sp, rng)
        res = align(sp, rho, 1)
        assert np.abs(res.reduced - sigma).max() < 1e-10
        assert np.abs(res.used_symmetry.apply(rho) - aligned_product(sp, 1, 0, res.reduced)).max() < 1e-10
        for i in range(1, N + 1):
            for g in range(n):
                r = align(sp, rho, i, g)
                assert np.abs(r.used_symmetry.apply(rho) - aligned_product(sp, i, g, r.reduced)).max() < 1e-10


def test_align_orientation_is_translated_reduction():
    sp = KinSpace(4, 3)
    rng = np.random.default_rng(3)
    _, rho = aligned_random(sp, rng)
    base = align(sp, rho, 1, 0).reduced
    sub = sp.sub(2)
    for g in range(4):
        Ug = sub.translation(g)
        assert np.abs(align(sp, rho, 1, g).reduced - Ug @ base @ Ug.conj().T).max() < 1e-12


def test_uniqueness_via_two_paths():
    sp = KinSpace(3, 3)
    rng = np.random.default_rng(4)
    sigma, rho = aligned_random(sp, rng)
    other = random_assignment(sp, rng).apply(rho)
    assert np.abs(align(sp, rho).reduced - align(sp, other).reduced).max() < 1e-10


def test_vector_and_density_inputs_agree():
    sp, psi, _, _ = translated_pair(5)
    r_vec = align(sp, psi, 2).reduced
    r_mat = align(sp, np.outer(psi, psi.conj()), 2).reduced
    assert np.abs(np.outer(r_vec, r_vec.conj()) - r_mat).max() < 1e-12


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_alignable_set_closed_under_symmetries(seed):
    rng = np.random.default_rng(seed)
    sp = KinSpace(3, 3)
    _, rho = aligned_random(sp, rng)
    for _ in range(5):
        assert is_alignable(sp, random_assignment(sp, rng).apply(rho)) is not None


def test_frame_independence():
    sp = KinSpace(3, 3)
    rng = np.random.default_rng(5)
    for _ in range(5):
        _, rho = aligned_random(sp, rng)
        for i in range(1, 4):
            assert align(sp, rho, i).reduced.shape == (9, 9)


def test_equivalence_criteria_agree():
    sp = KinSpace(2, 2)
    rng = np.random.default_rng(6)
    sigma, rho = aligned_random(sp, rng)
    _, rho2 = aligned_random(sp, rng)
    rho_same = random_assignment(sp, rng).apply(aligned_product(sp, 1, 0, sigma))
    assert observationally_equivalent(sp, rho, rho_same)
    assert np.abs(align(sp, rho).reduced - align(sp, rho_same).reduced).max() < 1e-10
    assert not observationally_equivalent(sp, rho, rho2)


def test_qrf_transform_two_particles_is_inversion():
    n = 5
    V = qrf_transform_aligned(KinSpace(n, 2), 1, 2)
    P = np.zeros((n, n))
    for g in range(n):
        P[(-g) % n, g] = 1
    assert np.array_equal(V, P)
    with pytest.raises(ValueError):
        qrf_transform_aligned(KinSpace(n, 2), 1, 1)


@pytest.mark.parametrize("n,N", [(2, 3), (3, 3), (4, 3), (3, 4)])
def test_qrf_transform_properties(n, N):
    sp = KinSpace(n, N)
    rng = np.random.default_rng(7)
    _, rho = aligned_random(sp, rng)
    for i, j in itertools.permutations(range(1, N + 1), 2):
        V = qrf_transform_aligned(sp, i, j)
        assert np.abs(V @ V.conj().T - np.eye(V.shape[0])).max() < 1e-12
        assert np.abs(V @ qrf_transform_aligned(sp, j, i) - np.eye(V.shape[0])).max() < 1e-12
        assert np.abs(V - frame_change(sp, i, j)).max() < 1e-10
        if N == 3:
            assert np.abs(V - oracles.frame_change(n, N, i, j, 0, 0)).max() < 1e-12
        si, sj = align(sp, rho, i).reduced, align(sp, rho, j).reduced
        assert np.abs(V @ si @ V.conj().T - sj).max() < 1e-10


def test_translated_pair_frames():
    n = 6
    sp, psi, psi_prime, _ = translated_pair(n)
    from_c = align(sp, psi_prime, 3).reduced
    from_a = align(sp, psi, 1).reduced
    V31 = qrf_transform_aligned(sp, 3, 1)
    V13 = qrf_transform_aligned(sp, 1, 3)
    assert np.abs(V31 @ from_c - from_a).max() < 1e-12
    pair = KinSpace(n, 2)
    bc = superposition(pair, [(1, 2), (1, 3)])
    ab = superposition(pair, [(-2 % n, -1 % n), (-3 % n, -2 % n)])
    assert np.abs(from_a - bc).max() < 1e-12
    assert np.abs(V13 @ bc - ab).max() < 1e-12


def test_center_of_mass_examples():
    sp = KinSpace(4, 2)
    assert center_of_mass_assignment(sp, [1, 1]).table[2] == 3
    assert center_of_mass_assignment(sp, [1, 0]) == SymmetryAssignment.identity(sp)
    sp3 = KinSpace(5, 3)
    a = center_of_mass_assignment(sp3, [1, 1, 1])
    for h1 in range(5):
        assert a.table[sp3.relation_index([h1, h1])] == (-((h1 * 2) // 3)) % 5
    with pytest.raises(ValueError):
        center_of_mass_assignment(sp, [0, 0])
    with pytest.raises(ValueError):
        center_of_mass_assignment(sp, [1, -1])
    with pytest.raises(GroupMismatchError):
        center_of_mass_assignment(KinSpace([2, 2], 2), [1, 1])


def test_alignment_result_serializes():
    sp, psi, _, _ = translated_pair(4)
    d = align(sp, psi, 1).to_dict()
    assert d["frame"] == 1 and d["orientation"] == [0] and d["reduced"]["basis"] == "CONFIG"
