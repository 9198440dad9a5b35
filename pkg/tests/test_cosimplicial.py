from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from taufilt.exactalg import GF, ZZ, Matrix
from taufilt.cosimplicial import (
    CobarBoundsError,
    CosimplicialData,
    CosimplicialError,
    cobar,
    cochains,
    constant,
    double_complex,
    exterior_hopf,
    group_nerve,
    kan_comparison_is_iso,
    kan_extend,
    kan_rank,
    nerve_cochains,
    normalization_is_quasi_iso,
    one_level,
    random_cosimplicial_complex,
    random_cosimplicial_group,
    staircase,
    surjections,
    tot_filtration,
    trivial_hopf,
    valid_cohomology,
    verify_decalage,
    verify_tot,
)
from taufilt.sseq import SpectralSequence


def cohomology(A, s):
    return cochains(A).homology(-s)


def test_constant_group():
    A = constant(ZZ, 2, 3)
    assert cohomology(A, 0).orders == (0, 0)
    for s in range(1, 3):
        assert cohomology(A, s).is_trivial()
    assert normalization_is_quasi_iso(A)


def test_cohomology_of_cyclic_groups():
    A = nerve_cochains(group_nerve(2), 4, ZZ)
    got = [cohomology(A, s).orders for s in valid_cohomology(A)]
    assert got == [(0,), (), (2,), ()]
    B = nerve_cochains(group_nerve(3), 4, GF(3))
    assert [cohomology(B, s).ngens for s in valid_cohomology(B)] == [1, 1, 1, 1]


def test_surjection_count():
    for n in range(5):
        for k in range(n + 1):
            assert len(surjections(n, k)) == comb(n, k)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_kan_extension_ranks(k):
    A = one_level(ZZ, k, 2, 3)
    J = kan_extend(A)
    assert J.is_cosimplicial
    for n in range(4):
        assert J.rank(n, 0) == kan_rank(A, n) == comb(n, k) * 2
    assert kan_comparison_is_iso(A, J)


def test_semicosimplicial_data_has_no_codegeneracies():
    with pytest.raises(CosimplicialError):
        one_level(ZZ, 1, 1, 2).s(0, 0)


def test_bad_identities_are_rejected():
    # s^0 d^1 = id fails when d^1 = 2
    cof = {(1, 0): Matrix([[1]]), (1, 1): Matrix([[2]])}
    codeg = {(0, 0): Matrix([[1]])}
    with pytest.raises(CosimplicialError):
        CosimplicialData.from_groups(ZZ, [1, 1], cof, codeg)


def test_staircase_differential():
    cols, deltas = staircase(ZZ, 2, 0, 2, 3, 0, 2)
    T = tot_filtration(kan_extend(double_complex(cols, deltas)))
    ss = SpectralSequence(T.filtered)
    assert not ss.page(1).nonzero_diffs()
    p2 = ss.page(2)
    [key] = p2.nonzero_diffs()
    assert abs(p2.diffs[key].matrix.rows[0][0]) == 2
    assert ss.page(3).groups[(-1, 2)].orders == (2,)
    with pytest.raises(CosimplicialError):
        staircase(ZZ, 0, 0, 1, 3, 0, 1)


def test_tot_one_row():
    T = tot_filtration(constant(ZZ, 1, 3))
    assert T.exact_through(1) == 3
    ss = SpectralSequence(T.filtered)
    assert ss.e_infinity(0, 0).orders == (0,)


@settings(max_examples=12)
@given(st.integers(0, 10_000))
def test_random_groups(seed):
    A = random_cosimplicial_group(seed)
    assert normalization_is_quasi_iso(A)
    assert verify_tot(A).passed
    assert verify_decalage(A).passed


@settings(max_examples=4)
@given(st.integers(0, 10_000))
def test_random_complexes(seed):
    A = random_cosimplicial_complex(seed)
    assert verify_tot(A).passed
    assert verify_decalage(A).passed


def test_cobar_exterior():
    r = cobar(exterior_hopf(2, 1), None, 5, 5)
    assert r.agrees
    assert r.table.nonzero() == [(s, s) for s in range(6)]
    assert all(r.table.dim(s, s) == 1 for s in range(6))


def test_cobar_odd_prime_and_degree():
    assert cobar(exterior_hopf(3, 1), None, 4, 6).table.nonzero() == [(s, s) for s in range(5)]
    assert cobar(exterior_hopf(2, 3), None, 3, 9).table.nonzero() == [(s, 3 * s) for s in range(4)]


def test_cobar_trivial():
    r = cobar(trivial_hopf(2), None, 4, 4)
    assert r.agrees and r.table.nonzero() == [(0, 0)]


def test_cobar_refuses_non_hopf_and_bounds():
    with pytest.raises(CosimplicialError):
        cobar(exterior_hopf(3, 2), None, 2, 4)
    with pytest.raises(CobarBoundsError):
        cobar(exterior_hopf(2, 1), None, 13, 8)
