import pytest
from hypothesis import given

from oracles import compare_with_engine, group_invariants, homology_invariants
from strategies import filtered
from taufilt.exactalg import ZZ
from taufilt.filtration import filtered_sphere, zero_filtered
from taufilt.sseq import (
    INF,
    ExactCouple,
    PreconditionError,
    SpectralSequence,
    SpectralSequenceError,
    comparison_and_convergence,
    reindex_second_page,
)


def test_sphere_pages():
    ss = SpectralSequence(filtered_sphere(0, 2))
    for r in (1, 2, INF):
        p = ss.page(r)
        assert p.nonzero_cells() == [(0, 2)]
        assert p.groups[(0, 2)].orders == (0,)
        assert not p.nonzero_diffs()


def test_sphere_reindexing():
    ss = SpectralSequence(filtered_sphere(3, 0))
    q = reindex_second_page(ss.page(1))
    assert q.r == 2 and q.nonzero_cells() == [(3, -3)]
    assert reindex_second_page(q, inverse=True).nonzero_cells() == [(3, 0)]
    with pytest.raises(SpectralSequenceError):
        reindex_second_page(q)


def test_zero_couple():
    X = zero_filtered(ZZ, 0, 2)
    C = ExactCouple(X)
    assert not C.exactness_failures()
    ss = SpectralSequence(X)
    assert not ss.page(1).nonzero_cells()


def test_page_index_errors():
    ss = SpectralSequence(filtered_sphere(0, 0))
    with pytest.raises(SpectralSequenceError):
        ss.page(0)


def test_moore_pages(moore):
    ss = SpectralSequence(moore)
    e1 = ss.page(1)
    for s in range(0, 6):
        assert e1.groups[(0, s)].orders == (2,)
        assert e1.groups[(1, s)].orders == (2,)
    e2 = ss.page(2)
    # the mod-2 Bockstein family: (1, s) -> (0, s + 2) inside the adequacy window
    for s in range(0, 3):
        assert (1, s) in e2.nonzero_diffs()
        assert e2.target(1, s) == (0, s + 2)
        assert not e2.diffs[(1, s)].is_zero()
    for r in range(3, ss.r_infinity + 1):
        assert not ss.page(r).nonzero_diffs()
    einf = ss.page(INF)
    assert einf.nonzero_cells() == [(0, 0), (0, 1)]
    assert all(einf.groups[k].orders == (2,) for k in einf.nonzero_cells())


def test_moore_re_infinity(moore):
    ss = SpectralSequence(moore)
    G, r0 = ss.re_infinity(1, 0)
    assert G.is_trivial() and r0 == 2
    G, r0 = ss.re_infinity(0, 2)
    assert G.is_trivial() and r0 == 1


def test_moore_detection(moore):
    ss = SpectralSequence(moore)
    E = ss.e_infinity(0, 0)
    W = ss.colimit_hom(0, 0).tgt
    x = E.generators[0]
    # the generator of H_0 = Z/4 is detected in filtration 0, twice it in filtration 1
    assert ss.detects(0, 0, x, W.generators[0]) is not None
    assert ss.detects(0, 0, x, tuple(2 * v for v in W.generators[0])) is None
    x1 = ss.e_infinity(0, 1).generators[0]
    assert ss.detects(0, 1, x1, tuple(2 * v for v in W.generators[0])) is not None
    with pytest.raises(PreconditionError):
        ss.detects(0, 3, ss.e1(0, 3).generators[0], W.generators[0])


def test_moore_convergence(moore):
    rep = comparison_and_convergence(moore)
    d = rep.as_dict()
    for key in ("comparison_injective", "conditionally_convergent", "derived_complete_filtration",
                "strongly_convergent", "boardman_consistent", "vanishing_implies_strong"):
        assert d[key] is True
    assert all(d["comparison_iso"].values())


def test_moore_against_oracle(moore):
    assert compare_with_engine(moore, SpectralSequence(moore)) == []


def test_corpus_against_oracle(small_corpus):
    for X in small_corpus[:15]:
        assert compare_with_engine(X, SpectralSequence(X)) == []


@given(filtered())
def test_exact_couple_is_exact(X):
    assert ExactCouple(X).exactness_failures() == []


@given(filtered())
def test_e1_is_gr_homology(X):
    ss = SpectralSequence(X)
    for n, s in ss.cells():
        assert group_invariants(ss.e1(n, s)) == homology_invariants(X.gr(s), n)


@given(filtered())
def test_page_laws(X):
    ss = SpectralSequence(X)
    for r in range(1, ss.r_infinity):
        p = ss.page(r)
        assert p.bidegree == (-1, r)
        for n, s in ss.cells():
            assert ss.d_squared_zero(r, n, s)
            assert ss.page_homology_holds(r, n, s)
            assert ss.boundary_formula_holds(r, n, s)


@given(filtered())
def test_pages_stabilise(X):
    ss = SpectralSequence(X)
    R = ss.r_infinity
    for n, s in ss.cells():
        a, b = ss.group(R, n, s), ss.group(R + 3, n, s)
        assert a.orders == b.orders
        assert ss.differential(R, n, s).is_zero()


@given(filtered())
def test_reindex_round_trip(X):
    p = SpectralSequence(X).page(2)
    q = reindex_second_page(reindex_second_page(p), inverse=True)
    assert q.r == p.r and q.bidegree == p.bidegree
    assert sorted(q.groups) == sorted(p.groups)
    assert q.nonzero_diffs() == p.nonzero_diffs()


@given(filtered())
def test_convergence_consistency(X):
    rep = comparison_and_convergence(X)
    assert rep.comparison_injective
    assert rep.boardman_consistent and rep.vanishing_implies_strong
    if rep.strongly_convergent:
        assert rep.derived_complete_filtration
