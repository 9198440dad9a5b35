import pytest
from hypothesis import given, settings

from strategies import filtered
from taufilt.filtration import filtered_sphere
from taufilt.sseq import INF, SpectralSequence
from taufilt.taubss import (
    BSSError,
    bss_compare_to_sseq,
    build_bss,
    build_truncated_bss,
    reindex_tri,
    truncated_checks,
    truncation_map,
)


def test_sphere_e1_is_polynomial():
    b = build_bss(filtered_sphere(0, 0))
    p = b.page(1)
    assert p.nonzero_cells() == [(0, -2, 2), (0, -1, 1), (0, 0, 0)]
    assert all(p.groups[c].orders == (0,) for c in p.nonzero_cells())
    # τ̄ carries τ̄^s to τ̄^{s+1}
    assert b.tbar(1, 0, 0, 0).is_iso()
    assert b.tbar_power(1, 2, 0, 0, 0).is_iso()
    assert not p.nonzero_diffs()


def test_sphere_truncated():
    t = build_truncated_bss(filtered_sphere(0, 0), 2)
    assert t.page(1).nonzero_cells() == [(0, -1, 1), (0, 0, 0)]
    t1 = build_truncated_bss(filtered_sphere(0, 0), 1)
    assert t1.page(1).nonzero_cells() == [(0, 0, 0)]
    with pytest.raises(BSSError):
        build_truncated_bss(filtered_sphere(0, 0), 0)


def test_second_page_indexing():
    p = reindex_tri(build_bss(filtered_sphere(0, 0)).page(1))
    assert p.r == 2
    assert p.nonzero_cells() == [(0, -2, 0), (0, -1, 0), (0, 0, 0)]


def test_truncation_map_errors():
    X = filtered_sphere(0, 0)
    with pytest.raises(BSSError):
        truncation_map(X, 1, 2)
    with pytest.raises(BSSError):
        truncation_map(X, None, 0)


def test_truncation_to_itself_is_identity(moore):
    phi = truncation_map(moore, 2, 2)
    for n, w, s in phi.tgt.cells():
        assert phi.on_page(1, n, w, s).is_iso()


def test_moore_bss(moore):
    b = build_bss(moore)
    ss = SpectralSequence(moore)
    # filtration-0 row of the τ-BSS is the underlying spectral sequence
    for w in range(0, 3):
        assert b.group(1, 0, w, 0).orders == ss.e1(0, w).orders
    rep = bss_compare_to_sseq(moore)
    assert rep.ok, rep.failures


@pytest.mark.parametrize("k", [1, 2, 3])
def test_moore_truncated(moore, k):
    rep = truncated_checks(moore, k)
    assert rep.ok, rep.failures


def test_moore_truncated_abutment(moore):
    # E_inf of the 2-truncated BSS in weight w sums to H(X/τ^2)^w = Z/4 in degrees 0 and 1
    t = build_truncated_bss(moore, 2)
    for w in range(0, 3):
        order = 1
        for n in (0, 1):
            for s in t.filtrations(w):
                order *= t.group(INF, n, w, s).order()
        assert order == 16


def test_corpus_bss(small_corpus):
    for X in small_corpus[:8]:
        rep = bss_compare_to_sseq(X)
        assert rep.ok, rep.failures
        rep = truncated_checks(X, 2)
        assert rep.ok, rep.failures


@settings(max_examples=15)
@given(filtered())
def test_bss_comparison(X):
    assert bss_compare_to_sseq(X).ok
