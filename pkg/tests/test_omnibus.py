import copy
import json

import pytest
from hypothesis import given, settings

from strategies import filtered
from taufilt.exactalg import ZZ
from taufilt.complexes import ChainComplex, ChainMap
from taufilt.filtration import CONSTANT, FilteredComplex, filtered_sphere
from taufilt.omnibus import (
    replay_omnibus,
    torsion_free_iff_no_incoming,
    total_diff_table,
    verify_omnibus,
    verify_truncated_omnibus,
)
from taufilt.randomgen import RandomParams, corpus, random_filtered_complex
from taufilt.sseq import PreconditionError, SpectralSequence


def test_sphere():
    rep = verify_omnibus(filtered_sphere(0, 0))
    assert rep.passed
    [rec] = rep.records
    assert rec.permanent and rec.lift is not None
    assert rec.checks == {"1": True, "2a": True, "2b": True, "3b": True}


def test_incomplete_is_refused():
    c = ChainComplex.single(ZZ, 0)
    X = FilteredComplex([c, c], [ChainMap.identity(c)], 0, CONSTANT, CONSTANT)
    with pytest.raises(PreconditionError):
        verify_omnibus(X)


def test_moore_torsion_clause(moore):
    rep = verify_omnibus(moore)
    assert rep.passed, rep.failures
    by_cell = {(r.n, r.s): r for r in rep.records if r.x == (1,)}
    # classes in filtration 2..5 are hit by d_2: τ^2 kills their lifts
    for s in range(2, 6):
        rec = by_cell[(0, s)]
        assert rec.survival == 2 and rec.checks["3a"]
        assert rec.witnesses["3a"]["r"] == 2
    for s in (0, 1):
        assert by_cell[(0, s)].checks["3b"]
    for rec in rep.records:
        if rec.n == 1:
            assert rec.lift is None and not rec.permanent


def test_moore_torsion_corollary(moore):
    cor = torsion_free_iff_no_incoming(moore)
    assert cor[0]["torsion_free"] is False and cor[0]["incoming"]
    assert cor[1]["torsion_free"] is True and not cor[1]["incoming"]
    assert all(v["holds"] for v in cor.values())


def test_replay_round_trip(moore):
    data = json.loads(json.dumps(verify_omnibus(moore).as_dict()))
    assert replay_omnibus(moore, data) == []


def test_replay_detects_tampering(moore):
    data = json.loads(json.dumps(verify_omnibus(moore).as_dict()))
    bad = copy.deepcopy(data)
    rec = next(r for r in bad["records"] if r["lift"] is not None)
    rec["witnesses"]["lift_boundary"] = [v + 1 for v in rec["witnesses"]["lift_boundary"]] or [1]
    assert replay_omnibus(moore, bad)
    bad = copy.deepcopy(data)
    rec = next(r for r in bad["records"] if "3a" in r["witnesses"])
    rec["witnesses"]["3a"]["tau_boundary"] = None
    assert replay_omnibus(moore, bad)
    bad = copy.deepcopy(data)
    rec = next(r for r in bad["records"] if r["lift"] is None)
    rec["lift"] = None
    rec["x"] = [1]
    rec["n"], rec["s"] = 0, 0
    assert replay_omnibus(moore, bad)
    assert replay_omnibus(moore, {**data, "kind": "truncated"})


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_moore_truncated(moore, k):
    rep = verify_truncated_omnibus(moore, k)
    assert rep.passed, rep.failures
    assert rep.kind == "truncated" and rep.k == k


def test_truncated_rejects_bad_k(moore):
    with pytest.raises(ValueError):
        verify_truncated_omnibus(moore, 0)


def test_moore_total_differentials(moore):
    rep = total_diff_table(moore, 3, 3)
    assert rep.passed, rep.failures
    assert rep.rows


def test_corpus(small_corpus):
    for X in small_corpus[:10]:
        ss = SpectralSequence(X)
        rep = verify_omnibus(X, ss)
        assert rep.passed, rep.failures
        assert replay_omnibus(X, json.loads(json.dumps(rep.as_dict()))) == []
        assert verify_truncated_omnibus(X, 2, ss).passed
        assert all(v["holds"] for v in torsion_free_iff_no_incoming(X, ss).values())


@settings(max_examples=15)
@given(filtered())
def test_omnibus_random(X):
    if X.is_complete():
        assert verify_omnibus(X).passed


def test_generator_is_deterministic():
    a = random_filtered_complex(17)
    b = random_filtered_complex(17)
    assert a.s_min == b.s_min and a.s_max == b.s_max
    for s in range(a.s_min, a.s_max + 1):
        la, lb = a.level(s), b.level(s)
        assert la.lo == lb.lo and la.ranks == lb.ranks
        assert all(la.d(n) == lb.d(n) for n in la.degrees)
    assert [X.s_max for X in corpus(10)] == [X.s_max for X in corpus(10)]


def test_generator_draws_are_valid():
    # construction re-checks d^2 = 0 and that transitions are chain maps
    P = RandomParams(max_levels=6, max_span=5, max_rank=4)
    for seed in range(300):
        X = random_filtered_complex(seed, P)
        assert X.s_max - X.s_min + 1 <= 6
        assert all(X.level(s).rank(n) <= 4 for s in range(X.s_min, X.s_max + 1) for n in X.degrees)
