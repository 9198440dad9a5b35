import warnings

import pytest
from hypothesis import given

from oracles import group_invariants, homology_invariants
from strategies import complexes, filtered
from taufilt.complexes import ChainComplex, ChainMap, mapping_cone
from taufilt.exactalg import ZZ, Matrix
from taufilt.filtration import (
    CONSTANT,
    ZERO,
    AdequacyWarning,
    FilteredComplex,
    FiltrationError,
    adequacy_bound,
    adic_filtration_complex,
    associated_graded,
    colimit_complex,
    completion,
    constant_filtration,
    fib_graded,
    filtered_sphere,
    from_complexes,
    gr_to_fibgr_of_tower,
    limit_complex,
    mod_tau_k,
    moore_complex,
    reflect,
    roundtrip_filtration_map,
    total_differential,
    whitehead_postnikov,
    zero_filtered,
)
from taufilt.randomgen import RandomParams, random_filtered_complex
from taufilt.sseq import SpectralSequence


def test_sphere_flags():
    X = filtered_sphere(0, 0)
    f = X.flags()
    assert f["right_concentrated"] and f["left_concentrated"]
    assert f["complete"] and not f["cocomplete"]


def test_zero_levels_are_complete_and_cocomplete():
    X = FilteredComplex([ChainComplex.zero(ZZ, 0, 1)] * 3, [ChainMap.identity(ChainComplex.zero(ZZ, 0, 1))] * 2)
    assert X.is_complete() and X.is_cocomplete()


def test_window_mismatch_is_named():
    a = ChainComplex.single(ZZ, 0)
    b = ChainComplex.single(ZZ, 1)
    with pytest.raises(FiltrationError, match="degree window mismatch"):
        FilteredComplex([a, b], [ChainMap.zero(b, a)])


def test_non_chain_transition_is_rejected():
    m = moore_complex(2, 1)
    with pytest.raises(Exception, match="commute"):
        from_complexes([m, m], [{0: Matrix([[1]]), 1: Matrix([[0]])}])


def test_constant_filtration_has_acyclic_gr():
    X = constant_filtration(moore_complex(3, 1), 0, 3)
    for s in range(-2, 5):
        assert associated_graded(X, s).is_acyclic()
        assert fib_graded(X, s).is_acyclic()


def test_sphere_gr():
    X = filtered_sphere(0, 0)
    for s in range(-2, 3):
        g = associated_graded(X, s)
        for n in range(-1, 3):
            want = (0,) if (n, s) == (0, 0) else ()
            assert g.homology(n).orders == want


def test_moore_gr_is_fp_in_two_degrees(moore):
    for s in range(0, 6):
        g = associated_graded(moore, s)
        assert homology_invariants(g, 0) == (0, [2])
        assert homology_invariants(g, 1) == (0, [2])


def test_zero_filtration():
    Z = zero_filtered(ZZ, 0, 1)
    assert fib_graded(Z, 0).is_acyclic()
    assert reflect(Z, "tower").level(0).is_acyclic()


@given(filtered())
def test_gr_triangle_is_exact(X):
    from taufilt.sseq import ExactCouple

    assert ExactCouple(X).exactness_failures() == []


def test_mod_tau_k_needs_positive_k(moore):
    with pytest.raises(FiltrationError):
        mod_tau_k(moore, 0)


def test_mod_tau_on_constant_filtration_is_acyclic():
    X = constant_filtration(moore_complex(2, 1), 0, 2)
    for s in range(-1, 3):
        assert mod_tau_k(X, 2).level(s).is_acyclic()


def test_sphere_mod_tau_is_gr():
    X = filtered_sphere(0, 0)
    for s in range(-2, 2):
        assert mod_tau_k(X, 1).level(s).homology(0).orders == X.gr(s).homology(0).orders


def test_moore_mod_tau_squared(moore):
    # level s of X/τ^2 is the cone of ×4 on Z --4--> Z
    M = mod_tau_k(moore, 2)
    for s in range(0, 5):
        c = M.level(s)
        assert homology_invariants(c, 0) == (0, [4])
        assert homology_invariants(c, 1) == (0, [4])
        assert group_invariants(c.homology(0)) == (0, [4])


def test_quotient_model_matches_cone_for_strict_filtrations():
    c = ChainComplex(ZZ, 0, [2, 2], {1: Matrix([[2, 0], [0, 3]])})
    # strict: a split injection X^1 = span(e1) -> X^0
    sub = ChainComplex(ZZ, 0, [1, 1], {1: Matrix([[2]])})
    t = ChainMap(sub, c, {0: Matrix([[1], [0]]), 1: Matrix([[1], [0]])})
    X = FilteredComplex([c, sub], [t])
    assert X.is_strict()
    Q, q = mod_tau_k(X, 1).quotient_model(0)
    assert q.is_quasi_iso()
    assert Q.homology(0).orders == (3,)


def test_reduction_and_tau_power_maps(moore):
    M3 = mod_tau_k(moore, 3)
    red = M3.reduction(1, 0)
    assert red.src is M3.level(0)
    tp = M3.tau_power(1, 0)
    assert tp.tgt is M3.level(0)
    with pytest.raises(FiltrationError):
        M3.tau_power(3, 0)


def test_colimit_and_limit_profiles():
    c = moore_complex(2, 1)
    X = constant_filtration(c, 0, 2)
    assert colimit_complex(X).same_as(c)
    assert limit_complex(X).same_as(c)
    S = filtered_sphere(0, 0)
    assert limit_complex(S).is_acyclic() and S.is_complete()


def test_completion_of_constant_z_is_acyclic():
    X = constant_filtration(ChainComplex.single(ZZ, 0), 0, 2)
    C, f = completion(X)
    assert C.is_complete()
    for s in range(-1, 3):
        assert C.level(s).is_acyclic()


@given(filtered())
def test_completion_is_complete_and_a_gr_iso(X):
    C, f = completion(X)
    assert C.is_complete()
    assert f.is_gr_quasi_iso()


def test_completion_of_complete_is_unchanged(moore):
    C, f = completion(moore)
    assert f.is_levelwise_quasi_iso()


@given(filtered())
def test_tower_reflection(X):
    T = reflect(X, "tower")
    assert T.is_cocomplete()
    for s in range(X.s_min - 1, X.s_max + 1):
        assert gr_to_fibgr_of_tower(X, s).is_quasi_iso()


@given(filtered())
def test_complete_round_trip(X):
    # zero-above inputs are complete; tower then filtration gives X back
    Y = reflect(reflect(X, "tower"), "filtration")
    for s in X.window:
        assert roundtrip_filtration_map(X, s).is_quasi_iso()
    assert Y.is_complete()


def test_whitehead_tower_is_postnikov():
    c = ChainComplex(ZZ, 0, [1, 2, 1], {1: Matrix([[2, 0]]), 2: Matrix([[0], [3]])})
    W = whitehead_postnikov(c, "whitehead")
    P = whitehead_postnikov(c, "postnikov")
    T = reflect(W, "tower")
    for s in range(c.lo - 1, c.hi + 1):
        for n in c.degrees:
            assert T.level(s).homology(n).orders == P.level(s).homology(n).orders


@given(complexes())
def test_whitehead_gr_is_homology_in_one_degree(c):
    W = whitehead_postnikov(c, "whitehead")
    for s in c.degrees:
        g = W.gr(s)
        for n in range(c.lo, c.hi + 2):
            want = c.homology(s).orders if n == s else ()
            assert g.homology(n).orders == want


def test_whitehead_of_degree_zero_homology():
    W = whitehead_postnikov(ChainComplex.single(ZZ, 0), "whitehead")
    assert W.level(-3).homology(0).orders == (0,)
    assert W.level(1).is_acyclic()


def test_postnikov_of_acyclic_is_zero():
    c = mapping_cone(ChainMap.identity(ChainComplex.single(ZZ, 0))).complex
    P = whitehead_postnikov(c, "postnikov")
    assert all(P.level(s).is_acyclic() for s in range(P.s_min, P.s_max + 1))


def test_total_differential_of_sphere_is_zero():
    X = filtered_sphere(0, 0)
    D = total_differential(X, 1)
    for s in range(-1, 2):
        for q in range(-1, 2):
            assert D.at(s, q).is_zero()


def test_total_differential_on_moore(moore):
    # ∂_1^∞ of the degree-1 class of X/τ at s is τ^{k-1} = τ times the generator of H_0(X^{s+1})
    D = total_differential(moore, 1)
    for s in range(0, 4):
        h = D.at(s, 1)
        assert h.src.orders == (2,)
        assert h.tgt.orders == (4,)
        assert h.matrix.rows in (((2,),), ((-2,),))


def test_total_differential_indices():
    X = filtered_sphere(0, 0)
    with pytest.raises(FiltrationError):
        total_differential(X, 0)
    with pytest.raises(FiltrationError):
        total_differential(X, 3, 2)


@given(filtered())
def test_tau_relation_of_total_differentials(X):
    from taufilt.exactalg import Hom

    for s in X.e1_range:
        for q in X.gr_degrees:
            D2 = total_differential(X, 2).at(s, q)
            D1 = total_differential(X, 1).at(s, q)
            red = Hom.from_ambient(D2.src, D1.src, mod_tau_k(X, 2).reduction(1, s).f(q))
            tau = X.composite(s + 2, s + 1).induced(q - 1)
            lhs, rhs = tau.compose(D2), D1.compose(red)
            T = rhs.tgt
            for i in range(D2.src.ngens):
                e = tuple(int(i == j) for j in range(D2.src.ngens))
                assert T.equal(T.lift(lhs.apply(e)), T.lift(rhs.apply(e)))


def test_adic_filtration():
    c = moore_complex(3, 1)
    X = adic_filtration_complex(c, 1, 3)
    assert all(X.transition(s).equals(ChainMap.identity(c)) for s in range(1, 4))
    with pytest.raises(FiltrationError):
        adic_filtration_complex(c, 0, 3)
    acyc = mapping_cone(ChainMap.identity(ChainComplex.single(ZZ, 0))).complex
    assert all(adic_filtration_complex(acyc, 3, 2).level(s).is_acyclic() for s in range(3))


def test_adequacy_warning():
    c = moore_complex(2, 3)
    assert adequacy_bound(c, 2, 6) == 3
    with pytest.warns(AdequacyWarning):
        adic_filtration_complex(c, 2, 2)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        adic_filtration_complex(c, 2, 3)


def test_e1_is_gr_homology(small_corpus):
    for X in small_corpus[:10]:
        ss = SpectralSequence(X)
        for n, s in ss.cells():
            assert ss.group(1, n, s).orders == associated_graded(X, s).homology(n).orders


def test_random_generator_is_deterministic():
    a, b = random_filtered_complex(7), random_filtered_complex(7)
    assert a.window == b.window
    assert all(a.level(s).same_as(b.level(s)) for s in a.window)
    Z = random_filtered_complex(3, RandomParams(max_rank=0))
    assert all(Z.level(s).is_acyclic() for s in Z.window)


def test_profiles_extend_levels(moore):
    assert moore.level(-5) is moore.level(0)
    assert moore.level(9).is_acyclic()
    assert moore.below == CONSTANT and moore.above == ZERO
