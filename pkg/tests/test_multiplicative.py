import pytest

import taufilt.multiplicative as mult
from taufilt.exactalg import GF, ZZ
from taufilt.multiplicative import (
    FilteredDGA,
    FilteredRingError,
    HypothesisError,
    exterior_z_dga,
    hidden_extension_derive,
    koszul_dga,
    leibniz_check,
    padic_dga,
    zero_dga,
)


def unit(R, name):
    i = [b for b, _ in R.basis].index(name)
    q = R.basis[i][1]
    return tuple(int(j == R.pos[i]) for j in range(R.rank(q)))


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_koszul_leibniz(k, n):
    v = leibniz_check(koszul_dga(k), n)
    assert v.holds, v.failures
    assert v.pairs > 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_signed_leibniz_over_z(n):
    v = leibniz_check(exterior_z_dga(), n)
    assert v.holds, v.failures


def test_wrong_sign_is_caught(monkeypatch):
    monkeypatch.setattr(mult, "_sign", lambda q: 1)
    v = leibniz_check(exterior_z_dga(), 1)
    assert not v.derivation and not v.linear


@pytest.mark.parametrize("R", [padic_dga(2), padic_dga(3), zero_dga(), koszul_dga(2, jump=True)])
def test_other_fixtures(R):
    assert leibniz_check(R, 1).holds
    assert leibniz_check(R, 2).holds


def test_leibniz_needs_positive_n():
    with pytest.raises(FilteredRingError):
        leibniz_check(koszul_dga(1), 0)


def test_axioms_are_enforced():
    # x in filtration 1 but x^2 in filtration 1 too: not multiplicative
    basis = [("1", 0), ("x", 0), ("x2", 0)]
    filt = {0: 0, 1: 1, 2: 1}

    def m(i, j):
        k = i + j
        return {k: 1} if k <= 2 else {}

    R = mult.monomial_dga(ZZ, basis, filt, {}, m, "bad")
    assert not R.check_axioms()["multiplicative"]
    with pytest.raises(FilteredRingError):
        leibniz_check(R, 1)


def _extension(R):
    return hidden_extension_derive(R, (1, 1, unit(R, "x^0y")), (2, 1, unit(R, "x^1y")), (1, 0, unit(R, "x^1")))


def test_plain_extension():
    rel = _extension(koszul_dga(2))
    assert rel.divisibility == (0, 0) and not rel.hidden
    assert all(rel.verified.values())


def test_hidden_extension_from_jump():
    rel = _extension(koszul_dga(2, jump=True))
    assert rel.divisibility == (0, 1) and rel.hidden
    assert all(rel.verified.values())


def test_extension_hypotheses():
    R = koszul_dga(1)
    with pytest.raises(HypothesisError):
        _extension(R)
    R = koszul_dga(2)
    with pytest.raises(HypothesisError):
        hidden_extension_derive(R, (1, 1, unit(R, "x^0y")), (3, 1, unit(R, "x^1y")), (1, 0, unit(R, "x^1")))


def test_zero_differential_extension():
    R = padic_dga(2)
    rel = hidden_extension_derive(R, (0, 0, (1,)), (1, 0, (2,)), (1, 0, (2,)))
    assert rel.relation == "0 = 0" and not rel.hidden


def test_field_and_integer_rings():
    assert koszul_dga(2).ring == GF(2)
    assert koszul_dga(2, ring=GF(3)).check_axioms()["leibniz"]
    assert isinstance(padic_dga(2), FilteredDGA)
