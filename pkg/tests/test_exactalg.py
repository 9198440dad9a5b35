from hypothesis import given
from hypothesis import strategies as st

from oracles import Lat, cokernel_invariants, invariant_factors, rank_q
from taufilt.exactalg import (
    GF,
    ZZ,
    AlgebraError,
    Hom,
    Matrix,
    Subquotient,
    cokernel,
    image_basis,
    kernel_basis,
    rank,
    smith,
    smith_normal_form,
    solve,
    span_eq,
    subquotient,
)

import pytest


def int_matrices(max_rows=4, max_cols=4, bound=6):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(st.integers(-bound, bound), min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def test_diag_2_3_has_smith_form_1_6():
    U, D, V = smith_normal_form(Matrix([[2, 0], [0, 3]]))
    assert D.rows == ((1, 0), (0, 6))
    assert (U @ Matrix([[2, 0], [0, 3]]) @ V).rows == D.rows


def test_solve_diag():
    assert solve(Matrix([[2, 0], [0, 3]]), (2, 0)) == (1, 0)
    assert solve(Matrix([[2, 0], [0, 3]]), (1, 0)) is None


def test_cokernel_of_diag_2_0():
    G = cokernel(Matrix([[2, 0], [0, 0]]))
    assert sorted(G.orders) == [0, 2]
    assert G.describe() in ("Z/2 + Z", "Z + Z/2")


def test_subquotient_2_mod_4():
    G = Subquotient(ZZ, 1, [(2,)], [(4,)])
    assert G.orders == (2,)
    assert G.is_zero((4,)) and not G.is_zero((2,))


def test_quotient_must_lie_in_sub():
    with pytest.raises(AlgebraError):
        Subquotient(ZZ, 1, [(2,)], [(3,)])


def test_ragged_matrix_rejected():
    with pytest.raises(AlgebraError):
        Matrix([[1, 2], [3]])


def test_field_elimination():
    F = GF(3)
    m = Matrix([[1, 2], [2, 1]])
    assert rank(m, F) == 1
    assert rank(m, ZZ) == 2
    assert len(kernel_basis(m, F)) == 1


@given(int_matrices())
def test_smith_matches_determinantal_divisors(rows):
    m = Matrix(rows)
    S = smith(m)
    assert [abs(d) for d in S.diag] == [abs(d) for d in invariant_factors(rows)]
    assert (S.U @ m @ S.V).rows == S.D.rows
    assert (S.U @ S.Uinv).rows == Matrix.identity(m.nrows).rows
    assert (S.V @ S.Vinv).rows == Matrix.identity(m.ncols).rows


@given(int_matrices())
def test_cokernel_invariants_match_oracle(rows):
    m = Matrix(rows)
    G = cokernel(m)
    free, tors = cokernel_invariants(rows, m.nrows)
    assert G.free_rank == free
    assert sorted(G.torsion) == tors


@given(int_matrices(), st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_solve_agrees_with_oracle(rows, b):
    m = Matrix(rows)
    b = tuple(b[: m.nrows])
    x = solve(m, b)
    ref = Lat().solve([list(c) for c in m.columns()], m.nrows, list(b))
    assert (x is None) == (ref is None)
    if x is not None:
        assert m.apply(x) == b


@given(int_matrices())
def test_kernel_and_image(rows):
    m = Matrix(rows)
    K = kernel_basis(m)
    assert all(not any(m.apply(k)) for k in K)
    assert len(K) + rank(m) == m.ncols
    assert span_eq(ZZ, m.ncols, K, Lat().kernel([list(c) for c in m.columns()], m.nrows))
    assert span_eq(ZZ, m.nrows, image_basis(m), m.columns())


@given(int_matrices(3, 3, 4), st.sampled_from([2, 3, 5]))
def test_field_rank_matches_oracle(rows, p):
    m = Matrix(rows)
    ref = len(m.columns()) - len(Lat(p).kernel([list(c) for c in m.columns()], m.nrows))
    assert rank(m, GF(p)) == ref


@given(int_matrices(3, 3, 4))
def test_coords_lift_roundtrip(rows):
    G = cokernel(Matrix(rows))
    for c in [tuple(1 for _ in range(G.ngens)), tuple(range(G.ngens))]:
        v = G.lift(c)
        assert G.coords(v) == G.reduce_coords(c)
    for g, e in zip(G.generators, range(G.ngens)):
        assert G.coords(g) == tuple(int(i == e) for i in range(G.ngens))


def test_hom_between_subquotients():
    A = Subquotient(ZZ, 1, [(1,)], [(4,)])
    B = Subquotient(ZZ, 1, [(1,)], [(2,)])
    f = Hom.from_ambient(A, B, Matrix.identity(1))
    assert f.is_surjective() and not f.is_injective()
    assert f.kernel_group().orders == (2,)
    g = Hom.from_ambient(B, A, Matrix([[2]]))
    assert g.is_injective()
    assert g.compose(f).matrix.rows == ((2,),)


def test_subquotient_inside_subquotient():
    A = Subquotient(ZZ, 2, [(1, 0), (0, 1)], [(0, 3)])
    S = subquotient(A, [(1, 0)], [(2, 0)])
    assert S.orders == (2,)


@given(int_matrices())
def test_rational_rank_oracles_agree(rows):
    assert rank_q(rows) == len(invariant_factors(rows)) == rank(Matrix(rows), ZZ)
