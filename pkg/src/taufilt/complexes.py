"""Bounded chain complexes of finite free modules, chain maps, cones, truncations."""

from __future__ import annotations

from functools import cached_property
from typing import Mapping, Sequence

from .exactalg import (
    ZZ,
    AlgebraError,
    Hom,
    Matrix,
    Ring,
    Subquotient,
    Vector,
    block_diag,
    kernel_basis,
    solve,
)


class ComplexError(ValueError):
    pass


class ChainComplex:
    """C_lo <- ... <- C_hi with d_n : C_n -> C_{n-1}; zero outside [lo, hi]."""

    def __init__(self, ring: Ring, lo: int, ranks: Sequence[int], diffs: Mapping[int, Matrix] | None = None, check: bool = True):
        self.ring = ring
        self.lo = lo
        self.hi = lo + len(ranks) - 1
        self._ranks = tuple(ranks)
        self._d: dict[int, Matrix] = {}
        diffs = diffs or {}
        for n in range(lo + 1, self.hi + 1):
            m = diffs.get(n)
            shape = (self.rank(n - 1), self.rank(n))
            if m is None:
                m = Matrix.zero(*shape)
            if m.shape != shape:
                raise ComplexError(f"differential d_{n} has shape {m.shape}, expected {shape}")
            self._d[n] = m.reduce(ring)
        for n in diffs:
            if n <= lo or n > self.hi:
                if not diffs[n].is_zero(ring):
                    raise ComplexError(f"differential d_{n} lies outside the degree window")
        if check:
            for n in range(lo + 2, self.hi + 1):
                if not (self._d[n - 1] @ self._d[n]).is_zero(ring):
                    raise ComplexError(f"d_{n - 1} d_{n} != 0")

    @classmethod
    def zero(cls, ring: Ring = ZZ, lo: int = 0, hi: int = 0) -> "ChainComplex":
        return cls(ring, lo, [0] * (hi - lo + 1))

    @classmethod
    def single(cls, ring: Ring, n: int, rank: int = 1) -> "ChainComplex":
        return cls(ring, n, [rank])

    def rank(self, n: int) -> int:
        return self._ranks[n - self.lo] if self.lo <= n <= self.hi else 0

    @property
    def ranks(self) -> tuple[int, ...]:
        return self._ranks

    def d(self, n: int) -> Matrix:
        if n in self._d:
            return self._d[n]
        return Matrix.zero(self.rank(n - 1), self.rank(n))

    @property
    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def __repr__(self):
        return f"ChainComplex({self.ring!r}, degrees {self.lo}..{self.hi}, ranks {list(self._ranks)})"

    def padded(self, lo: int, hi: int) -> "ChainComplex":
        """Same complex written on a larger degree window."""
        if lo > self.lo and any(self.rank(n) for n in range(self.lo, lo)):
            raise ComplexError("padding would drop nonzero degrees")
        if hi < self.hi and any(self.rank(n) for n in range(hi + 1, self.hi + 1)):
            raise ComplexError("padding would drop nonzero degrees")
        return ChainComplex(self.ring, lo, [self.rank(n) for n in range(lo, hi + 1)], {n: self.d(n) for n in range(lo + 1, hi + 1)}, check=False)

    def same_as(self, other: "ChainComplex") -> bool:
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        return self.ring == other.ring and all(self.rank(n) == other.rank(n) for n in range(lo, hi + 1)) and all(
            self.d(n) == other.d(n) for n in range(lo + 1, hi + 1)
        )

    # homology -----------------------------------------------------------
    def cycles(self, n: int) -> list[Vector]:
        return kernel_basis(self.d(n), self.ring)

    def boundaries(self, n: int) -> list[Vector]:
        return self.d(n + 1).columns()

    @cached_property
    def _homology(self) -> dict[int, Subquotient]:
        return {}

    def homology(self, n: int) -> Subquotient:
        """H_n as a subquotient of C_n; generators are cycle representatives."""
        h = self._homology.get(n)
        if h is None:
            h = Subquotient(self.ring, self.rank(n), self.cycles(n), self.boundaries(n))
            self._homology[n] = h
        return h

    def is_acyclic(self) -> bool:
        return all(self.homology(n).is_trivial() for n in self.degrees)

    def is_cycle(self, n: int, x: Sequence[int]) -> bool:
        return all(self.ring.reduce(v) == 0 for v in self.d(n).apply(x))


def homology(c: ChainComplex, n: int) -> Subquotient:
    return c.homology(n)


class ChainMap:
    """Degreewise matrices f_n : A_n -> B_n commuting with the differentials."""

    def __init__(self, src: ChainComplex, tgt: ChainComplex, mats: Mapping[int, Matrix], check: bool = True):
        if src.ring != tgt.ring:
            raise ComplexError("ring mismatch between source and target")
        self.src = src
        self.tgt = tgt
        self.ring = src.ring
        self._f: dict[int, Matrix] = {}
        lo, hi = min(src.lo, tgt.lo), max(src.hi, tgt.hi)
        for n in range(lo, hi + 1):
            shape = (tgt.rank(n), src.rank(n))
            m = mats.get(n)
            if m is None:
                m = Matrix.zero(*shape)
            if m.shape != shape:
                raise ComplexError(f"chain map component f_{n} has shape {m.shape}, expected {shape}")
            self._f[n] = m.reduce(self.ring)
        self.lo, self.hi = lo, hi
        if check:
            for n in range(lo + 1, hi + 1):
                if not (tgt.d(n) @ self._f[n] - self._f[n - 1] @ src.d(n)).is_zero(self.ring):
                    raise ComplexError(f"map does not commute with the differential in degree {n}")

    def f(self, n: int) -> Matrix:
        if n in self._f:
            return self._f[n]
        return Matrix.zero(self.tgt.rank(n), self.src.rank(n))

    @classmethod
    def identity(cls, c: ChainComplex) -> "ChainMap":
        return cls(c, c, {n: Matrix.identity(c.rank(n)) for n in c.degrees}, check=False)

    @classmethod
    def zero(cls, src: ChainComplex, tgt: ChainComplex) -> "ChainMap":
        return cls(src, tgt, {}, check=False)

    def compose(self, first: "ChainMap") -> "ChainMap":
        """self ∘ first."""
        lo, hi = min(first.src.lo, self.tgt.lo), max(first.src.hi, self.tgt.hi)
        return ChainMap(first.src, self.tgt, {n: self.f(n) @ first.f(n) for n in range(lo, hi + 1)}, check=False)

    def scaled(self, c: int) -> "ChainMap":
        return ChainMap(self.src, self.tgt, {n: self.f(n).scale(c) for n in range(self.lo, self.hi + 1)}, check=False)

    def __add__(self, other: "ChainMap") -> "ChainMap":
        return ChainMap(self.src, self.tgt, {n: self.f(n) + other.f(n) for n in range(self.lo, self.hi + 1)}, check=False)

    def induced(self, n: int) -> Hom:
        """The induced map H_n(src) -> H_n(tgt)."""
        return Hom.from_ambient(self.src.homology(n), self.tgt.homology(n), self.f(n))

    def is_quasi_iso(self) -> bool:
        return all(self.induced(n).is_iso() for n in range(self.lo, self.hi + 1))

    def equals(self, other: "ChainMap") -> bool:
        return all((self.f(n) - other.f(n)).is_zero(self.ring) for n in range(self.lo, self.hi + 1))


def shift(c: ChainComplex, k: int) -> ChainComplex:
    """(c[k])_n = c_{n-k} with differential (-1)^k d."""
    sign = -1 if k % 2 else 1
    return ChainComplex(c.ring, c.lo + k, c.ranks, {n + k: c.d(n).scale(sign) for n in range(c.lo + 1, c.hi + 1)}, check=False)


def shift_map(f: ChainMap, k: int) -> ChainMap:
    return ChainMap(shift(f.src, k), shift(f.tgt, k), {n + k: f.f(n) for n in range(f.lo, f.hi + 1)}, check=False)


def direct_sum(a: ChainComplex, b: ChainComplex) -> ChainComplex:
    lo, hi = min(a.lo, b.lo), max(a.hi, b.hi)
    return ChainComplex(
        a.ring,
        lo,
        [a.rank(n) + b.rank(n) for n in range(lo, hi + 1)],
        {n: block_diag(a.d(n), b.d(n)) for n in range(lo + 1, hi + 1)},
        check=False,
    )


class Cone:
    """Mapping cone of f : A -> B with its canonical maps.

    Cone_n = A_{n-1} ⊕ B_n, d(a, b) = (-d a, f a + d b). Ambient vectors are
    concatenations (a, b).
    """

    def __init__(self, f: ChainMap):
        self.map = f
        A, B = f.src, f.tgt
        self.A, self.B = A, B
        lo = min(A.lo + 1, B.lo)
        hi = max(A.hi + 1, B.hi)
        diffs = {}
        for n in range(lo + 1, hi + 1):
            top = A.d(n - 1).scale(-1).hstack(Matrix.zero(A.rank(n - 2), B.rank(n)))
            bot = f.f(n - 1).hstack(B.d(n))
            diffs[n] = top.vstack(bot)
        self.complex = ChainComplex(f.ring, lo, [A.rank(n - 1) + B.rank(n) for n in range(lo, hi + 1)], diffs, check=False)

    def split(self, n: int, x: Sequence[int]) -> tuple[Vector, Vector]:
        k = self.A.rank(n - 1)
        return tuple(x[:k]), tuple(x[k:])

    def join(self, n: int, a: Sequence[int], b: Sequence[int]) -> Vector:
        if len(a) != self.A.rank(n - 1) or len(b) != self.B.rank(n):
            raise ComplexError("cone component length mismatch")
        return tuple(a) + tuple(b)

    @cached_property
    def inclusion(self) -> ChainMap:
        """B -> Cone, b |-> (0, b)."""
        c = self.complex
        mats = {}
        for n in c.degrees:
            mats[n] = Matrix.zero(self.A.rank(n - 1), self.B.rank(n)).vstack(Matrix.identity(self.B.rank(n)))
        return ChainMap(self.B, c, mats, check=False)

    @cached_property
    def projection(self) -> ChainMap:
        """Cone -> A[1], (a, b) |-> a."""
        c = self.complex
        tgt = shift(self.A, 1)
        mats = {n: Matrix.identity(self.A.rank(n - 1)).hstack(Matrix.zero(self.A.rank(n - 1), self.B.rank(n))) for n in c.degrees}
        return ChainMap(c, tgt, mats, check=False)

    def connecting_map(self, n: int) -> Hom:
        """H_n(Cone) -> H_{n-1}(A), induced by (a, b) |-> a."""
        c = self.complex
        m = Matrix.identity(self.A.rank(n - 1)).hstack(Matrix.zero(self.A.rank(n - 1), self.B.rank(n)))
        return Hom.from_ambient(c.homology(n), self.A.homology(n - 1), m)


def mapping_cone(f: ChainMap) -> Cone:
    return Cone(f)


def connecting_map(f: ChainMap, n: int) -> Hom:
    return Cone(f).connecting_map(n)


def fiber(f: ChainMap) -> ChainComplex:
    """fib(f) = Cone(f)[-1]: degree n is A_n ⊕ B_{n+1}."""
    return shift(Cone(f).complex, -1)


def truncate_above(c: ChainComplex, m: int) -> tuple[ChainComplex, ChainMap]:
    """Good truncation: 0 below m, cycles Z_m in degree m, C_n above.

    Returns the truncated complex and its inclusion into c.
    """
    ring = c.ring
    if m <= c.lo:
        return c, ChainMap.identity(c)
    if m > c.hi:
        z = ChainComplex.zero(ring, c.lo, c.hi)
        return z, ChainMap.zero(z, c)
    K = c.cycles(m)
    kmat = Matrix.from_columns(K, c.rank(m))
    ranks = [0] * (m - c.lo) + [len(K)] + [c.rank(n) for n in range(m + 1, c.hi + 1)]
    diffs = {}
    for n in range(m + 2, c.hi + 1):
        diffs[n] = c.d(n)
    if m + 1 <= c.hi:
        cols = []
        for v in c.d(m + 1).columns():
            x = solve(kmat, v, ring)
            if x is None:
                raise AlgebraError("boundary not expressible in cycle basis")
            cols.append(x)
        diffs[m + 1] = Matrix.from_columns(cols, len(K))
    t = ChainComplex(ring, c.lo, ranks, diffs)
    mats = {m: kmat}
    for n in range(m + 1, c.hi + 1):
        mats[n] = Matrix.identity(c.rank(n))
    return t, ChainMap(t, c, mats)


def subcomplex(c: ChainComplex, bases: Mapping[int, Sequence[Sequence[int]]]) -> tuple[ChainComplex, ChainMap]:
    """The subcomplex spanned degreewise by the given (saturated) bases.

    The bases must be closed under d; the induced differential is found by
    solving in the basis of the next degree down.
    """
    ring = c.ring
    lo, hi = c.lo, c.hi
    mats = {n: Matrix.from_columns(list(bases.get(n, [])), c.rank(n)) for n in range(lo, hi + 1)}
    diffs = {}
    for n in range(lo + 1, hi + 1):
        cols = []
        for v in mats[n].columns():
            y = c.d(n).apply(v)
            x = solve(mats[n - 1], y, ring)
            if x is None:
                raise ComplexError(f"basis in degree {n} is not closed under the differential")
            cols.append(x)
        diffs[n] = Matrix.from_columns(cols, mats[n - 1].ncols)
    sub = ChainComplex(ring, lo, [mats[n].ncols for n in range(lo, hi + 1)], diffs)
    return sub, ChainMap(sub, c, mats)
