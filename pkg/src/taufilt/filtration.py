"""Filtered chain complexes on a finite window with boundary profiles.

A filtered complex is a diagram ... -> X^{s+1} -> X^s -> X^{s-1} -> ... that is
stored explicitly for s in [s_min, s_max]. Outside the window it is either
constant (identity transitions) or zero, as chosen by the two profiles. Every
level shares one ring and one degree window.
"""

from __future__ import annotations

import warnings
from functools import cached_property
from math import gcd
from typing import Mapping, Sequence

from .complexes import (
    ChainComplex,
    ChainMap,
    Cone,
    ComplexError,
    fiber,
    shift,
    truncate_above,
)
from .exactalg import ZZ, AlgebraError, Hom, Matrix, Ring, Subquotient, kernel_basis, smith, solve

CONSTANT = "constant"
ZERO = "zero"


class FiltrationError(ValueError):
    pass


class AdequacyWarning(UserWarning):
    """The window is too short for the torsion of an adic filtration."""


class FilteredComplex:
    """Levels X^s (s_min <= s <= s_max) and transitions t_s : X^s -> X^{s-1}.

    ``transitions[i]`` is t_{s_min+i+1}. Profiles ``below`` and ``above`` say
    how the diagram continues outside the window.
    """

    def __init__(
        self,
        levels: Sequence[ChainComplex],
        transitions: Sequence[ChainMap],
        s_min: int = 0,
        below: str = CONSTANT,
        above: str = ZERO,
    ):
        if not levels:
            raise FiltrationError("a filtered complex needs at least one level")
        if below not in (CONSTANT, ZERO) or above not in (CONSTANT, ZERO):
            raise FiltrationError(f"unknown profile {below!r}/{above!r}")
        if len(transitions) != len(levels) - 1:
            raise FiltrationError(f"expected {len(levels) - 1} transitions, got {len(transitions)}")
        ring = levels[0].ring
        lo, hi = levels[0].lo, levels[0].hi
        for i, c in enumerate(levels):
            if c.ring != ring:
                raise FiltrationError(f"ring mismatch at level {s_min + i}")
            if (c.lo, c.hi) != (lo, hi):
                raise FiltrationError(
                    f"degree window mismatch at level {s_min + i}: [{c.lo},{c.hi}] vs [{lo},{hi}]"
                )
        for i, t in enumerate(transitions):
            s = s_min + i + 1
            if t.src is not levels[i + 1] and not t.src.same_as(levels[i + 1]):
                raise FiltrationError(f"transition t_{s} does not start at level {s}")
            if t.tgt is not levels[i] and not t.tgt.same_as(levels[i]):
                raise FiltrationError(f"transition t_{s} does not end at level {s - 1}")
        self.ring: Ring = ring
        self.lo, self.hi = lo, hi
        self.s_min = s_min
        self.s_max = s_min + len(levels) - 1
        self.below = below
        self.above = above
        self._levels = tuple(levels)
        self._trans = tuple(transitions)
        self._zero = ChainComplex.zero(ring, lo, hi)
        self._cache: dict = {}

    def __repr__(self):
        return (
            f"FilteredComplex({self.ring!r}, s in [{self.s_min},{self.s_max}], degrees [{self.lo},{self.hi}], "
            f"below={self.below}, above={self.above})"
        )

    @property
    def window(self) -> range:
        return range(self.s_min, self.s_max + 1)

    @property
    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    @property
    def length(self) -> int:
        return self.s_max - self.s_min

    def level(self, s: int) -> ChainComplex:
        if s < self.s_min:
            return self._levels[0] if self.below == CONSTANT else self._zero
        if s > self.s_max:
            return self._levels[-1] if self.above == CONSTANT else self._zero
        return self._levels[s - self.s_min]

    def transition(self, s: int) -> ChainMap:
        """t_s : X^s -> X^{s-1} for any integer s."""
        key = ("t", s)
        if key in self._cache:
            return self._cache[key]
        src, tgt = self.level(s), self.level(s - 1)
        if self.s_min < s <= self.s_max:
            t = self._trans[s - self.s_min - 1]
        elif src is tgt:
            t = ChainMap.identity(src)
        else:
            t = ChainMap.zero(src, tgt)
        self._cache[key] = t
        return t

    def composite(self, a: int, b: int) -> ChainMap:
        """The composite X^a -> X^b of transitions (a >= b)."""
        if a < b:
            raise FiltrationError("composite transitions go down in filtration")
        key = ("T", a, b)
        if key in self._cache:
            return self._cache[key]
        src, tgt = self.level(a), self.level(b)
        a2 = min(a, self.s_max) if self.above == CONSTANT else a
        b2 = max(b, self.s_min) if self.below == CONSTANT else b
        if src is self._zero or tgt is self._zero:
            m = ChainMap.zero(src, tgt)
        elif a2 <= b2:
            m = ChainMap.identity(src)
        elif a2 == b2 + 1:
            m = self.transition(a2)
        else:
            m = self.transition(b2 + 1).compose(self.composite(a2, b2 + 1))
        self._cache[key] = m
        return m

    def is_strict(self) -> bool:
        """All window transitions are injective matrices."""
        for s in range(self.s_min + 1, self.s_max + 1):
            t = self.transition(s)
            for n in self.degrees:
                if kernel_basis(t.f(n), self.ring):
                    return False
        return True

    # associated graded and friends ---------------------------------------
    def gr_cone(self, s: int) -> Cone:
        key = ("gr", s)
        if key not in self._cache:
            self._cache[key] = Cone(self.transition(s + 1))
        return self._cache[key]

    def gr(self, s: int) -> ChainComplex:
        return self.gr_cone(s).complex

    @property
    def e1_range(self) -> range:
        return range(self.s_min - 1, self.s_max + 1)

    @property
    def gr_degrees(self) -> range:
        return range(self.lo, self.hi + 2)

    # (co)limits ------------------------------------------------------------
    def colimit(self) -> ChainComplex:
        return self._levels[0] if self.below == CONSTANT else self._zero

    def to_colimit(self, s: int) -> ChainMap:
        """The canonical map X^s -> X^{-inf}."""
        if self.below == ZERO:
            return ChainMap.zero(self.level(s), self._zero)
        return self.composite(s, self.s_min) if s >= self.s_min else ChainMap.identity(self.level(s))

    def limit(self) -> ChainComplex:
        return self._levels[-1] if self.above == CONSTANT else self._zero

    def from_limit(self, s: int) -> ChainMap:
        """The canonical map X^{inf} -> X^s."""
        if self.above == ZERO:
            return ChainMap.zero(self._zero, self.level(s))
        return self.composite(self.s_max, s) if s <= self.s_max else ChainMap.identity(self.level(s))

    def is_complete(self) -> bool:
        return self.limit().is_acyclic()

    def is_cocomplete(self) -> bool:
        return self.colimit().is_acyclic()

    # concentration flags ----------------------------------------------------
    def _is_qiso(self, s: int) -> bool:
        key = ("qiso", s)
        if key not in self._cache:
            self._cache[key] = self.transition(s).is_quasi_iso()
        return self._cache[key]

    @cached_property
    def right_concentrated_from(self) -> int:
        """Smallest s0 with every t_s (s > s0) a quasi-isomorphism."""
        s0 = self.s_max + 1
        while s0 > self.s_min and self._is_qiso(s0):
            s0 -= 1
        return s0

    @cached_property
    def left_concentrated_below(self) -> int:
        """Largest s0 with every t_s (s <= s0) a quasi-isomorphism."""
        s0 = self.s_min
        while s0 <= self.s_max and self._is_qiso(s0 + 1):
            s0 += 1
        return s0

    @property
    def right_concentrated(self) -> bool:
        # beyond the window transitions are identities or 0 -> 0
        return True

    @property
    def left_concentrated(self) -> bool:
        return True

    def flags(self) -> dict:
        return {
            "right_concentrated": self.right_concentrated,
            "right_from": self.right_concentrated_from,
            "left_concentrated": self.left_concentrated,
            "left_below": self.left_concentrated_below,
            "complete": self.is_complete(),
            "cocomplete": self.is_cocomplete(),
        }


def build(levels, transitions, s_min=0, below=CONSTANT, above=ZERO) -> FilteredComplex:
    return FilteredComplex(levels, transitions, s_min, below, above)


def from_complexes(levels: Sequence[ChainComplex], transition_mats: Sequence[Mapping[int, Matrix]], s_min=0, below=CONSTANT, above=ZERO) -> FilteredComplex:
    """Build from levels and raw transition matrices (checked as chain maps)."""
    trans = [ChainMap(levels[i + 1], levels[i], transition_mats[i]) for i in range(len(levels) - 1)]
    return FilteredComplex(levels, trans, s_min, below, above)


class FilteredMap:
    """Levelwise chain maps f^s : X^s -> Y^s commuting with transitions."""

    def __init__(self, src: FilteredComplex, tgt: FilteredComplex, maps: Mapping[int, ChainMap], check: bool = True):
        self.src, self.tgt = src, tgt
        self._maps = dict(maps)
        self.s_lo = min(src.s_min, tgt.s_min) - 1
        self.s_hi = max(src.s_max, tgt.s_max) + 1
        if check:
            for s in range(self.s_lo + 1, self.s_hi + 1):
                a = self.at(s - 1).compose(src.transition(s))
                b = tgt.transition(s).compose(self.at(s))
                if not a.equals(b):
                    raise FiltrationError(f"filtered map does not commute with t_{s}")

    def at(self, s: int) -> ChainMap:
        s = min(max(s, self.s_lo), self.s_hi)
        return self._maps[s]

    def gr_map(self, s: int) -> ChainMap:
        return cone_map(self.src.gr_cone(s), self.tgt.gr_cone(s), self.at(s + 1), self.at(s))

    def is_levelwise_quasi_iso(self) -> bool:
        return all(self.at(s).is_quasi_iso() for s in range(self.s_lo, self.s_hi + 1))

    def is_gr_quasi_iso(self) -> bool:
        return all(self.gr_map(s).is_quasi_iso() for s in range(self.s_lo, self.s_hi + 1))

    def colimit_map(self) -> ChainMap:
        a, b = self.src.colimit(), self.tgt.colimit()
        if self.src.below == ZERO or self.tgt.below == ZERO:
            return ChainMap.zero(a, b)
        return self.at(self.s_lo)


def cone_map(c1: Cone, c2: Cone, top: ChainMap, bottom: ChainMap) -> ChainMap:
    """The map Cone(f1) -> Cone(f2) induced by a commuting square (top, bottom)."""
    src, tgt = c1.complex, c2.complex
    mats = {}
    for n in range(min(src.lo, tgt.lo), max(src.hi, tgt.hi) + 1):
        a = top.f(n - 1)
        b = bottom.f(n)
        mats[n] = _block(a, b)
    return ChainMap(src, tgt, mats)


def _block(a: Matrix, b: Matrix) -> Matrix:
    upper = a.hstack(Matrix.zero(a.nrows, b.ncols))
    lower = Matrix.zero(b.nrows, a.ncols).hstack(b)
    return upper.vstack(lower)


def scalar_map(X: FilteredComplex, k: int) -> FilteredMap:
    maps = {s: ChainMap.identity(X.level(s)).scaled(k) for s in range(X.s_min - 1, X.s_max + 2)}
    return FilteredMap(X, X, maps)


# ---------------------------------------------------------------------------
# constructions


def filtered_sphere(n: int = 0, s: int = 0, ring: Ring = ZZ) -> FilteredComplex:
    """Z in degree n at every level t <= s, zero above."""
    return FilteredComplex([ChainComplex.single(ring, n)], [], s_min=s, below=CONSTANT, above=ZERO)


def zero_filtered(ring: Ring = ZZ, lo: int = 0, hi: int = 0) -> FilteredComplex:
    return FilteredComplex([ChainComplex.zero(ring, lo, hi)], [], 0, ZERO, ZERO)


def constant_filtration(c: ChainComplex, s_min: int = 0, s_max: int = 0) -> FilteredComplex:
    levels = [c] * (s_max - s_min + 1)
    return FilteredComplex(levels, [ChainMap.identity(c)] * (s_max - s_min), s_min, CONSTANT, CONSTANT)


def associated_graded(X: FilteredComplex, s: int) -> ChainComplex:
    return X.gr(s)


def fib_graded(X: FilteredComplex, s: int) -> ChainComplex:
    """fib(X^s -> X^{s-1}) as the desuspended cone."""
    return fiber(X.transition(s))


def colimit_complex(X: FilteredComplex) -> ChainComplex:
    return X.colimit()


def limit_complex(X: FilteredComplex) -> ChainComplex:
    return X.limit()


class ModTau:
    """X/τ^k: level s is the cone of X^{s+k} -> X^s.

    Elements are pairs (u, b) with u in X^{s+k}_{n-1} and b in X^s_n.
    """

    def __init__(self, X: FilteredComplex, k: int):
        if k < 1:
            raise FiltrationError("k must be at least 1")
        self.X, self.k = X, k
        s_lo = X.s_min - k
        self.cones = {s: Cone(X.composite(s + k, s)) for s in range(s_lo, X.s_max + 1)}
        levels = [self.cones[s].complex for s in range(s_lo, X.s_max + 1)]
        trans = []
        for s in range(s_lo + 1, X.s_max + 1):
            trans.append(cone_map(self.cones[s], self.cones[s - 1], X.transition(s + k), X.transition(s)))
        self.filtered = FilteredComplex(levels, trans, s_lo, X.below, X.above)

    def cone(self, s: int) -> Cone:
        if s not in self.cones:
            self.cones[s] = Cone(self.X.composite(s + self.k, s))
        return self.cones[s]

    def level(self, s: int) -> ChainComplex:
        return self.cone(s).complex

    def reduction(self, m: int, s: int) -> ChainMap:
        """X/τ^k -> X/τ^m at level s: (u, b) |-> (T_{k-m} u, b)."""
        if not 1 <= m <= self.k:
            raise FiltrationError("reduction needs 1 <= m <= k")
        other = mod_tau_k(self.X, m)
        return cone_map(self.cone(s), other.cone(s), self.X.composite(s + self.k, s + m), ChainMap.identity(self.X.level(s)))

    def tau_power(self, m: int, s: int) -> ChainMap:
        """τ^m : (X/τ^{k-m})^{s+m} -> (X/τ^k)^s, (u, v) |-> (u, T_m v)."""
        if not 1 <= m < self.k:
            raise FiltrationError("tau_power needs 1 <= m < k")
        small = mod_tau_k(self.X, self.k - m)
        return cone_map(small.cone(s + m), self.cone(s), ChainMap.identity(self.X.level(s + self.k)), self.X.composite(s + m, s))

    def quotient_model(self, s: int) -> tuple[ChainComplex, ChainMap] | None:
        """X^s / T(X^{s+k}) when T is a split injection, with the comparison
        map from the cone model (u, b) |-> [b]; None when not applicable."""
        X = self.X
        T = X.composite(s + self.k, s)
        ring = X.ring
        lo, hi = X.lo, X.hi
        proj: dict[int, Matrix] = {}
        lifts: dict[int, Matrix] = {}
        for n in range(lo, hi + 1):
            m = T.f(n)
            f = smith(m, ring)
            if f.rank != m.ncols or any(not ring.is_unit(d) for d in f.diag):
                return None
            # rows r..end of U project onto the quotient; columns r.. of U^-1 lift back
            r = f.rank
            proj[n] = f.U.submatrix(range(r, m.nrows), range(m.nrows)).reduce(ring)
            lifts[n] = f.Uinv.submatrix(range(m.nrows), range(r, m.nrows))
        ranks = [proj[n].nrows for n in range(lo, hi + 1)]
        diffs = {n: (proj[n - 1] @ X.level(s).d(n) @ lifts[n]).reduce(ring) for n in range(lo + 1, hi + 1)}
        Q = ChainComplex(ring, lo, ranks, diffs)
        cone = self.cone(s)
        mats = {}
        for n in range(cone.complex.lo, cone.complex.hi + 1):
            a = X.level(s + self.k).rank(n - 1)
            mats[n] = Matrix.zero(Q.rank(n), a).hstack(proj[n] if n in proj else Matrix.zero(Q.rank(n), X.level(s).rank(n)))
        return Q, ChainMap(cone.complex, Q.padded(cone.complex.lo, cone.complex.hi), mats)


def mod_tau_k(X: FilteredComplex, k: int) -> ModTau:
    """X/τ^k, cached on X."""
    key = ("modtau", k)
    if key not in X._cache:
        X._cache[key] = ModTau(X, k)
    return X._cache[key]


def completion(X: FilteredComplex) -> tuple[FilteredComplex, FilteredMap]:
    """Levelwise cofib(X^inf -> X^s), with the map from X."""
    lo, hi = X.s_min - 1, X.s_max
    cones = {s: Cone(X.from_limit(s)) for s in range(lo, hi + 1)}
    levels = [cones[s].complex for s in range(lo, hi + 1)]
    lim_id = ChainMap.identity(X.limit())
    trans = [cone_map(cones[s], cones[s - 1], lim_id, X.transition(s)) for s in range(lo + 1, hi + 1)]
    C = FilteredComplex(levels, trans, lo, CONSTANT, X.above)
    maps = {}
    for s in range(lo - 1, hi + 2):
        if s > hi and X.above == ZERO:
            maps[s] = ChainMap.zero(X.level(s), C.level(s))
        else:
            maps[s] = cones[min(max(s, lo), hi)].inclusion
    return C, FilteredMap(X, C, maps)


def reflect(X: FilteredComplex, direction: str) -> FilteredComplex:
    """The associated tower (cofibres into the colimit) or filtration
    (fibres out of the limit)."""
    if direction == "tower":
        W = X.colimit()
        cones = {s: Cone(X.to_colimit(s + 1)) for s in range(X.s_min - 1, X.s_max + 1)}
        idW = ChainMap.identity(W)
        levels = [cones[s].complex for s in range(X.s_min - 1, X.s_max + 1)]
        trans = [cone_map(cones[s], cones[s - 1], X.transition(s + 1), idW) for s in range(X.s_min, X.s_max + 1)]
        return FilteredComplex(levels, trans, X.s_min - 1, X.below, CONSTANT)
    if direction == "filtration":
        L = X.limit()
        maps = {s: X.from_limit(s - 1) for s in range(X.s_min, X.s_max + 2)}
        cones = {s: Cone(maps[s]) for s in maps}
        levels = [shift(cones[s].complex, -1) for s in range(X.s_min, X.s_max + 2)]
        idL = ChainMap.identity(L)
        trans = []
        for s in range(X.s_min + 1, X.s_max + 2):
            m = cone_map(cones[s], cones[s - 1], idL, X.transition(s - 1))
            trans.append(ChainMap(levels[s - X.s_min], levels[s - 1 - X.s_min], {n - 1: m.f(n) for n in range(m.lo, m.hi + 1)}))
        return FilteredComplex(levels, trans, X.s_min, CONSTANT, X.above)
    raise FiltrationError(f"unknown direction {direction!r}")


def map_into_fiber(F: ChainMap, phi: ChainMap, h: Mapping[int, Matrix]) -> ChainMap:
    """Z -> fib(F: P -> Q) from phi: Z -> P and a null-homotopy h of F∘phi
    (h_n : Z_n -> Q_{n+1}, F phi = d h + h d); the formula is z |-> (phi z, -h z)."""
    fib = fiber(F)
    Z = phi.src
    mats = {}
    for n in range(min(Z.lo, fib.lo), max(Z.hi, fib.hi) + 1):
        p = phi.f(n)
        hn = h.get(n, Matrix.zero(F.tgt.rank(n + 1), Z.rank(n)))
        mats[n] = p.vstack(hn.scale(-1))
    return ChainMap(Z, fib, mats)


def map_out_of_cone(F: ChainMap, psi: ChainMap, k: Mapping[int, Matrix]) -> ChainMap:
    """Cone(F: P -> Q) -> Z from psi: Q -> Z and k (k_n : P_n -> Z_{n+1})
    with d k + k d = psi F; the formula is (p, q) |-> psi q + k p."""
    cone = Cone(F).complex
    Z = psi.tgt
    P = F.src
    mats = {}
    for n in range(min(Z.lo, cone.lo), max(Z.hi, cone.hi) + 1):
        kn = k.get(n - 1, Matrix.zero(Z.rank(n), P.rank(n - 1)))
        mats[n] = kn.hstack(psi.f(n))
    return ChainMap(cone, Z, mats)


def gr_to_fibgr_of_tower(X: FilteredComplex, s: int) -> ChainMap:
    """Comparison Gr^s X -> fibGr^s(X^tow), certified separately as a quasi-iso."""
    T = reflect(X, "tower")
    F = T.transition(s)
    P, Q = F.src, F.tgt
    Gr = X.gr(s)
    c_s = X.to_colimit(s).f
    A1 = X.level(s + 1)
    Xs = X.level(s)
    W = X.colimit()
    phi_m, h_m = {}, {}
    for n in range(Gr.lo - 1, Gr.hi + 2):
        # Gr_n = X^{s+1}_{n-1} ⊕ X^s_n ; P_n = X^{s+1}_{n-1} ⊕ W_n
        phi_m[n] = _block(Matrix.identity(A1.rank(n - 1)), c_s(n))
        # h(u, b) = (b, 0) into Q_{n+1} = X^s_n ⊕ W_{n+1}
        h_m[n] = Matrix.zero(Xs.rank(n), A1.rank(n - 1)).hstack(Matrix.identity(Xs.rank(n))).vstack(
            Matrix.zero(W.rank(n + 1), A1.rank(n - 1) + Xs.rank(n))
        )
    phi = ChainMap(Gr, P, {n: phi_m[n] for n in phi_m if n >= min(Gr.lo, P.lo) and n <= max(Gr.hi, P.hi)})
    return map_into_fiber(F, phi, h_m)


def roundtrip_filtration_map(X: FilteredComplex, s: int) -> ChainMap:
    """X^s -> ((X^tow)^fil)^s for X with zero-above profile."""
    if X.above != ZERO:
        raise FiltrationError("round trip certificate implemented for zero-above inputs")
    T = reflect(X, "tower")
    F = T.from_limit(s - 1)
    P, Q = F.src, F.tgt
    Xs = X.level(s)
    c = X.to_colimit(s).f
    W = X.colimit()
    phi_m, h_m = {}, {}
    for n in range(Xs.lo - 1, Xs.hi + 2):
        # P = cone(0 -> W): P_n = W_n
        phi_m[n] = Matrix.zero(P.rank(n) - W.rank(n), Xs.rank(n)).vstack(c(n))
        # Q_{n+1} = X^s_n ⊕ W_{n+1}; h x = (x, 0)
        h_m[n] = Matrix.identity(Xs.rank(n)).vstack(Matrix.zero(W.rank(n + 1), Xs.rank(n)))
    phi = ChainMap(Xs, P, {n: phi_m[n] for n in phi_m if min(Xs.lo, P.lo) <= n <= max(Xs.hi, P.hi)})
    return map_into_fiber(F, phi, h_m)


def roundtrip_tower_map(Y: FilteredComplex, s: int) -> ChainMap:
    """((Y^fil)^tow)^s -> Y^s for Y with zero-below profile."""
    if Y.below != ZERO:
        raise FiltrationError("round trip certificate implemented for zero-below inputs")
    Fl = reflect(Y, "filtration")
    F = Fl.to_colimit(s + 1)  # fib(Y^inf -> Y^s) -> fib(Y^inf -> 0)
    P, Q = F.src, F.tgt
    Ys = Y.level(s)
    L = Y.limit()
    c = Y.from_limit(s).f
    psi_m, k_m = {}, {}
    for n in range(Q.lo - 1, Q.hi + 2):
        # Q_n = L_n ⊕ 0
        psi_m[n] = c(n).hstack(Matrix.zero(Ys.rank(n), Q.rank(n) - L.rank(n)))
        # P_n = L_n ⊕ Y^s_{n+1}; k(a, b) = -b
        k_m[n] = Matrix.zero(Ys.rank(n + 1), L.rank(n)).hstack(Matrix.identity(Ys.rank(n + 1)).scale(-1))
    psi = ChainMap(Q, Ys, {n: psi_m[n] for n in psi_m if min(Q.lo, Ys.lo) <= n <= max(Q.hi, Ys.hi)})
    return map_out_of_cone(F, psi, k_m)


def truncation_inclusion(c: ChainComplex, m: int) -> ChainMap:
    """τ_{>=m+1} c -> τ_{>=m} c."""
    big, ib = truncate_above(c, m)
    small, isml = truncate_above(c, m + 1)
    mats = {}
    for n in c.degrees:
        A = isml.f(n)
        B = ib.f(n)
        if A.ncols == 0 or B.ncols == 0:
            mats[n] = Matrix.zero(big.rank(n), small.rank(n))
            continue
        cols = []
        for v in A.columns():
            x = solve(B, v, c.ring)
            if x is None:
                raise ComplexError("truncations are not nested")
            cols.append(x)
        mats[n] = Matrix.from_columns(cols, big.rank(n))
    return ChainMap(small, big, mats)


def whitehead_postnikov(c: ChainComplex, kind: str = "whitehead") -> FilteredComplex:
    """Whitehead filtration (good truncations τ_{>=s}) or Postnikov tower
    (cones of τ_{>=s+1} c -> c)."""
    if kind == "whitehead":
        levels = [truncate_above(c, s)[0] for s in range(c.lo, c.hi + 1)]
        trans = [truncation_inclusion(c, s - 1) for s in range(c.lo + 1, c.hi + 1)]
        return FilteredComplex(levels, trans, c.lo, CONSTANT, ZERO)
    if kind == "postnikov":
        cones = {s: Cone(truncate_above(c, s + 1)[1]) for s in range(c.lo - 1, c.hi + 1)}
        levels = [cones[s].complex for s in range(c.lo - 1, c.hi + 1)]
        idc = ChainMap.identity(c)
        trans = [cone_map(cones[s], cones[s - 1], truncation_inclusion(c, s), idc) for s in range(c.lo, c.hi + 1)]
        return FilteredComplex(levels, trans, c.lo - 1, CONSTANT, CONSTANT)
    raise FiltrationError(f"unknown kind {kind!r}")


def torsion_exponent(c: ChainComplex, x: int) -> int:
    """Largest e such that some homology torsion needs x^e to be killed."""
    e = 0
    for n in c.degrees:
        for d in c.homology(n).torsion:
            g = gcd(d, abs(x) ** 64)
            k = 0
            while g != 1 and (abs(x) ** k) % g:
                k += 1
            e = max(e, k)
    return e


def adic_filtration_complex(c: ChainComplex, x: int, s_max: int, warn: bool = True) -> FilteredComplex:
    """Levels c on [0, s_max] with transitions ×x; constant below, zero above.

    The truncation agrees with the infinite x-adic tower in filtrations up to
    ``s_max - torsion_exponent(c, x)``.
    """
    if x == 0:
        raise FiltrationError("x must be nonzero")
    levels = [c] * (s_max + 1)
    trans = [ChainMap.identity(c).scaled(x)] * s_max
    X = FilteredComplex(levels, trans, 0, CONSTANT, ZERO)
    e = torsion_exponent(c, x)
    if warn and s_max - e < 0:
        warnings.warn(f"window [0,{s_max}] is shorter than the torsion exponent {e}", AdequacyWarning, stacklevel=2)
    return X


def adequacy_bound(c: ChainComplex, x: int, s_max: int) -> int:
    return s_max - torsion_exponent(c, x)


def moore_complex(p: int, k: int, ring: Ring = ZZ) -> ChainComplex:
    """Z --p^k--> Z in degrees 1 -> 0."""
    return ChainComplex(ring, 0, [1, 1], {1: Matrix([[p**k]])})


# ---------------------------------------------------------------------------
# total differentials


class TotalDifferential:
    """∂_n^N : H_q((X/τ^n)^s) -> H_{q-1}((X/τ^{N-n})^{s+n}) (N finite) or
    H_{q-1}(X^{s+n}) (N = None, meaning infinity)."""

    def __init__(self, X: FilteredComplex, n: int, N: int | None = None):
        if n < 1 or (N is not None and N < n):
            raise FiltrationError(f"invalid total differential indices n={n}, N={N}")
        self.X, self.n, self.N = X, n, N
        self.src = mod_tau_k(X, n)
        self.tgt = None if N is None or N == n else mod_tau_k(X, N - n)
        self._cache: dict = {}

    def source_group(self, s: int, q: int) -> Subquotient:
        return self.src.level(s).homology(q)

    def target_complex(self, s: int) -> ChainComplex:
        if self.N is None:
            return self.X.level(s + self.n)
        if self.N == self.n:
            return ChainComplex.zero(self.X.ring, self.X.lo, self.X.hi + 1)
        return self.tgt.level(s + self.n)

    def target_group(self, s: int, q: int) -> Subquotient:
        return self.target_complex(s).homology(q - 1)

    def at(self, s: int, q: int) -> Hom:
        key = (s, q)
        if key in self._cache:
            return self._cache[key]
        if self.N is None:
            h = self.src.cone(s).connecting_map(q)
        elif self.N == self.n:
            h = Hom.zero(self.source_group(s, q), self.target_group(s, q))
        else:
            h = self._via_triangle(s, q)
        self._cache[key] = h
        return h

    def _via_triangle(self, s: int, q: int) -> Hom:
        # A = (X/τ^{N-n})^{s+n} -ι-> B = (X/τ^N)^s -g-> C = (X/τ^n)^s,
        # with null-homotopy h(u, v) = (v, 0) of g ι; solve for the preimage
        # of a class of C in Cone(ι) ≃ C and project to A.
        X, n, N = self.X, self.n, self.N
        ring = X.ring
        A = self.tgt.level(s + n)
        Bc = mod_tau_k(X, N).cone(s)
        B = Bc.complex
        C = self.src.level(s)
        XsN, Xsn, Xs = X.level(s + N), X.level(s + n), X.level(s)
        Tn = X.composite(s + n, s).f
        TNn = X.composite(s + N, s + n).f

        def iota(d):  # A_d -> B_d : (u, v) |-> (u, T_n v)
            return _block(Matrix.identity(XsN.rank(d - 1)), Tn(d))

        def g(d):  # B_d -> C_d : (u, b) |-> (T_{N-n} u, b)
            return _block(TNn(d - 1), Matrix.identity(Xs.rank(d)))

        def h(d):  # A_d -> C_{d+1} : (u, v) |-> (v, 0)
            top = Matrix.zero(Xsn.rank(d), XsN.rank(d - 1)).hstack(Matrix.identity(Xsn.rank(d)))
            return top.vstack(Matrix.zero(Xs.rank(d + 1), XsN.rank(d - 1) + Xsn.rank(d)))

        a1, b0, c1 = A.rank(q - 1), B.rank(q), C.rank(q + 1)
        rows_top = A.d(q - 1).hstack(Matrix.zero(A.rank(q - 2), b0 + c1))
        rows_mid = iota(q - 1).hstack(B.d(q)).hstack(Matrix.zero(B.rank(q - 1), c1))
        rows_bot = h(q - 1).hstack(g(q)).hstack(C.d(q + 1))
        big = rows_top.vstack(rows_mid).vstack(rows_bot)
        src = C.homology(q)
        tgt = A.homology(q - 1)
        cols = []
        for gen in src.generators:
            rhs = (0,) * (A.rank(q - 2) + B.rank(q - 1)) + tuple(gen)
            sol = solve(big, rhs, ring)
            if sol is None:
                raise AlgebraError("triangle comparison failed to lift a class")
            cols.append(tgt.coords(sol[:a1]))
        return Hom(src, tgt, Matrix.from_columns(cols, tgt.ngens))


def total_differential(X: FilteredComplex, n: int, N: int | None = None) -> TotalDifferential:
    return TotalDifferential(X, n, N)
