"""Bigraded Z[τ]-modules coming from filtered groups.

M^{n,s} is a finitely generated group for each stem n and filtration s, and
τ : M^{n,s} -> M^{n,s-1}. As for filtered complexes only a window of s is
stored; the profiles say how the module continues on either side.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .exactalg import ZZ, Hom, Matrix, Ring, Subquotient, Vector, span_eq, span_le
from .filtration import CONSTANT, ZERO, FilteredComplex


class TauModuleError(ValueError):
    pass


def coordinate_group(G: Subquotient) -> Subquotient:
    """G rewritten on its own canonical coordinates (same invariants)."""
    n = G.ngens
    eye = Matrix.identity(n).columns()
    rels = [tuple(d if i == k else 0 for i in range(n)) for k, d in enumerate(G.orders) if d]
    C = Subquotient(G.ring, n, eye, rels)
    if C.orders != G.orders or any(C.coords(e) != e for e in eye):
        raise TauModuleError("canonical coordinates are not preserved")
    return C


def direct_sum_groups(groups: Sequence[Subquotient]) -> Subquotient:
    ring = groups[0].ring if groups else ZZ
    dims = [g.dim for g in groups]
    total = sum(dims)
    sub, quot = [], []
    off = 0
    for g, d in zip(groups, dims):
        pad = lambda v: (0,) * off + tuple(v) + (0,) * (total - off - d)
        sub += [pad(v) for v in g.sub]
        quot += [pad(v) for v in g.quot]
        off += d
    return Subquotient(ring, total, sub, quot)


class TauModule:
    """Groups M^{n,s} for s in [s_min, s_max] with τ-maps, plus profiles."""

    def __init__(
        self,
        ring: Ring,
        stems: Sequence[int],
        s_min: int,
        groups: Mapping[tuple[int, int], Subquotient],
        taus: Mapping[tuple[int, int], Hom],
        s_max: int | None = None,
        below: str = CONSTANT,
        above: str = ZERO,
    ):
        self.ring = ring
        self.stems = tuple(stems)
        self.s_min = s_min
        self.s_max = s_max if s_max is not None else max(s for _, s in groups)
        self.below, self.above = below, above
        self._groups = dict(groups)
        self._taus = dict(taus)
        self._zero = Subquotient(ring, 0, [])
        self._cache: dict = {}
        for n in self.stems:
            for s in range(self.s_min, self.s_max + 1):
                if (n, s) not in self._groups:
                    raise TauModuleError(f"missing group at ({n},{s})")
            for s in range(self.s_min + 1, self.s_max + 1):
                t = self._taus.get((n, s))
                if t is None:
                    raise TauModuleError(f"missing τ at ({n},{s})")
                if t.src is not self._groups[(n, s)] or t.tgt is not self._groups[(n, s - 1)]:
                    raise TauModuleError(f"τ at ({n},{s}) has bidegree other than (0,-1)")

    @property
    def window(self) -> range:
        return range(self.s_min, self.s_max + 1)

    def group(self, n: int, s: int) -> Subquotient:
        if n not in self.stems:
            return self._zero
        if s < self.s_min:
            return self._groups[(n, self.s_min)] if self.below == CONSTANT else self._zero
        if s > self.s_max:
            return self._groups[(n, self.s_max)] if self.above == CONSTANT else self._zero
        return self._groups[(n, s)]

    def tau(self, n: int, s: int) -> Hom:
        """τ : M^{n,s} -> M^{n,s-1}."""
        if (n, s) in self._taus and self.s_min < s <= self.s_max:
            return self._taus[(n, s)]
        src, tgt = self.group(n, s), self.group(n, s - 1)
        if src is tgt:
            return Hom(src, tgt, Matrix.identity(src.ngens), check=False)
        return Hom.zero(src, tgt)

    def tau_power(self, n: int, a: int, b: int) -> Hom:
        """τ^{a-b} : M^{n,a} -> M^{n,b}."""
        # outside the window every group repeats, so the composite stabilises
        a = min(a, self.s_max + 1)
        b = max(b, self.s_min - 1)
        key = (n, a, b)
        if key in self._cache:
            return self._cache[key]
        if a <= b:
            G = self.group(n, a)
            h = Hom(G, self.group(n, b), Matrix.identity(G.ngens), check=False) if a == b else None
            if h is None:
                raise TauModuleError("τ-power with negative exponent")
        else:
            h = self.tau(n, b + 1).compose(self.tau_power(n, a, b + 1))
        self._cache[key] = h
        return h

    def is_zero(self) -> bool:
        return all(g.is_trivial() for g in self._groups.values())


def bigraded_homotopy(X: FilteredComplex) -> TauModule:
    """π_{n,s} = H_n(X^s) with τ induced by the transitions."""
    groups, taus = {}, {}
    for n in X.degrees:
        for s in X.window:
            groups[(n, s)] = X.level(s).homology(n)
        for s in range(X.s_min + 1, X.s_max + 1):
            taus[(n, s)] = X.transition(s).induced(n)
    return TauModule(X.ring, list(X.degrees), X.s_min, groups, taus, X.s_max, X.below, X.above)


def gr(M: TauModule) -> dict:
    """Gr^s M^n = M^{n,s} / τ M^{n,s+1} (cokernels, not cones)."""
    out = {}
    for n in M.stems:
        for s in range(M.s_min - 1, M.s_max + 1):
            G = M.group(n, s)
            img = M.tau(n, s + 1).image_ambient()
            out[(n, s)] = Subquotient(M.ring, G.dim, G.sub, list(G.quot) + img)
    return out


def tau_collapse(M: TauModule) -> dict:
    """The colimit along τ, stem by stem."""
    return {n: M.group(n, M.s_min - 1) for n in M.stems}


def tau_invert(M: TauModule) -> TauModule:
    """M[τ^{-1}]: constant in s at the colimit, τ an isomorphism."""
    cols = tau_collapse(M)
    groups = {(n, 0): cols[n] for n in M.stems}
    return TauModule(M.ring, M.stems, 0, groups, {}, 0, CONSTANT, CONSTANT)


def is_tau_invertible(M: TauModule) -> bool:
    return all(M.tau(n, s).is_iso() for n in M.stems for s in range(M.s_min, M.s_max + 2))


def limit_and_lim1(M: TauModule, n: int) -> tuple[Subquotient, Subquotient]:
    """(lim, lim^1) of the tower s -> +inf, computed as ker/coker of
    (a_s) |-> (a_s - τ a_{s+1}) on the stored window plus the first level above."""
    lo, hi = M.s_min, M.s_max + 1
    levels = [coordinate_group(M.group(n, s)) for s in range(lo, hi + 1)]
    src = direct_sum_groups(levels)
    tgt = direct_sum_groups(levels[:-1])
    offs = [0]
    for g in levels:
        offs.append(offs[-1] + g.ngens)
    rows = [[0] * src.dim for _ in range(tgt.dim)]
    for i, s in enumerate(range(lo, hi)):
        for k in range(levels[i].ngens):
            rows[offs[i] + k][offs[i] + k] += 1
        t = M.tau_power(n, s + 1, s).matrix
        for a in range(t.nrows):
            for b in range(t.ncols):
                rows[offs[i] + a][offs[i + 1] + b] -= t[a, b]
    delta = Hom.from_ambient(src, tgt, Matrix(rows, tgt.dim, src.dim))
    return delta.kernel_group(), delta.cokernel_group()


@dataclass
class CompletenessReport:
    complete: bool
    per_stem: dict


def is_derived_complete(M: TauModule) -> CompletenessReport:
    per = {}
    for n in M.stems:
        lim, lim1 = limit_and_lim1(M, n)
        per[n] = {"lim": lim.describe(), "lim1": lim1.describe(), "complete": lim.is_trivial() and lim1.is_trivial()}
    return CompletenessReport(all(v["complete"] for v in per.values()), per)


@dataclass
class AdicReport:
    """Limit data of the x-adic tower ... -x-> A -x-> A."""

    lim: Subquotient
    lim1_vanishes: bool
    complete: bool


def adic_tower_completeness(A: Subquotient, x: int) -> AdicReport:
    """Exact (lim, lim^1) data for the periodic tower of ×x on a f.g. group.

    On the torsion part the limit is the stable image of ×x (on which x acts
    bijectively) and lim^1 vanishes; a free summand contributes Z to the limit
    if x = ±1, and otherwise a nonzero lim^1 (an x-adic integers quotient,
    which is not finitely generated and is only recorded as nonvanishing).
    """
    if x == 0:
        raise TauModuleError("x must be nonzero")
    C = coordinate_group(A)
    tors_idx = [i for i, d in enumerate(C.orders) if d]
    free = C.free_rank
    tors = [C.generators[i] for i in tors_idx]
    order = 1
    for i in tors_idx:
        order *= C.orders[i]
    N = max(1, order.bit_length())
    img = [tuple((x**N) * c for c in v) for v in tors]
    stable = Subquotient(A.ring, C.dim, img + list(C.quot), C.quot)
    if abs(x) == 1 and free:
        lim = Subquotient(A.ring, C.dim, img + [C.generators[i] for i, d in enumerate(C.orders) if d == 0] + list(C.quot), C.quot)
        lim1_ok = True
    else:
        lim = stable
        lim1_ok = free == 0
    return AdicReport(lim, lim1_ok, lim.is_trivial() and lim1_ok)


def adic_tau_module(A: Subquotient, x: int, s_max: int) -> TauModule:
    """The x-adic filtration of A on [0, s_max], constant below, zero above."""
    C = coordinate_group(A)
    groups = {(0, s): C for s in range(0, s_max + 1)}
    taus = {(0, s): Hom(C, C, Matrix.identity(C.ngens).scale(x)) for s in range(1, s_max + 1)}
    return TauModule(A.ring, [0], 0, groups, taus, s_max, CONSTANT, ZERO)


def induced_strict_filtration(M: TauModule) -> TauModule:
    """F^s = im(M^{n,s} -> M^{n,-inf}) as subgroups of the colimit."""
    groups, taus = {}, {}
    cols = tau_collapse(M)
    for n in M.stems:
        W = cols[n]
        for s in M.window:
            img = M.tau_power(n, s, M.s_min - 1).image_ambient()
            groups[(n, s)] = Subquotient(M.ring, W.dim, img + list(W.quot), W.quot)
        for s in range(M.s_min + 1, M.s_max + 1):
            taus[(n, s)] = Hom.from_ambient(groups[(n, s)], groups[(n, s - 1)], Matrix.identity(W.dim))
    return TauModule(M.ring, M.stems, M.s_min, groups, taus, M.s_max, CONSTANT if M.below == CONSTANT else ZERO, M.above)


def is_strict(M: TauModule) -> bool:
    """All τ injective; cross-checked against the absence of τ-power torsion."""
    injective = all(M.tau(n, s).is_injective() for n in M.stems for s in range(M.s_min, M.s_max + 2))
    L = M.s_max - M.s_min + 2
    no_torsion = all(
        M.tau_power(n, s, s - k).is_injective() for n in M.stems for s in range(M.s_min, M.s_max + 2) for k in range(1, L + 1)
    )
    if injective != no_torsion:
        raise TauModuleError("injectivity and τ-power torsion disagree")
    return injective


# ---------------------------------------------------------------------------
# strict filtrations and the isomorphism criterion


class StrictFiltration:
    """Subgroups F^s (s_min <= s <= s_max) of an ambient group; constant below,
    zero or constant above."""

    def __init__(self, ambient: Subquotient, s_min: int, subgroups: Sequence[Sequence[Vector]], above: str = ZERO):
        self.ambient = ambient
        self.ring = ambient.ring
        self.s_min = s_min
        self.s_max = s_min + len(subgroups) - 1
        self.above = above
        q = list(ambient.quot)
        self._F = [Subquotient(self.ring, ambient.dim, list(g) + q, q) for g in subgroups]
        for s in range(len(self._F) - 1):
            if not span_le(self.ring, ambient.dim, self._F[s + 1].sub, self._F[s].sub):
                raise TauModuleError(f"F^{s_min + s + 1} is not contained in F^{s_min + s}")
        for F in self._F:
            if not span_le(self.ring, ambient.dim, F.sub, ambient.sub):
                raise TauModuleError("filtration subgroup is not inside the ambient group")
        self._zero = Subquotient(self.ring, ambient.dim, q, q)

    def F(self, s: int) -> Subquotient:
        if s < self.s_min:
            return self._F[0]
        if s > self.s_max:
            return self._F[-1] if self.above == CONSTANT else self._zero
        return self._F[s - self.s_min]

    def F_infinity(self) -> Subquotient:
        return self._F[-1] if self.above == CONSTANT else self._zero

    def gr(self, s: int) -> Subquotient:
        return Subquotient(self.ring, self.ambient.dim, self.F(s).sub, self.F(s + 1).sub)

    def exhaustive(self) -> bool:
        return span_eq(self.ring, self.ambient.dim, self.F(self.s_min - 1).sub, self.ambient.sub)

    def as_tau_module(self, stem: int = 0) -> TauModule:
        groups = {(stem, s): self.F(s) for s in range(self.s_min, self.s_max + 1)}
        taus = {
            (stem, s): Hom.from_ambient(groups[(stem, s)], groups[(stem, s - 1)], Matrix.identity(self.ambient.dim))
            for s in range(self.s_min + 1, self.s_max + 1)
        }
        return TauModule(self.ring, [stem], self.s_min, groups, taus, self.s_max, CONSTANT, self.above)


@dataclass
class BoardmanVerdict:
    hypotheses: dict
    iso: bool | None = None
    filtration_isos: bool | None = None

    @property
    def all_hypotheses(self) -> bool:
        return all(self.hypotheses.values())

    def failed(self) -> list[str]:
        return [k for k, v in self.hypotheses.items() if not v]


def boardman_iso_check(A: StrictFiltration, B: StrictFiltration, f: Matrix) -> BoardmanVerdict:
    """Check the four hypotheses of the filtered isomorphism criterion for the
    ambient map f : A -> B and, when they hold, certify the conclusion."""
    for s in range(min(A.s_min, B.s_min) - 1, max(A.s_max, B.s_max) + 2):
        for v in A.F(s).sub:
            if not B.F(s).contains(f.apply(v)):
                raise TauModuleError(f"map does not respect filtrations at s={s}")
    lo, hi = min(A.s_min, B.s_min) - 1, max(A.s_max, B.s_max) + 1
    h1 = Hom.from_ambient(A.F_infinity(), B.F_infinity(), f).is_iso()
    _, lim1 = limit_and_lim1(A.as_tau_module(), 0)
    h2 = lim1.is_trivial()
    h3 = all(Hom.from_ambient(A.gr(s), B.gr(s), f).is_iso() for s in range(lo, hi + 1))
    h4 = A.exhaustive() and B.exhaustive()
    hyp = {"F_infinity_iso": h1, "lim1_vanishes": h2, "gr_iso": h3, "exhaustive": h4}
    v = BoardmanVerdict(hyp)
    if v.all_hypotheses:
        v.iso = Hom.from_ambient(A.ambient, B.ambient, f).is_iso()
        v.filtration_isos = all(Hom.from_ambient(A.F(s), B.F(s), f).is_iso() for s in range(lo, hi + 1))
    return v


# ---------------------------------------------------------------------------
# filtered rings and their Z[τ]-algebra presentations


@dataclass
class RingGenerator:
    name: str
    stem: int
    filtration: int
    value: Vector  # coordinates in the stem group
    ascii: str = ""

    @property
    def key(self) -> str:
        return self.ascii or self.name


class FilteredRing:
    """A commutative graded ring, truncated to stems <= n_max, with a strict
    filtration F^s A_n given on [s_lo, s_hi] (constant below, zero above).

    ``groups[n]`` gives the invariant factors of A_n; elements are coordinate
    vectors. ``mult[(a, b)]`` is a nested list: mult[(a,b)][i][j] is the
    product of basis elements i of A_a and j of A_b, as a vector in A_{a+b}.
    """

    def __init__(
        self,
        groups: Mapping[int, Sequence[int]],
        filtration: Mapping[int, Mapping[int, Sequence[Vector]]],
        mult: Mapping[tuple[int, int], Sequence[Sequence[Vector]]],
        generators: Sequence[RingGenerator],
        s_lo: int,
        s_hi: int,
        unit: Vector = (1,),
        ring: Ring = ZZ,
    ):
        self.ring = ring
        self.n_max = max(groups)
        self.orders = {n: tuple(v) for n, v in groups.items()}
        self.s_lo, self.s_hi = s_lo, s_hi
        self.generators = list(generators)
        self.unit = tuple(unit)
        self.mult = {k: [[tuple(x) for x in row] for row in v] for k, v in mult.items()}
        self.ambient = {n: self._ambient(n) for n in self.orders}
        self.F: dict[tuple[int, int], Subquotient] = {}
        for n in self.orders:
            A = self.ambient[n]
            for s in range(s_lo, s_hi + 1):
                gens = [tuple(v) for v in filtration.get(n, {}).get(s, [])]
                self.F[(n, s)] = Subquotient(ring, A.dim, gens + list(A.quot), A.quot)
        for g in self.generators:
            if g.stem not in self.orders:
                raise TauModuleError(f"generator {g.name} lies outside the stem window")
            if not self.filtration_group(g.stem, g.filtration).contains(g.value):
                raise TauModuleError(f"generator {g.name} is not in filtration {g.filtration}")

    def _ambient(self, n: int) -> Subquotient:
        d = len(self.orders[n])
        eye = Matrix.identity(d).columns()
        rels = [tuple(o if i == k else 0 for i in range(d)) for k, o in enumerate(self.orders[n]) if o]
        return Subquotient(self.ring, d, eye, rels)

    def filtration_group(self, n: int, s: int) -> Subquotient:
        if n not in self.orders:
            return Subquotient(self.ring, 0, [])
        s = max(s, self.s_lo)
        if s > self.s_hi:
            A = self.ambient[n]
            return Subquotient(self.ring, A.dim, A.quot, A.quot)
        return self.F[(n, s)]

    def multiply(self, a: int, x: Vector, b: int, y: Vector) -> Vector | None:
        """Product of x in A_a and y in A_b; None above the stem window."""
        if a + b > self.n_max:
            return None
        if a == 0 and x == self.unit:
            return tuple(y)
        if b == 0 and y == self.unit:
            return tuple(x)
        table = self.mult.get((a, b))
        if table is None:
            table = self.mult.get((b, a))
            if table is None:
                raise TauModuleError(f"no multiplication table for stems ({a},{b})")
            sign = -1 if (a * b) % 2 else 1
            x, y = y, x
        else:
            sign = 1
        orders = self.orders[a + b]
        out = [0] * len(orders)
        for i, xi in enumerate(x):
            if xi:
                for j, yj in enumerate(y):
                    if yj:
                        for k, c in enumerate(table[i][j]):
                            out[k] += sign * xi * yj * c
        return tuple(self.ring.residue(v, d) for v, d in zip(out, orders))

    def same(self, n: int, x: Vector, y: Vector) -> bool:
        return self.ambient[n].equal(x, y)

    def tau_module(self) -> TauModule:
        groups, taus = {}, {}
        for n in self.orders:
            for s in range(self.s_lo, self.s_hi + 1):
                groups[(n, s)] = self.F[(n, s)]
            for s in range(self.s_lo + 1, self.s_hi + 1):
                taus[(n, s)] = Hom.from_ambient(groups[(n, s)], groups[(n, s - 1)], Matrix.identity(self.ambient[n].dim))
        return TauModule(self.ring, sorted(self.orders), self.s_lo, groups, taus, self.s_hi, CONSTANT, ZERO)

    def check_axioms(self) -> dict:
        """Associativity, unitality, graded commutativity and subadditivity on basis elements."""
        basis = {n: Matrix.identity(len(self.orders[n])).columns() for n in self.orders}
        assoc = comm = unit = True
        for a, b in itertools.product(self.orders, repeat=2):
            for x in basis[a]:
                for y in basis[b]:
                    xy = self.multiply(a, x, b, y)
                    yx = self.multiply(b, y, a, x)
                    if xy is not None:
                        sign = -1 if (a * b) % 2 else 1
                        if not self.same(a + b, tuple(sign * c for c in yx), xy):
                            comm = False
                    for c in self.orders:
                        if a + b + c > self.n_max:
                            continue
                        for z in basis[c]:
                            l = self.multiply(a + b, xy, c, z)
                            r = self.multiply(a, x, b + c, self.multiply(b, y, c, z))
                            if not self.same(a + b + c, l, r):
                                assoc = False
        for n in self.orders:
            for x in basis[n]:
                if not self.same(n, self.multiply(0, self.unit, n, x), x):
                    unit = False
        sub = True
        for a, b in itertools.product(self.orders, repeat=2):
            if a + b > self.n_max:
                continue
            for s in range(self.s_lo, self.s_hi + 1):
                for t in range(self.s_lo, self.s_hi + 1 - max(s, 0)):
                    # F^{s+t} is only known while s+t stays inside the window
                    if s + t > self.s_hi:
                        continue
                    for x in self.filtration_group(a, s).sub:
                        for y in self.filtration_group(b, t).sub:
                            if not self.filtration_group(a + b, s + t).contains(self.multiply(a, x, b, y)):
                                sub = False
        return {"associative": assoc, "commutative": comm, "unital": unit, "subadditive": sub}


Monomial = tuple[int, tuple[int, ...]]  # (power of τ, exponents of the generators)


@dataclass
class RingPresentation:
    generators: list
    relations: list  # list of (bidegree, {monomial: coefficient})
    window: tuple
    surjective: dict = field(default_factory=dict)
    complete: dict = field(default_factory=dict)

    def format_monomial(self, m: Monomial) -> str:
        a, e = m
        parts = []
        if a:
            parts.append("τ" if a == 1 else f"τ^{a}")
        for g, k in zip(self.generators, e):
            if k:
                parts.append(g.name if k == 1 else f"{g.name}^{k}")
        return "".join(parts) or "1"

    def format_relation(self, rel: dict) -> str:
        terms = []
        for m, c in sorted(rel.items(), key=lambda mc: (-sum(mc[0][1]), mc[0])):
            mono = self.format_monomial(m)
            coef = "" if abs(c) == 1 and mono != "1" else str(abs(c))
            body = coef + ("" if mono == "1" and coef else mono)
            terms.append(("- " if c < 0 else "+ ") + body)
        s = " ".join(terms)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    def describe(self) -> str:
        gens = ",".join(["τ"] + [g.name for g in self.generators])
        rels = ", ".join(self.format_relation(r) for _, r in self.relations)
        return f"Z[{gens}]/({rels})" if rels else f"Z[{gens}]"


class PresentationEngine:
    """Monomials, evaluation and ideal spans for a filtered ring in a window."""

    def __init__(self, R: FilteredRing, n_max: int | None = None, s_max: int | None = None):
        self.R = R
        self.gens = R.generators
        self.n_max = R.n_max if n_max is None else n_max
        self.s_max = R.s_hi if s_max is None else s_max
        for g in self.gens:
            if g.stem < 0 or (g.stem == 0 and g.filtration <= 0):
                raise TauModuleError(f"generator {g.name} makes the monomial window infinite")

    def free_monomials(self, n: int) -> list[tuple[tuple[int, ...], int]]:
        """τ-free monomials of stem n and filtration <= s_max, with their filtration."""
        out = []

        def rec(i, exps, stem, filt):
            if i == len(self.gens):
                if stem == n:
                    out.append((tuple(exps), filt))
                return
            g = self.gens[i]
            k = 0
            while stem + k * g.stem <= n and filt + k * g.filtration <= self.s_max:
                rec(i + 1, exps + [k], stem + k * g.stem, filt + k * g.filtration)
                k += 1
                if g.stem == 0 and g.filtration == 0:
                    break

        rec(0, [], 0, 0)
        return out

    def monomials(self, n: int, s: int) -> list[Monomial]:
        return sorted((f - s, e) for e, f in self.free_monomials(n) if f >= s)

    def evaluate_free(self, e: tuple[int, ...]) -> tuple[int, Vector] | None:
        stem, val = 0, self.R.unit
        for g, k in zip(self.gens, e):
            for _ in range(k):
                val = self.R.multiply(stem, val, g.stem, g.value)
                stem += g.stem
                if val is None:
                    return None
        return stem, val

    def evaluation(self, n: int, s: int) -> tuple[list[Monomial], Hom]:
        M = self.R.filtration_group(n, s)
        monos = self.monomials(n, s)
        cols = []
        for a, e in monos:
            _, v = self.evaluate_free(e)
            cols.append(M.coords(v))
        V = Subquotient(self.R.ring, len(monos), Matrix.identity(len(monos)).columns())
        return monos, Hom(V, M, Matrix.from_columns(cols, M.ngens))

    def ideal_span(self, relations, n: int, s: int, monos: list[Monomial]) -> list[Vector]:
        """τ^a · m · r for r in relations, landing in bidegree (n, s) with every
        term inside the window."""
        index = {m: i for i, m in enumerate(monos)}
        out = []
        for (rn, rs), rel in relations:
            dn = n - rn
            if dn < 0:
                continue
            for e, f in self.free_monomials(dn):
                a = rs + f - s
                if a < 0:
                    continue
                v = [0] * len(monos)
                ok = True
                for (b, e2), c in rel.items():
                    key = (a + b, tuple(x + y for x, y in zip(e, e2)))
                    if key not in index:
                        ok = False
                        break
                    v[index[key]] += c
                if ok and any(v):
                    out.append(tuple(v))
        return out


def present_filtered_ring(R: FilteredRing, n_max: int | None = None, s_window: tuple[int, int] | None = None) -> RingPresentation:
    """Find relations for Z[τ, generators] -> π_{*,*} and certify, per
    bidegree in the window, surjectivity and that the relations generate the
    kernel."""
    eng = PresentationEngine(R, n_max)
    s_lo, s_hi = s_window if s_window else (R.s_lo, R.s_hi)
    cells = [(n, s) for n in range(0, eng.n_max + 1) for s in range(s_hi, s_lo - 1, -1)]
    relations: list = []
    surj = {}
    for n, s in cells:
        monos, ev = eng.evaluation(n, s)
        surj[(n, s)] = ev.is_surjective()
        if not surj[(n, s)]:
            raise TauModuleError(f"generators do not generate the ring in bidegree ({n},{s}); window too small to certify")
        ker = ev.kernel()
        span = eng.ideal_span(relations, n, s, monos)
        for v in ker:
            if not span_le(R.ring, len(monos), [v], span):
                rel = {m: c for m, c in zip(monos, v) if c}
                lead = min(rel, key=lambda m: (-sum(m[1]), m))
                if rel[lead] < 0:
                    rel = {m: -c for m, c in rel.items()}
                relations.append(((n, s), rel))
                span = eng.ideal_span(relations, n, s, monos)
    # drop relations implied by the others
    i = 0
    while i < len(relations):
        (n, s), rel = relations[i]
        others = relations[:i] + relations[i + 1 :]
        monos = eng.monomials(n, s)
        index = {m: k for k, m in enumerate(monos)}
        v = [0] * len(monos)
        for m, c in rel.items():
            v[index[m]] += c
        if span_le(R.ring, len(monos), [tuple(v)], eng.ideal_span(others, n, s, monos)):
            relations.pop(i)
        else:
            i += 1
    complete = {}
    for n, s in cells:
        monos, ev = eng.evaluation(n, s)
        complete[(n, s)] = span_eq(R.ring, len(monos), ev.kernel(), eng.ideal_span(relations, n, s, monos))
    return RingPresentation(eng.gens, relations, (eng.n_max, s_lo, s_hi), surj, complete)


def parse_relation(text_terms: Mapping[str, int], gens: Sequence[RingGenerator]) -> tuple[tuple[int, int], dict]:
    """Build a relation from {"tau^2 eta^3": -1, "nu": 4} style terms."""
    names = {g.name: i for i, g in enumerate(gens)} | {g.key: i for i, g in enumerate(gens)}
    rel = {}
    bideg = None
    for term, c in text_terms.items():
        a = 0
        e = [0] * len(gens)
        for tok in term.split():
            base, _, pw = tok.partition("^")
            k = int(pw) if pw else 1
            if base in ("tau", "τ"):
                a += k
            elif base == "1":
                continue
            else:
                if base not in names:
                    raise TauModuleError(f"unknown generator {base!r}")
                e[names[base]] += k
        stem = sum(g.stem * k for g, k in zip(gens, e))
        filt = sum(g.filtration * k for g, k in zip(gens, e)) - a
        if bideg is None:
            bideg = (stem, filt)
        elif bideg != (stem, filt):
            raise TauModuleError(f"relation is not homogeneous: {term}")
        rel[(a, tuple(e))] = rel.get((a, tuple(e)), 0) + c
    return bideg, rel


def ideals_agree(R: FilteredRing, rels_a, rels_b, n_max: int, s_window: tuple[int, int]) -> bool:
    eng = PresentationEngine(R, n_max)
    for n in range(0, n_max + 1):
        for s in range(s_window[0], s_window[1] + 1):
            monos = eng.monomials(n, s)
            if not span_eq(R.ring, len(monos), eng.ideal_span(rels_a, n, s, monos), eng.ideal_span(rels_b, n, s, monos)):
                return False
    return True


def subadditive_example() -> FilteredRing:
    """Z[η,ν]/(2η, 8ν, 4ν = η^3) in stems <= 3, η and ν in filtration 1."""
    groups = {0: [0], 1: [2], 2: [2], 3: [8]}
    filt = {
        0: {s: [(1,)] if s <= 0 else [] for s in range(-1, 5)},
        1: {s: [(1,)] if s <= 1 else [] for s in range(-1, 5)},
        2: {s: [(1,)] if s <= 2 else [] for s in range(-1, 5)},
        3: {s: [(1,)] if s <= 1 else ([(4,)] if s <= 3 else []) for s in range(-1, 5)},
    }
    mult = {
        (0, 0): [[(1,)]],
        (1, 1): [[(1,)]],  # η·η = η²
        (1, 2): [[(4,)]],  # η·η² = η³ = 4ν
    }
    gens = [RingGenerator("η", 1, 1, (1,), "eta"), RingGenerator("ν", 3, 1, (1,), "nu")]
    return FilteredRing(groups, filt, mult, gens, -1, 4)


def padic_example(p: int, s_hi: int = 4) -> FilteredRing:
    """Z with F^s = p^s Z (s >= 0), stem 0 only."""
    groups = {0: [0]}
    filt = {0: {s: [(p ** max(s, 0),)] for s in range(-1, s_hi + 1)}}
    gens = [RingGenerator("p̃", 0, 1, (p,), "pt")]
    return FilteredRing(groups, filt, {(0, 0): [[(1,)]]}, gens, -1, s_hi)


def trivial_example(s_hi: int = 3) -> FilteredRing:
    groups = {0: [0]}
    filt = {0: {s: [(1,)] if s <= 0 else [] for s in range(-1, s_hi + 1)}}
    return FilteredRing(groups, filt, {(0, 0): [[(1,)]]}, [], -1, s_hi)
