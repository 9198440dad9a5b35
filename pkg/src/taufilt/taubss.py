"""The τ-Bockstein spectral sequence of a filtered complex.

For each weight w the bifiltration is evaluated to a single filtered complex
(a slice): level s is X^{w+s} for s >= 0 and X^w below, or in the k-truncated
version the cone of X^{w+max(k,s)} -> X^{w+s}, which is acyclic from s = k on.
Each slice is run through the ordinary page engine; τ̄ of tridegree (0,-1,1)
is the filtration-raising map from slice w to slice w-1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .complexes import ChainMap, Cone
from .exactalg import Hom, Matrix, Subquotient, Vector, span_eq, span_le
from .filtration import CONSTANT, FilteredComplex, FilteredMap, cone_map
from .sseq import INF, SpectralSequence, comparison_and_convergence

Tri = tuple[int, int, int]


class BSSError(ValueError):
    pass


@dataclass
class TriPageData:
    r: int | str
    groups: dict
    diffs: dict
    tbar: dict
    tridegree: tuple[int, int, int]

    def nonzero_cells(self) -> list[Tri]:
        return sorted(k for k, g in self.groups.items() if not g.is_trivial())

    def nonzero_diffs(self) -> list[Tri]:
        return sorted(k for k, h in self.diffs.items() if not h.is_zero())


def full_slice(X: FilteredComplex, w: int) -> FilteredComplex:
    """Weight-w evaluation of the τ-Bockstein filtration: X^{w+s}, constant for s <= 0."""
    L = max(X.s_max - w, 0)
    levels = [X.level(w + s) for s in range(L + 1)]
    trans = [X.transition(w + s) for s in range(1, L + 1)]
    return FilteredComplex(levels, trans, 0, CONSTANT, X.above)


def _cone(X: FilteredComplex, a: int, b: int) -> Cone:
    """Cone of the composite X^a -> X^b, shared between slices."""
    key = ("bss-cone", a, b)
    if key not in X._cache:
        X._cache[key] = Cone(X.composite(a, b))
    return X._cache[key]


def _trunc_cone(X: FilteredComplex, k: int, w: int, s: int) -> Cone:
    # level s of the k-truncated slice: cone(X^{w+max(k,s)} -> X^{w+s});
    # acyclic from s = k on, which keeps the comparison maps strictly commutative
    s = max(s, 0)
    return _cone(X, w + max(k, s), w + s)


def truncated_slice(X: FilteredComplex, k: int, w: int) -> FilteredComplex:
    """Weight-w evaluation of the k-truncated filtration: cone(X^{w+k} -> X^{w+s})
    for 0 <= s < k, and an acyclic cone from s = k on."""
    L = max(k, X.s_max - w) if X.above == CONSTANT else max(k - 1, X.s_max - w)
    levels = [_trunc_cone(X, k, w, s).complex for s in range(L + 1)]
    trans = []
    for s in range(1, L + 1):
        top = X.composite(w + max(k, s), w + max(k, s - 1))
        trans.append(cone_map(_trunc_cone(X, k, w, s), _trunc_cone(X, k, w, s - 1), top, X.transition(w + s)))
    return FilteredComplex(levels, trans, 0, CONSTANT, X.above)


class TauBSS:
    """The full (k=None) or k-truncated τ-Bockstein spectral sequence."""

    def __init__(self, X: FilteredComplex, k: int | None = None, weights: Sequence[int] | None = None):
        if k is not None and k < 1:
            raise BSSError("truncation needs k >= 1")
        self.X, self.k = X, k
        self.weights = list(weights) if weights is not None else list(range(X.s_min - 2, X.s_max + 1))
        self._slices: dict = {}
        self._ss: dict = {}
        self._shift: dict = {}
        self._cache: dict = {}

    @property
    def truncated(self) -> bool:
        return self.k is not None

    def slice(self, w: int) -> FilteredComplex:
        if w not in self._slices:
            self._slices[w] = full_slice(self.X, w) if self.k is None else truncated_slice(self.X, self.k, w)
        return self._slices[w]

    def ss(self, w: int) -> SpectralSequence:
        if w not in self._ss:
            self._ss[w] = SpectralSequence(self.slice(w))
        return self._ss[w]

    @property
    def degrees(self) -> range:
        return self.X.gr_degrees

    def filtrations(self, w: int) -> range:
        return range(0, self.slice(w).s_max + 1)

    @property
    def r_infinity(self) -> int:
        return max(self.ss(w).r_infinity for w in self.weights)

    def cells(self):
        for n in self.degrees:
            for w in self.weights:
                for s in self.filtrations(w):
                    yield n, w, s

    # pages ----------------------------------------------------------------
    def group(self, r, n: int, w: int, s: int) -> Subquotient:
        return self.ss(w).group(r, n, s)

    def differential(self, r, n: int, w: int, s: int) -> Hom:
        """d_r^τ : E_r^{n,w,s} -> E_r^{n-1,w,s+r}."""
        return self.ss(w).differential(r, n, s)

    def _level_shift(self, w: int, s: int) -> ChainMap:
        """Y_w^s -> Y_{w-1}^{s+1}, the map underlying τ̄."""
        key = (w, s)
        if key in self._shift:
            return self._shift[key]
        X = self.X
        src, tgt = self.slice(w).level(s), self.slice(w - 1).level(s + 1)
        if self.k is None:
            m = X.composite(w, w - 1) if s < 0 else ChainMap.identity(src)
        else:
            k = self.k
            c1 = _trunc_cone(X, k, w, s)
            c2 = _trunc_cone(X, k, w - 1, s + 1)
            if s < 0:
                m = cone_map(c1, c2, X.composite(w + k, w - 1 + k), X.composite(w, w - 1))
            else:
                m = cone_map(c1, c2, X.composite(w + max(k, s), w - 1 + max(k, s + 1)), ChainMap.identity(X.level(w + s)))
        self._shift[key] = m
        return m

    def tbar_chain(self, n: int, w: int, s: int) -> Matrix:
        """The chain-level τ̄ : Gr^s(Y_w)_n -> Gr^{s+1}(Y_{w-1})_n."""
        key = ("tbar", w, s)
        if key not in self._cache:
            self._cache[key] = cone_map(
                self.slice(w).gr_cone(s),
                self.slice(w - 1).gr_cone(s + 1),
                self._level_shift(w, s + 1),
                self._level_shift(w, s),
            )
        return self._cache[key].f(n)

    def tbar(self, r, n: int, w: int, s: int) -> Hom:
        """τ̄ : E_r^{n,w,s} -> E_r^{n,w-1,s+1}; raises if it does not descend."""
        return Hom.from_ambient(self.group(r, n, w, s), self.group(r, n, w - 1, s + 1), self.tbar_chain(n, w, s))

    def tbar_power(self, r, m: int, n: int, w: int, s: int) -> Hom:
        """τ̄^m : E_r^{n,w,s} -> E_r^{n,w-m,s+m}."""
        G = self.group(r, n, w, s)
        h = Hom(G, G, Matrix.identity(G.ngens), check=False)
        for i in range(m):
            h = self.tbar(r, n, w - i, s + i).compose(h)
        return h

    def divide(self, r, n: int, w: int, s: int, x: Sequence[int]) -> tuple[Vector, list[Vector]] | None:
        """Write d_r^τ(x) = τ̄^r y: returns (y, generators of the indeterminacy
        ker τ̄^r), or None when d_r^τ(x) is not a τ̄^r-multiple."""
        d = self.differential(r, n, w, s)
        t = self.tbar_power(r, r, n - 1, w + r, s)
        y = t.solve(d.apply(x))
        if y is None:
            return None
        return y, t.kernel()

    def page(self, r) -> TriPageData:
        groups, diffs, tb = {}, {}, {}
        for n, w, s in self.cells():
            groups[(n, w, s)] = self.group(r, n, w, s)
            diffs[(n, w, s)] = self.differential(r, n, w, s)
            if w - 1 in self.weights:
                tb[(n, w, s)] = self.tbar(r, n, w, s)
        rr = r if r == INF else min(r, self.r_infinity)
        return TriPageData(r, groups, diffs, tb, (-1, 0, rr))


def build_bss(X: FilteredComplex, weights: Sequence[int] | None = None) -> TauBSS:
    return TauBSS(X, None, weights)


def build_truncated_bss(X: FilteredComplex, k: int, weights: Sequence[int] | None = None) -> TauBSS:
    if k < 1:
        raise BSSError("truncation needs k >= 1")
    return TauBSS(X, k, weights)


# ---------------------------------------------------------------------------
# maps between τ-Bockstein spectral sequences


class BSSMap:
    """A weightwise map of slices (full -> k-truncated, or k -> m truncated)."""

    def __init__(self, src: TauBSS, tgt: TauBSS):
        if tgt.k is None:
            raise BSSError("the target of a truncation map is truncated")
        if src.k is not None and src.k < tgt.k:
            raise BSSError(f"truncation maps go from k={src.k} down to m <= k, not to m={tgt.k}")
        self.src, self.tgt = src, tgt
        self._maps: dict = {}

    def filtered(self, w: int) -> FilteredMap:
        if w in self._maps:
            return self._maps[w]
        X = self.src.X
        Ys, Yt = self.src.slice(w), self.tgt.slice(w)
        m = self.tgt.k
        maps = {}
        lo = min(Ys.s_min, Yt.s_min) - 1
        hi = max(Ys.s_max, Yt.s_max) + 1
        for s in range(lo, hi + 1):
            ss = max(s, 0)
            c = _trunc_cone(X, m, w, s)
            if self.src.k is None:
                maps[s] = c.inclusion
            else:
                k = self.src.k
                maps[s] = cone_map(_trunc_cone(X, k, w, s), c, X.composite(w + max(k, ss), w + max(m, ss)), ChainMap.identity(X.level(w + ss)))
        f = FilteredMap(Ys, Yt, maps)
        self._maps[w] = f
        return f

    def on_page(self, r, n: int, w: int, s: int) -> Hom:
        f = self.filtered(w)
        return Hom.from_ambient(self.src.group(r, n, w, s), self.tgt.group(r, n, w, s), f.gr_map(s).f(n))

    def on_abutment(self, n: int, w: int) -> Hom:
        """The colimit map H_n(X/τ^k)^w -> H_n(X/τ^m)^w (or from H_n(X^w))."""
        f = self.filtered(w)
        return f.colimit_map().induced(n)


def truncation_map(X: FilteredComplex, k: int | None, m: int, weights=None) -> BSSMap:
    """The map from the k-truncated (k=None: full) τ-BSS to the m-truncated one."""
    if k is not None and k < m:
        raise BSSError(f"truncation needs k >= m, got k={k}, m={m}")
    if m < 1:
        raise BSSError("truncation needs m >= 1")
    src = TauBSS(X, k, weights)
    return BSSMap(src, TauBSS(X, m, weights))


# ---------------------------------------------------------------------------
# comparison with the underlying spectral sequence


@dataclass
class BSSReport:
    clauses: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    indeterminacy: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.clauses.values())

    def fail(self, clause: str, where) -> None:
        self.clauses[clause] = False
        self.failures.append((clause, where))


def _same_group(a: Subquotient, b: Subquotient) -> bool:
    return a.dim == b.dim and span_eq(a.ring, a.dim, a.sub, b.sub) and span_eq(a.ring, a.dim, a.quot, b.quot)


def bss_compare_to_sseq(X: FilteredComplex, bss: TauBSS | None = None) -> BSSReport:
    """Clauses (i)-(v) relating the τ-BSS of X to its underlying spectral sequence."""
    bss = bss or build_bss(X)
    ss = SpectralSequence(X)
    rep = BSSReport({c: True for c in ("i", "ii", "iii", "iv", "v")})
    R = max(bss.r_infinity, ss.r_infinity)
    W = bss.weights

    # (i) differentials out of filtration 0 are the underlying ones
    for w in W:
        for n in bss.degrees:
            for r in range(1, R + 1):
                src = bss.group(r, n, w, 0)
                dt = bss.differential(r, n, w, 0)
                G1 = dt.tgt
                G2 = ss.group(r, n - 1, w + r)
                if not _same_group(G1, G2):
                    rep.fail("i", (r, n, w, "target"))
                    continue
                dx = ss.differential(r, n, w)
                for g, col in zip(src.generators, dt.matrix.columns()):
                    y1 = G1.lift(col)
                    y2 = G2.lift(dx.apply(ss.group(r, n, w).coords(g)))
                    if not G2.equal(y1, y2):
                        rep.fail("i", (r, n, w))

    # (ii) τ̄-structure: descends, is onto, commutes with d, and d lands in τ̄^r-multiples
    for r in range(1, R + 1):
        for n, w, s in bss.cells():
            if w - 1 not in W:
                continue
            try:
                t = bss.tbar(r, n, w, s)
            except Exception:
                rep.fail("ii", (r, n, w, s, "descend"))
                continue
            if not t.is_surjective():
                rep.fail("ii", (r, n, w, s, "onto"))
            d_here = bss.differential(r, n, w, s)
            d_next = bss.differential(r, n, w - 1, s + 1)
            t_tgt = bss.tbar(r, n - 1, w, s + r)
            if not t_tgt.compose(d_here).matrix == d_next.compose(t).matrix:
                rep.fail("ii", (r, n, w, s, "linear"))
            if w + r in W and not d_here.is_zero():
                tp = bss.tbar_power(r, r, n - 1, w + r, s)
                if not span_le(X.ring, d_here.tgt.ngens, d_here.image(), tp.image() + _rel_cols(d_here.tgt)):
                    rep.fail("ii", (r, n, w, s, "divisible"))
                else:
                    rep.indeterminacy[(r, n, w, s)] = tp.kernel()

    # (iii) Z_r^{n,w,s} = Z_r^{n,w+s} and B_r^{n,w,s} = B_{min(r,s)}^{n,w+s}
    for n, w, s in bss.cells():
        E = bss.ss(w).e1(n, s)
        E_x = ss.e1(n, w + s)
        if E.dim != E_x.dim:
            rep.fail("iii", (n, w, s, "ambient"))
            continue
        for r in range(0, R + 1):
            if not span_eq(X.ring, E.dim, bss.ss(w).cycles(n, s, r), ss.cycles(n, w + s, r)):
                rep.fail("iii", (r, n, w, s, "Z"))
            if not span_eq(X.ring, E.dim, bss.ss(w).boundaries(n, s, r), ss.boundaries(n, w + s, min(r, s))):
                rep.fail("iii", (r, n, w, s, "B"))

    # (iv) if x detects θ then τ̄^m x detects τ^m θ
    for n, w, s in bss.cells():
        S = bss.ss(w)
        Einf = S.e_infinity(n, s)
        if Einf.is_trivial():
            continue
        j = S.couple.j(n, s)
        c = S.colimit_hom(n, s)
        for x in Einf.generators:
            alpha = j.solve(S.e1(n, s).coords(x))
            if alpha is None:
                rep.fail("iv", (n, w, s, "lift"))
                continue
            theta = c.tgt.lift(c.apply(alpha))
            if S.detects(n, s, x, theta) is None:
                rep.fail("iv", (n, w, s, "detect"))
            for m in range(1, s + 3):
                if w - m not in W:
                    break
                S2 = bss.ss(w - m)
                tm = X.composite(w, w - m).f(n).apply(theta)
                E2 = S2.e_infinity(n, s + m)
                if not E2.contains(x):
                    rep.fail("iv", (n, w, s, m, "not permanent"))
                elif not E2.is_zero(x):
                    if S2.detects(n, s + m, x, tm) is None:
                        rep.fail("iv", (n, w, s, m))
                else:
                    W2 = S2.colimit_hom(n, s + m).tgt
                    if not span_le(X.ring, W2.dim, [tm], S2.filtration_subgroup(n, s + m + 1)):
                        rep.fail("iv", (n, w, s, m, "higher"))

    # (v) conditional convergence matches, and then strong convergence holds
    slices_complete = all(bss.slice(w).is_complete() for w in W)
    if slices_complete != X.is_complete():
        rep.fail("v", "conditional")
    if slices_complete:
        for w in W:
            if not comparison_and_convergence(bss.slice(w), bss.ss(w)).strongly_convergent:
                rep.fail("v", (w, "strong"))
    return rep


def _rel_cols(G: Subquotient) -> list[Vector]:
    return [tuple(d if i == k else 0 for i in range(G.ngens)) for k, d in enumerate(G.orders) if d]


def truncated_checks(X: FilteredComplex, k: int, weights=None) -> BSSReport:
    """The truncated analogues: E_1 = Z[τ̄]/τ̄^k ⊗ E_1(X), τ̄-linearity,
    agreement with the full τ-BSS for r <= k-1, vanishing of d_r^τ for r >= k,
    and strong convergence to H(X/τ^k)."""
    full = build_bss(X, weights)
    tr = build_truncated_bss(X, k, full.weights)
    phi = BSSMap(full, tr)
    ss = SpectralSequence(X)
    rep = BSSReport({c: True for c in ("E1", "linear", "compare", "vanish", "convergence")})
    R = max(tr.r_infinity, full.r_infinity)
    for n, w, s in tr.cells():
        h = phi.on_page(1, n, w, s)
        if s <= k - 1 and not h.is_iso():
            rep.fail("E1", (n, w, s))
        if not _same_invariants(tr.group(1, n, w, s), ss.e1(n, w + s) if s <= k - 1 else None):
            rep.fail("E1", (n, w, s, "invariants"))
    for r in range(1, R + 1):
        for n, w, s in tr.cells():
            d = tr.differential(r, n, w, s)
            if w - 1 in tr.weights:
                try:
                    t = tr.tbar(r, n, w, s)
                    t2 = tr.tbar(r, n - 1, w, s + r)
                    if t2.compose(d).matrix != tr.differential(r, n, w - 1, s + 1).compose(t).matrix:
                        rep.fail("linear", (r, n, w, s))
                except Exception:
                    rep.fail("linear", (r, n, w, s, "descend"))
            if r >= k and not d.is_zero():
                rep.fail("vanish", (r, n, w, s))
            # φ commutes with d_r; for r <= k-1 it identifies the filtration-0 differential
            hs = phi.on_page(r, n, w, s)
            ht = phi.on_page(r, n - 1, w, s + r)
            if ht.compose(full.differential(r, n, w, s)).matrix != d.compose(hs).matrix:
                rep.fail("compare", (r, n, w, s, "commute"))
            if s == 0 and r <= k - 1 and not hs.is_surjective():
                rep.fail("compare", (r, n, w, s, "onto"))
    for w in tr.weights:
        if not comparison_and_convergence(tr.slice(w), tr.ss(w)).strongly_convergent:
            rep.fail("convergence", w)
    return rep


def _same_invariants(a: Subquotient, b: Subquotient | None) -> bool:
    if b is None:
        return a.is_trivial()
    return a.orders == b.orders


def reindex_tri(page: TriPageData) -> TriPageData:
    """Second-page indexing Ẽ_{r+1}^{n,w,s'} with s' = s + w."""
    lab = lambda k: (k[0], k[1], k[2] + k[1])
    r = page.r if page.r == INF else page.r + 1
    return TriPageData(
        r,
        {lab(k): v for k, v in page.groups.items()},
        {lab(k): v for k, v in page.diffs.items()},
        {lab(k): v for k, v in page.tbar.items()},
        page.tridegree,
    )
