"""Cosimplicial abelian groups and complexes, truncated at a level m.

Levels A^0..A^m are chain complexes on a common degree window (an abelian
group is a complex concentrated in degree 0). Cofaces d^i : A^{k-1} -> A^k
and, for cosimplicial data, codegeneracies s^i : A^{k+1} -> A^k are chain
maps. Totalisation uses the homological convention Tot_n = ⊕_k M^k_{n+k}
with differential (-1)^k d + δ, so codegree k sits in total degree q - k.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb
from typing import Callable, Mapping, Sequence

from .complexes import ChainComplex, ChainMap, ComplexError, subcomplex, truncate_above
from .exactalg import GF, ZZ, Hom, Matrix, Ring, Subquotient, kernel_basis, rank, solve
from .filtration import CONSTANT, ZERO, FilteredComplex, cone_map
from .sseq import SpectralSequence

NORMALIZED = "normalized"
UNNORMALIZED = "unnormalized"


class CosimplicialError(ValueError):
    pass


class CobarBoundsError(CosimplicialError):
    pass


def _rewrap(f: ChainMap | Matrix, src: ChainComplex, tgt: ChainComplex, check: bool = True) -> ChainMap:
    if isinstance(f, Matrix):
        if src.lo != src.hi:
            raise CosimplicialError("bare matrices are only accepted for levels in a single degree")
        return ChainMap(src, tgt, {src.lo: f}, check=check)
    return ChainMap(src, tgt, {n: f.f(n) for n in src.degrees}, check=check)


def _sum(maps: Sequence[ChainMap], src: ChainComplex, tgt: ChainComplex) -> ChainMap:
    out = ChainMap.zero(src, tgt)
    for f in maps:
        out = out + f
    return out


class CosimplicialData:
    """A (semi)cosimplicial object truncated at level m.

    ``cofaces[(k, i)]`` is d^i : A^{k-1} -> A^k (1 <= k <= m, 0 <= i <= k);
    ``codegeneracies[(k, i)]`` is s^i : A^{k+1} -> A^k (0 <= i <= k < m).
    Passing no codegeneracies gives semicosimplicial data.
    """

    def __init__(
        self,
        levels: Sequence[ChainComplex],
        cofaces: Mapping[tuple[int, int], ChainMap | Matrix],
        codegeneracies: Mapping[tuple[int, int], ChainMap | Matrix] | None = None,
        check: bool = True,
    ):
        if not levels:
            raise CosimplicialError("at least one level is needed")
        ring = levels[0].ring
        lo = min(c.lo for c in levels)
        hi = max(c.hi for c in levels)
        if any(c.ring != ring for c in levels):
            raise CosimplicialError("levels live over different rings")
        self.ring: Ring = ring
        self.lo, self.hi = lo, hi
        self.m = len(levels) - 1
        self.levels = tuple(c if (c.lo, c.hi) == (lo, hi) else c.padded(lo, hi) for c in levels)
        self._d: dict = {}
        self._s: dict | None = None
        try:
            for k in range(1, self.m + 1):
                for i in range(k + 1):
                    if (k, i) not in cofaces:
                        raise CosimplicialError(f"coface d^{i} into level {k} is missing")
                    self._d[(k, i)] = _rewrap(cofaces[(k, i)], self.levels[k - 1], self.levels[k], check)
            if codegeneracies is not None:
                self._s = {}
                for k in range(self.m):
                    for i in range(k + 1):
                        if (k, i) not in codegeneracies:
                            raise CosimplicialError(f"codegeneracy s^{i} into level {k} is missing")
                        self._s[(k, i)] = _rewrap(codegeneracies[(k, i)], self.levels[k + 1], self.levels[k], check)
        except ComplexError as e:
            raise CosimplicialError(f"structure map is not a chain map: {e}") from None
        self._cache: dict = {}
        if check:
            bad = self.identity_failures()
            if bad:
                raise CosimplicialError(bad[0])

    @classmethod
    def from_groups(cls, ring: Ring, ranks: Sequence[int], cofaces, codegeneracies=None, check: bool = True):
        """Levels Z^{r_k} in degree 0 with structure maps given as matrices."""
        levels = [ChainComplex(ring, 0, [r]) for r in ranks]
        return cls(levels, cofaces, codegeneracies, check)

    def __repr__(self):
        kind = "cosimplicial" if self.is_cosimplicial else "semicosimplicial"
        return f"CosimplicialData({kind}, {self.ring!r}, m={self.m}, degrees [{self.lo},{self.hi}])"

    @property
    def is_cosimplicial(self) -> bool:
        return self._s is not None

    @property
    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def level(self, k: int) -> ChainComplex:
        return self.levels[k]

    def rank(self, k: int, q: int) -> int:
        return self.levels[k].rank(q)

    def d(self, k: int, i: int) -> ChainMap:
        """d^i : A^{k-1} -> A^k."""
        return self._d[(k, i)]

    def s(self, k: int, i: int) -> ChainMap:
        """s^i : A^{k+1} -> A^k."""
        if self._s is None:
            raise CosimplicialError("semicosimplicial data has no codegeneracies")
        return self._s[(k, i)]

    def semi(self) -> "CosimplicialData":
        """The underlying semicosimplicial object."""
        return CosimplicialData(self.levels, self._d, None, check=False)

    def injection(self, iota: Sequence[int], k_out: int) -> ChainMap:
        """A(ι) for an injection ι : [k] -> [k_out] given by its values."""
        k = len(iota) - 1
        missed = [v for v in range(k_out + 1) if v not in set(iota)]
        f = ChainMap.identity(self.levels[k])
        level = k
        for j in missed:  # increasing order
            f = self.d(level + 1, j).compose(f)
            level += 1
        return f

    def coboundary(self, k: int) -> ChainMap:
        """δ = Σ (-1)^i d^i : A^k -> A^{k+1}."""
        key = ("delta", k)
        if key not in self._cache:
            self._cache[key] = _sum(
                [self.d(k + 1, i).scaled(-1 if i % 2 else 1) for i in range(k + 2)],
                self.levels[k],
                self.levels[k + 1],
            )
        return self._cache[key]

    # identities ---------------------------------------------------------
    def identity_failures(self) -> list[str]:
        out = []
        m = self.m
        for k in range(1, m):  # d^j d^i = d^i d^{j-1}, i < j, A^{k-1} -> A^{k+1}
            for j in range(k + 2):
                for i in range(j):
                    if not self.d(k + 1, j).compose(self.d(k, i)).equals(self.d(k + 1, i).compose(self.d(k, j - 1))):
                        out.append(f"d^{j} d^{i} != d^{i} d^{j - 1} out of level {k - 1}")
        if self._s is None:
            return out
        for k in range(m - 1):  # s^j s^i = s^i s^{j+1}, i <= j, A^{k+2} -> A^k
            for j in range(k + 1):
                for i in range(j + 1):
                    if not self.s(k, j).compose(self.s(k + 1, i)).equals(self.s(k, i).compose(self.s(k + 1, j + 1))):
                        out.append(f"s^{j} s^{i} != s^{i} s^{j + 1} out of level {k + 2}")
        for k in range(m):  # s^j d^i : A^k -> A^{k+1} -> A^k
            for j in range(k + 1):
                for i in range(k + 2):
                    lhs = self.s(k, j).compose(self.d(k + 1, i))
                    if i in (j, j + 1):
                        rhs = ChainMap.identity(self.levels[k])
                    elif i < j:
                        rhs = self.d(k, i).compose(self.s(k - 1, j - 1))
                    else:
                        rhs = self.d(k, i - 1).compose(self.s(k - 1, j))
                    if not lhs.equals(rhs):
                        out.append(f"s^{j} d^{i} identity fails on level {k}")
        return out

    # normalisation ------------------------------------------------------
    def normalized(self, k: int) -> ChainMap:
        """The inclusion N^k = ∩_{i<k} ker s^i -> A^k as a chain map."""
        if self._s is None:
            raise CosimplicialError("normalized cochains need codegeneracies")
        key = ("N", k)
        if key not in self._cache:
            A = self.levels[k]
            if k == 0:
                inc = ChainMap.identity(A)
            else:
                bases = {}
                for q in self.degrees:
                    stack = self.s(k - 1, 0).f(q)
                    for i in range(1, k):
                        stack = stack.vstack(self.s(k - 1, i).f(q))
                    bases[q] = kernel_basis(stack, self.ring)
                _, inc = subcomplex(A, bases)
            self._cache[key] = inc
        return self._cache[key]

    def columns(self, mode: str) -> tuple[list[ChainMap], list[ChainMap]]:
        """Inclusions M^k -> A^k and the restricted coboundaries M^k -> M^{k+1}."""
        if mode not in (NORMALIZED, UNNORMALIZED):
            raise CosimplicialError(f"unknown cochain mode {mode!r}")
        key = ("cols", mode)
        if key not in self._cache:
            if mode == NORMALIZED:
                incs = [self.normalized(k) for k in range(self.m + 1)]
            else:
                incs = [ChainMap.identity(c) for c in self.levels]
            deltas = [restrict(self.coboundary(k), incs[k], incs[k + 1]) for k in range(self.m)]
            self._cache[key] = (incs, deltas)
        return self._cache[key]


def restrict(f: ChainMap, inc_src: ChainMap, inc_tgt: ChainMap) -> ChainMap:
    """The map of subcomplexes induced by f, found by solving degreewise."""
    src, tgt = inc_src.src, inc_tgt.src
    ring = f.ring
    mats = {}
    for q in src.degrees:
        P = inc_tgt.f(q)
        cols = []
        for v in (f.f(q) @ inc_src.f(q)).columns():
            x = _solve(P, v, ring)
            if x is None:
                raise CosimplicialError(f"map does not preserve the subcomplex in degree {q}")
            cols.append(x)
        mats[q] = Matrix.from_columns(cols, tgt.rank(q)) if cols else Matrix.zero(tgt.rank(q), 0)
    return ChainMap(src, tgt, mats, check=False)


def _solve(P: Matrix, v, ring: Ring):
    if P.ncols == 0:
        return () if not any(ring.reduce(a) for a in v) else None
    return solve(P, v, ring)


# cochains ------------------------------------------------------------------
def cochains(A: CosimplicialData, mode: str = NORMALIZED, q: int | None = None, certify: bool = True) -> ChainComplex:
    """The cochain complex of the slice of A in chain degree q.

    Homological degree -k holds M^k_q; the differential is Σ (-1)^i d^i.
    For normalized cochains of cosimplicial data the inclusion into the
    unnormalized complex is checked to be a quasi-isomorphism in cochain
    degrees below m (the top degree sees the truncation).
    """
    if mode == NORMALIZED and not A.is_cosimplicial:
        raise CosimplicialError("normalized cochains requested on semicosimplicial data")
    if q is None:
        if A.lo != A.hi:
            raise CosimplicialError("choose a chain degree q for levels that are complexes")
        q = A.lo
    C = _cochain_complex(A, mode, q)
    if certify and mode == NORMALIZED and not _qiso_below_top(A, q):
        raise CosimplicialError(f"N -> C is not a quasi-isomorphism in chain degree {q}")
    return C


def _cochain_complex(A: CosimplicialData, mode: str, q: int) -> ChainComplex:
    key = ("cochains", mode, q)
    if key not in A._cache:
        incs, deltas = A.columns(mode)
        m = A.m
        ranks = [incs[k].src.rank(q) for k in range(m, -1, -1)]
        diffs = {-k: deltas[k].f(q) for k in range(m)}
        A._cache[key] = ChainComplex(A.ring, -m, ranks, diffs)
    return A._cache[key]


def normalization_map(A: CosimplicialData, q: int | None = None) -> ChainMap:
    """The inclusion N(A_q) -> C(A_q) of cochain complexes."""
    q = A.lo if q is None else q
    N = _cochain_complex(A, NORMALIZED, q)
    C = _cochain_complex(A, UNNORMALIZED, q)
    incs, _ = A.columns(NORMALIZED)
    return ChainMap(N, C, {-k: incs[k].f(q) for k in range(A.m + 1)})


def normalization_is_quasi_iso(A: CosimplicialData) -> bool:
    """Homology isomorphism in every cochain degree below the truncation."""
    return all(_qiso_below_top(A, q) for q in A.degrees)


def _qiso_below_top(A: CosimplicialData, q: int) -> bool:
    f = normalization_map(A, q)
    return all(f.induced(-k).is_iso() for k in valid_cohomology(A))


def valid_cohomology(A: CosimplicialData) -> range:
    """Cochain degrees whose cohomology is unaffected by the truncation."""
    return range(0, A.m)


# right Kan extension -------------------------------------------------------
def surjections(n: int, k: int) -> list[tuple[int, ...]]:
    """Monotone surjections [n] -> [k] as value tuples, lexicographically."""
    out = []
    for jumps in combinations(range(1, n + 1), k):
        v, seq = 0, []
        js = set(jumps)
        for x in range(n + 1):
            if x in js:
                v += 1
            seq.append(v)
        out.append(tuple(seq))
    return sorted(out)


def _epi_mono(f: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    image = sorted(set(f))
    pos = {v: i for i, v in enumerate(image)}
    return tuple(pos[v] for v in f), tuple(image)


def kan_extend(A: CosimplicialData, check: bool = True) -> CosimplicialData:
    """Right Kan extension of semicosimplicial data to cosimplicial data.

    Level n is the product of A^k over surjections σ : [n] -> [k]. For
    θ : [n] -> [n'], the component at σ' of the image is A(ι) applied to the
    component at σ, where σ'θ = ισ is the epi-mono factorisation.
    """
    m = A.m
    lo, hi = A.lo, A.hi
    blocks = {n: [(k, sig) for k in range(min(n, m) + 1) for sig in surjections(n, k)] for n in range(m + 1)}
    offsets = {}
    levels = []
    for n in range(m + 1):
        ranks = []
        for q in range(lo, hi + 1):
            off, o = {}, 0
            for b in blocks[n]:
                off[b] = o
                o += A.rank(b[0], q)
            offsets[(n, q)] = off
            ranks.append(o)
        diffs = {}
        for q in range(lo + 1, hi + 1):
            M = [[0] * ranks[q - lo] for _ in range(ranks[q - 1 - lo])]
            for b in blocks[n]:
                _place(M, A.level(b[0]).d(q), offsets[(n, q - 1)][b], offsets[(n, q)][b])
            diffs[q] = Matrix(M, ranks[q - 1 - lo], ranks[q - lo])
        levels.append(ChainComplex(A.ring, lo, ranks, diffs, check=False))

    def structure(theta: Sequence[int], n: int, n2: int) -> ChainMap:
        mats = {}
        for q in range(lo, hi + 1):
            M = [[0] * levels[n].rank(q) for _ in range(levels[n2].rank(q))]
            for b2 in blocks[n2]:
                k2, sig2 = b2
                f = [sig2[t] for t in theta]
                sig, iota = _epi_mono(f)
                b = (len(iota) - 1, sig)
                g = A.injection(iota, k2).f(q)
                _place(M, g, offsets[(n2, q)][b2], offsets[(n, q)][b])
            mats[q] = Matrix(M, levels[n2].rank(q), levels[n].rank(q))
        return ChainMap(levels[n], levels[n2], mats, check=False)

    cof, codeg = {}, {}
    for n in range(1, m + 1):
        for i in range(n + 1):
            cof[(n, i)] = structure([x if x < i else x + 1 for x in range(n)], n - 1, n)
    for n in range(m):
        for j in range(n + 1):
            codeg[(n, j)] = structure([x if x <= j else x - 1 for x in range(n + 2)], n + 1, n)
    return CosimplicialData(levels, cof, codeg, check=check)


def kan_rank(A: CosimplicialData, n: int, q: int | None = None) -> int:
    """Σ_k C(n, k) rank A^k: the rank of level n of the Kan extension."""
    q = A.lo if q is None else q
    return sum(comb(n, k) * A.rank(k, q) for k in range(min(n, A.m) + 1))


def kan_comparison_is_iso(A: CosimplicialData, J: CosimplicialData | None = None) -> bool:
    """Projection to the identity component gives N(j_*A) ≅ C(A) degreewise."""
    J = J or kan_extend(A)
    incs, _ = J.columns(NORMALIZED)
    for n in range(A.m + 1):
        for q in A.degrees:
            # the identity surjection [n] -> [n] is the last block of level n
            r = A.rank(n, q)
            tot = J.rank(n, q)
            proj = Matrix([[int(j == tot - r + i) for j in range(tot)] for i in range(r)], r, tot)
            P = proj @ incs[n].f(q)
            if P.shape != (r, r):
                return False
            free = Subquotient(A.ring, r, [tuple(int(i == j) for j in range(r)) for i in range(r)])
            if r and not Hom.from_ambient(free, free, P).is_iso():
                return False
    return True


def _place(M: list[list[int]], block: Matrix, r0: int, c0: int) -> None:
    for i in range(block.nrows):
        row = M[r0 + i]
        for j in range(block.ncols):
            x = block[i, j]
            if x:
                row[c0 + j] += x


# totalisation --------------------------------------------------------------
@dataclass
class TotFiltration:
    """The codegree filtration on the total complex of the cochain double complex."""

    filtered: FilteredComplex
    columns: list[ChainComplex]
    inclusions: list[ChainMap]
    deltas: list[ChainMap]
    mode: str
    m: int

    @property
    def total(self) -> ChainComplex:
        return self.filtered.level(0)

    def exact_through(self, r: int) -> int:
        """E_r^{n,s} agrees with the untruncated object for s <= m + 1 - r."""
        return self.m + 1 - r

    def column_projection(self, n: int, s: int) -> Matrix:
        """Gr^s cone vectors in degree n -> (-1)^s times their codegree-s part in A^s_{n+s}.

        The sign makes the induced isomorphism E_1 ≅ M^s(H) carry d_1 to δ
        on the nose (the bare projection gives -δ).
        """
        X = self.filtered
        a = X.level(s + 1).rank(n - 1)
        b = X.level(s).rank(n)
        q = n + s
        r = self.columns[s].rank(q)
        P = self.inclusions[s].f(q)
        sign = -1 if s % 2 else 1
        sel = Matrix([[sign * int(j == a + i) for j in range(a + b)] for i in range(r)], r, a + b)
        return P @ sel


def _total_level(columns, deltas, s: int, lo: int, hi: int, m: int, ring: Ring) -> ChainComplex:
    ks = list(range(max(s, 0), m + 1))

    def offs(n):
        out, o = {}, 0
        for k in ks:
            out[k] = o
            o += columns[k].rank(n + k)
        return out, o

    tlo = lo - m
    ranks, table = [], {}
    for n in range(tlo, hi + 1):
        table[n] = offs(n)
        ranks.append(table[n][1])
    diffs = {}
    for n in range(tlo + 1, hi + 1):
        (o_src, rs), (o_tgt, rt) = table[n], table[n - 1]
        M = [[0] * rs for _ in range(rt)]
        for k in ks:
            q = n + k
            d = columns[k].d(q)
            _place(M, d.scale(-1) if k % 2 else d, o_tgt[k], o_src[k])
            if k + 1 in o_tgt:
                _place(M, deltas[k].f(q), o_tgt[k + 1], o_src[k])
        diffs[n] = Matrix(M, rt, rs)
    return ChainComplex(ring, tlo, ranks, diffs)


def _inclusion_map(src: ChainComplex, tgt: ChainComplex) -> ChainMap:
    """Blocks k >= s inside blocks k >= s-1: the tail of the target basis."""
    mats = {}
    for n in src.degrees:
        a, b = src.rank(n), tgt.rank(n)
        mats[n] = Matrix([[int(j == i - (b - a)) for j in range(a)] for i in range(b)], b, a)
    return ChainMap(src, tgt, mats)


def _filtered_tot(columns, deltas, lo, hi, m, ring) -> FilteredComplex:
    levels = [_total_level(columns, deltas, s, lo, hi, m, ring) for s in range(m + 1)]
    trans = [_inclusion_map(levels[s], levels[s - 1]) for s in range(1, m + 1)]
    return FilteredComplex(levels, trans, 0, CONSTANT, ZERO)


def tot_filtration(A: CosimplicialData, mode: str | None = None) -> TotFiltration:
    """Total complex of M^• (N or C in the cosimplicial direction), filtered by codegree.

    F^s collects codegrees k >= s, so the filtration is constant from 0
    downwards and vanishes above m. E_1^{n,s} is M^s(H_{n+s}(A)).
    """
    if mode is None:
        mode = NORMALIZED if A.is_cosimplicial else UNNORMALIZED
    if mode == NORMALIZED and not A.is_cosimplicial:
        raise CosimplicialError("normalized totalisation needs codegeneracies")
    key = ("tot", mode)
    if key not in A._cache:
        incs, deltas = A.columns(mode)
        cols = [f.src for f in incs]
        X = _filtered_tot(cols, deltas, A.lo, A.hi, A.m, A.ring)
        A._cache[key] = TotFiltration(X, cols, incs, deltas, mode, A.m)
    return A._cache[key]


def homology_cochains(A: CosimplicialData, s: int, q: int, mode: str) -> Subquotient:
    """M^s(H_q(A)): computed inside homology, not as homology of M^s."""
    H = A.level(s).homology(q)
    if mode == UNNORMALIZED or s == 0:
        return H
    tgt_H = A.level(s - 1).homology(q)
    # stacked codegeneracies into a direct sum of copies of H_q(A^{s-1})
    dim = tgt_H.dim
    sub, quot = [], []
    for i in range(s):
        pad = lambda v, i=i: (0,) * (dim * i) + tuple(v) + (0,) * (dim * (s - 1 - i))
        sub += [pad(v) for v in tgt_H.sub]
        quot += [pad(v) for v in tgt_H.quot]
    big = Subquotient(A.ring, dim * s, sub, quot)
    stack = A.s(s - 1, 0).f(q)
    for i in range(1, s):
        stack = stack.vstack(A.s(s - 1, i).f(q))
    return Hom.from_ambient(H, big, stack).kernel_group()


@dataclass
class TotCheck:
    e1_iso: bool = True
    d1_agrees: bool = True
    page2_iso: bool = True
    complete: bool = True
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def verify_tot(A: CosimplicialData, T: TotFiltration | None = None, r_max: int = 3) -> TotCheck:
    """E_1 against M^s(H) computed in homology, d_1 against δ, and the N -> C page-2 comparison."""
    T = T or tot_filtration(A)
    ss = SpectralSequence(T.filtered)
    out = TotCheck()
    m = A.m
    phis = {}
    for s in range(m + 1):
        for n in range(A.lo - s, A.hi - s + 1):
            G = homology_cochains(A, s, n + s, T.mode)
            E = ss.e1(n, s)
            phi = Hom.from_ambient(E, G, T.column_projection(n, s))
            phis[(n, s)] = (phi, G)
            if not phi.is_iso():
                out.e1_iso = False
                out.failures.append(f"E_1 at ({n},{s}) is not M^s(H_{n + s})")
    for (n, s), (phi, G) in phis.items():
        if s >= m:
            continue
        psi, G2 = phis[(n - 1, s + 1)]
        dH = Hom.from_ambient(G, G2, A.coboundary(s).f(n + s))
        lhs = psi.compose(ss.differential(1, n, s))
        rhs = dH.compose(phi)
        if lhs.matrix != rhs.matrix:
            out.d1_agrees = False
            out.failures.append(f"d_1 at ({n},{s}) is not the alternating coface sum")
    if A.is_cosimplicial and T.mode == NORMALIZED:
        bad = page_comparison_failures(A, r_max)
        if bad:
            out.page2_iso = False
            out.failures += bad
    if not T.filtered.is_complete():
        out.complete = False
        out.failures.append("Tot filtration is not complete")
    return out


def page_comparison_failures(A: CosimplicialData, r_max: int = 3) -> list[str]:
    """N -> C on Tot: an isomorphism of pages from r = 2 on, within the exact range."""
    TN = tot_filtration(A, NORMALIZED)
    TC = tot_filtration(A, UNNORMALIZED)
    XN, XC = TN.filtered, TC.filtered
    # the comparison F^s(N) -> F^s(C) is blockwise the inclusion N^k -> A^k
    maps = {}
    for s in range(-1, A.m + 2):
        src, tgt = XN.level(s), XC.level(s)
        mats = {}
        for n in src.degrees:
            M = [[0] * src.rank(n) for _ in range(tgt.rank(n))]
            ro = co = 0
            for k in range(max(s, 0), A.m + 1):
                P = TN.inclusions[k].f(n + k)
                _place(M, P, ro, co)
                ro += P.nrows
                co += P.ncols
            mats[n] = Matrix(M, tgt.rank(n), src.rank(n))
        maps[s] = ChainMap(src, tgt, mats)
    sN, sC = SpectralSequence(XN), SpectralSequence(XC)
    out = []
    for r in range(2, r_max + 1):
        for s in range(0, TN.exact_through(r) + 1):
            g = cone_map(XN.gr_cone(s), XC.gr_cone(s), maps[s + 1], maps[s])
            for n in sN.degrees:
                h = Hom.from_ambient(sN.group(r, n, s), sC.group(r, n, s), g.f(n))
                if not h.is_iso():
                    out.append(f"N -> C is not an isomorphism on E_{r} at ({n},{s})")
    return out


# décalage -------------------------------------------------------------------
@dataclass
class Decalage:
    filtered: FilteredComplex
    tot: TotFiltration

    @property
    def total(self) -> ChainComplex:
        return self.filtered.colimit()


def _truncated_columns(A: CosimplicialData, s: int):
    cols, incs = [], []
    for k in range(A.m + 1):
        t, inc = truncate_above(A.level(k), s)
        cols.append(t)
        incs.append(inc)
    deltas = [restrict(A.coboundary(k), incs[k], incs[k + 1]) for k in range(A.m)]
    return cols, incs, deltas


def decalage(A: CosimplicialData) -> Decalage:
    """Level s is Tot of the levelwise good truncations τ_{>=s} A.

    The unnormalized (semicosimplicial) totalisation is used: it is exact for
    data truncated at m and extended by zero.
    """
    key = "dec"
    if key in A._cache:
        return A._cache[key]
    lo, hi, m = A.lo, A.hi, A.m
    data = {s: _truncated_columns(A, s) for s in range(lo, hi + 1)}
    levels = [_filtered_tot(data[s][0], data[s][2], lo, hi, m, A.ring).level(0) for s in range(lo, hi + 1)]
    trans = []
    for s in range(lo + 1, hi + 1):
        src, tgt = levels[s - lo], levels[s - 1 - lo]
        _, inc_s, _ = data[s]
        _, inc_t, _ = data[s - 1]
        mats = {}
        for n in src.degrees:
            M = [[0] * src.rank(n) for _ in range(tgt.rank(n))]
            ro = co = 0
            for k in range(m + 1):
                q = n + k
                Pt = inc_t[k].f(q)
                cols = [_solve(Pt, v, A.ring) for v in inc_s[k].f(q).columns()]
                blk = Matrix.from_columns(cols, Pt.ncols) if cols else Matrix.zero(Pt.ncols, 0)
                _place(M, blk, ro, co)
                ro += Pt.ncols
                co += inc_s[k].f(q).ncols
            mats[n] = Matrix(M, tgt.rank(n), src.rank(n))
        trans.append(ChainMap(src, tgt, mats))
    X = FilteredComplex(levels, trans, lo, CONSTANT, ZERO)
    out = Decalage(X, tot_filtration(A, UNNORMALIZED))
    A._cache[key] = out
    return out


@dataclass
class DecalageCheck:
    pages: int
    cells: int = 0
    complete: bool = True
    colimit_is_tot: bool = True
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def verify_decalage(A: CosimplicialData, r_max: int = 4) -> DecalageCheck:
    """E_r(Dec)^{n,s} ≅ E_{r+1}(Tot)^{n,s-n} for r <= r_max, groups and differentials."""
    D = decalage(A)
    sD = SpectralSequence(D.filtered)
    sT = SpectralSequence(D.tot.filtered)
    out = DecalageCheck(r_max)
    if not D.filtered.is_complete():
        out.complete = False
        out.failures.append("décalage is not complete")
    if not D.total.same_as(D.tot.total):
        out.colimit_is_tot = False
        out.failures.append("colimit of the décalage differs from Tot")
    for r in range(1, r_max + 1):
        seen = set()
        for n, s in sD.cells():
            t = s - n
            seen.add((n, t))
            gD = sD.group(r, n, s)
            if not sT.in_range(n, t):
                if not gD.is_trivial():
                    out.failures.append(f"E_{r}(Dec) at ({n},{s}) has no Tot counterpart")
                continue
            out.cells += 1
            gT = sT.group(r + 1, n, t)
            if gD.invariants != gT.invariants:
                out.failures.append(f"E_{r}(Dec)({n},{s}) = {gD.describe()} but E_{r + 1}(Tot)({n},{t}) = {gT.describe()}")
                continue
            dD = sD.differential(r, n, s)
            dT = sT.differential(r + 1, n, t)
            if dD.image_group().invariants != dT.image_group().invariants:
                out.failures.append(f"d_{r}(Dec) and d_{r + 1}(Tot) differ in rank at ({n},{s})")
        for n, t in sT.cells():
            if (n, t) not in seen and not sT.group(r + 1, n, t).is_trivial():
                out.failures.append(f"E_{r + 1}(Tot) at ({n},{t}) has no Dec counterpart")
    return out


# random instances ----------------------------------------------------------
class _Nerve:
    """A simplicial set given by simplex lists with face and degeneracy maps."""

    def __init__(self, simplices: Callable[[int], list], face: Callable, degen: Callable, twist: Callable | None = None):
        self._simp = simplices
        self.face = face
        self.degen = degen
        self.twist = twist
        self._cache: dict = {}

    def simplices(self, n: int) -> list:
        if n not in self._cache:
            s = self._simp(n)
            self._cache[n] = (s, {x: i for i, x in enumerate(s)})
        return self._cache[n][0]

    def index(self, n: int, x) -> int:
        self.simplices(n)
        return self._cache[n][1][x]


def poset_nerve(le: Sequence[Sequence[bool]]) -> _Nerve:
    size = len(le)

    def simp(n):
        out = [(x,) for x in range(size)]
        for _ in range(n):
            out = [c + (y,) for c in out for y in range(size) if le[c[-1]][y]]
        return sorted(out)

    return _Nerve(simp, lambda i, c: c[:i] + c[i + 1:], lambda i, c: c[: i + 1] + c[i:])


def group_nerve(q: int, twisted: bool = False) -> _Nerve:
    """The bar construction of Z/q; with twisted=True coefficients carry g -> (-1)^g."""
    if twisted and q % 2:
        raise CosimplicialError("the sign twist needs an even order")

    def face(i, g):
        n = len(g)
        if i == 0:
            return g[1:]
        if i == n:
            return g[:-1]
        return g[: i - 1] + ((g[i - 1] + g[i]) % q,) + g[i + 1:]

    twist = (lambda g: -1 if g[0] % 2 else 1) if twisted else None
    return _Nerve(lambda n: sorted(product(range(q), repeat=n)), face, lambda i, g: g[:i] + (0,) + g[i:], twist)


def nerve_cochains(X: _Nerve, m: int, ring: Ring = ZZ) -> CosimplicialData:
    """n |-> Z^{X_n}, with cofaces and codegeneracies pulled back from X."""
    ranks = [len(X.simplices(k)) for k in range(m + 1)]
    cof, codeg = {}, {}
    for k in range(1, m + 1):
        for i in range(k + 1):
            M = [[0] * ranks[k - 1] for _ in range(ranks[k])]
            for r, x in enumerate(X.simplices(k)):
                c = X.twist(x) if (X.twist and i == 0) else 1
                M[r][X.index(k - 1, X.face(i, x))] += c
            cof[(k, i)] = Matrix(M, ranks[k], ranks[k - 1])
    for k in range(m):
        for i in range(k + 1):
            M = [[0] * ranks[k + 1] for _ in range(ranks[k])]
            for r, x in enumerate(X.simplices(k)):
                M[r][X.index(k + 1, X.degen(i, x))] = 1
            codeg[(k, i)] = Matrix(M, ranks[k], ranks[k + 1])
    return CosimplicialData.from_groups(ring, ranks, cof, codeg)


def pullback(X: _Nerve, Y: _Nerve, phi: Callable, m: int, scale: int = 1) -> list[Matrix]:
    """Matrices Z^{X_k} -> Z^{Y_k} of the pullback along a simplicial map Y -> X."""
    out = []
    for k in range(m + 1):
        rx, ry = len(X.simplices(k)), len(Y.simplices(k))
        M = [[0] * rx for _ in range(ry)]
        for r, y in enumerate(Y.simplices(k)):
            M[r][X.index(k, phi(y))] += scale
        out.append(Matrix(M, ry, rx))
    return out


def direct_sum(A: CosimplicialData, B: CosimplicialData) -> CosimplicialData:
    if A.m != B.m or A.ring != B.ring:
        raise CosimplicialError("summands need the same truncation and ring")
    from .complexes import direct_sum as dsum

    levels = [dsum(a, b) for a, b in zip(A.levels, B.levels)]

    def bd(f, g, src, tgt):
        mats = {}
        for q in src.degrees:
            M = [[0] * src.rank(q) for _ in range(tgt.rank(q))]
            _place(M, f.f(q), 0, 0)
            _place(M, g.f(q), f.f(q).nrows, f.f(q).ncols)
            mats[q] = Matrix(M, tgt.rank(q), src.rank(q))
        return ChainMap(src, tgt, mats, check=False)

    cof = {(k, i): bd(A.d(k, i), B.d(k, i), levels[k - 1], levels[k]) for k in range(1, A.m + 1) for i in range(k + 1)}
    codeg = None
    if A.is_cosimplicial and B.is_cosimplicial:
        codeg = {(k, i): bd(A.s(k, i), B.s(k, i), levels[k + 1], levels[k]) for k in range(A.m) for i in range(k + 1)}
    return CosimplicialData(levels, cof, codeg, check=False)


def _random_poset(rng: random.Random, size: int) -> list[list[bool]]:
    le = [[i == j or (i < j and rng.random() < 0.5) for j in range(size)] for i in range(size)]
    for k in range(size):
        for i in range(size):
            for j in range(size):
                if le[i][k] and le[k][j]:
                    le[i][j] = True
    return le


def _random_monotone(rng: random.Random, src, tgt) -> tuple[int, ...] | None:
    for _ in range(50):
        f = tuple(rng.randrange(len(tgt)) for _ in src)
        if all(tgt[f[i]][f[j]] for i in range(len(src)) for j in range(len(src)) if src[i][j]):
            return f
    return None


def _random_nerve(rng: random.Random, small: bool = False) -> _Nerve:
    kind = rng.choice(("poset", "poset", "group", "twisted"))
    if kind == "poset":
        return poset_nerve(_random_poset(rng, rng.randint(1, 3)))
    if kind == "twisted":  # the sign action needs q even
        return group_nerve(2, twisted=True)
    return group_nerve(2 if small else rng.choice((2, 3)))


def _unimodular(rng: random.Random, r: int, ring: Ring) -> tuple[Matrix, Matrix]:
    U = [[int(i == j) for j in range(r)] for i in range(r)]
    V = [[int(i == j) for j in range(r)] for i in range(r)]
    for _ in range(r):
        i, j = rng.randrange(r), rng.randrange(r)
        if i == j:
            continue
        c = rng.choice((-1, 1))
        for k in range(r):  # row_i += c row_j on U; col_j -= c col_i on V
            U[i][k] += c * U[j][k]
        for k in range(r):
            V[k][j] -= c * V[k][i]
    return Matrix(U, r, r).reduce(ring), Matrix(V, r, r).reduce(ring)


def random_cosimplicial_group(seed: int, m: int = 3, ring: Ring = ZZ) -> CosimplicialData:
    """Cochains on a random small nerve (posets, bar constructions of Z/2, Z/3,
    possibly twisted), sometimes summed, then rewritten in a random basis."""
    rng = random.Random(seed)
    A = nerve_cochains(_random_nerve(rng), m, ring)
    if rng.random() < 0.3:
        A = direct_sum(A, nerve_cochains(poset_nerve(_random_poset(rng, 2)), m, ring))
    bases = [_unimodular(rng, A.rank(k, 0), ring) for k in range(m + 1)]
    cof = {(k, i): bases[k][0] @ A.d(k, i).f(0) @ bases[k - 1][1] for k in range(1, m + 1) for i in range(k + 1)}
    codeg = {(k, i): bases[k][0] @ A.s(k, i).f(0) @ bases[k + 1][1] for k in range(m) for i in range(k + 1)}
    return CosimplicialData.from_groups(ring, [A.rank(k, 0) for k in range(m + 1)], cof, codeg)


def cone_of_groups(B: CosimplicialData, A: CosimplicialData, f: Sequence[Matrix]) -> CosimplicialData:
    """Levelwise complex B^k -> A^k (degrees 1, 0) for a cosimplicial map f."""
    m = A.m
    levels = [ChainComplex(A.ring, 0, [A.rank(k, 0), B.rank(k, 0)], {1: f[k]}) for k in range(m + 1)]

    def two(fa, fb, src, tgt):
        return ChainMap(src, tgt, {0: fa.f(0), 1: fb.f(0)})

    try:
        cof = {(k, i): two(A.d(k, i), B.d(k, i), levels[k - 1], levels[k]) for k in range(1, m + 1) for i in range(k + 1)}
        codeg = None
        if A.is_cosimplicial and B.is_cosimplicial:
            codeg = {(k, i): two(A.s(k, i), B.s(k, i), levels[k + 1], levels[k]) for k in range(m) for i in range(k + 1)}
    except ComplexError as e:
        raise CosimplicialError(f"f is not cosimplicial: {e}") from None
    return CosimplicialData(levels, cof, codeg)


def double_complex(columns: Sequence[ChainComplex], deltas: Sequence[ChainMap]) -> CosimplicialData:
    """Semicosimplicial data with d^0 = δ and all other cofaces zero.

    Its unnormalized cochains are the double complex itself, so the Kan
    extension is a cosimplicial object whose normalized cochains recover it.
    """
    m = len(columns) - 1
    cof = {}
    for k in range(1, m + 1):
        cof[(k, 0)] = deltas[k - 1]
        for i in range(1, k + 1):
            cof[(k, i)] = ChainMap.zero(columns[k - 1], columns[k])
    return CosimplicialData(columns, cof)


def staircase(ring: Ring, r: int, n: int, lam: int, m: int, lo: int, hi: int) -> tuple[list[ChainComplex], list[ChainMap]]:
    """A zig-zag whose Tot spectral sequence has d_r(a_0) = ±lam·c.

    a_0 in column 0, degree n; a_k -> b_k = d a_k in column k (0 < k < r);
    c in column r, degree n + r - 1; δ a_k = b_{k+1} and δ a_{r-1} = lam c.
    """
    if not 1 <= r <= m:
        raise CosimplicialError("staircase length must lie in [1, m]")
    cols, gens = [], []
    for k in range(m + 1):
        g = {}
        if k == 0:
            g[n] = ["a"]
        elif k < r:
            g[n + k] = ["a"]
            g[n + k - 1] = ["b"]
        elif k == r:
            g[n + r - 1] = ["c"]
        ranks = [len(g.get(q, [])) for q in range(lo, hi + 1)]
        diffs = {}
        if 0 < k < r:
            diffs[n + k] = Matrix([[1]], 1, 1)
        cols.append(ChainComplex(ring, lo, ranks, diffs))
        gens.append(g)
    deltas = []
    for k in range(m):
        mats = {}
        if k < r:
            q = n + k
            val = lam if k == r - 1 else 1
            if cols[k].rank(q) and cols[k + 1].rank(q):
                mats[q] = Matrix([[val]], 1, 1)
        deltas.append(ChainMap(cols[k], cols[k + 1], mats))
    return cols, deltas


def _sum_columns(a, b):
    from .complexes import direct_sum as dsum

    cols = [dsum(x, y) for x, y in zip(a[0], b[0])]
    deltas = []
    for k, (f, g) in enumerate(zip(a[1], b[1])):
        mats = {}
        for q in cols[k].degrees:
            M = [[0] * cols[k].rank(q) for _ in range(cols[k + 1].rank(q))]
            _place(M, f.f(q), 0, 0)
            _place(M, g.f(q), f.f(q).nrows, f.f(q).ncols)
            mats[q] = Matrix(M, cols[k + 1].rank(q), cols[k].rank(q))
        deltas.append(ChainMap(cols[k], cols[k + 1], mats))
    return cols, deltas


def random_double_complex(rng: random.Random, m: int, ring: Ring = ZZ, lo: int = -1, hi: int = 3):
    """One or two staircases plus a random double complex (δ² = 0 imposed by solving)."""
    from .randomgen import RandomParams, random_chain_map, random_complex

    out = None
    for _ in range(rng.randint(1, 2)):
        r = rng.randint(1, m)
        n = rng.randint(lo, hi - r + 1)
        st = staircase(ring, r, n, rng.choice((1, 2, 3)), m, lo, hi)
        out = st if out is None else _sum_columns(out, st)
    p = RandomParams(max_rank=2, max_span=hi - lo + 1)
    cols = [random_complex(rng, ring, lo, hi - lo + 1, p) for _ in range(m + 1)]
    deltas = []
    for k in range(m):
        deltas.append(random_chain_map(rng, cols[k], cols[k + 1], p, kill=deltas[-1] if deltas else None))
    return _sum_columns(out, (cols, deltas))


def random_cosimplicial_complex(seed: int, m: int = 3, ring: Ring = ZZ) -> CosimplicialData:
    """Random cosimplicial complexes of two kinds.

    Either the Kan extension of a random double complex (staircases force
    differentials of every length up to m), or a levelwise two-term complex
    given by a scaled pullback of cochains along a random map of small nerves.
    """
    rng = random.Random(seed)
    if rng.random() < 0.6:
        return kan_extend(double_complex(*random_double_complex(rng, m, ring)))
    scale = rng.choice((1, 1, 2, -1, 3))
    if rng.random() < 0.5:
        P, Q = _random_poset(rng, rng.randint(1, 3)), _random_poset(rng, rng.randint(1, 3))
        phi = _random_monotone(rng, Q, P)
        if phi is None:
            Q, phi = [[True]], (0,)
        X, Y = poset_nerve(P), poset_nerve(Q)
        f = pullback(X, Y, lambda c: tuple(phi[x] for x in c), m, scale)
    else:
        X = group_nerve(2)
        Y = group_nerve(2)
        trivial = rng.random() < 0.5
        f = pullback(X, Y, (lambda g: (0,) * len(g)) if trivial else (lambda g: g), m, scale)
    A = nerve_cochains(Y, m, ring)
    B = nerve_cochains(X, m, ring)
    return cone_of_groups(B, A, f)


def one_level(ring: Ring, k: int, r: int, m: int | None = None) -> CosimplicialData:
    """Semicosimplicial data with Z^r in level k and zero elsewhere."""
    m = k if m is None else m
    ranks = [r if j == k else 0 for j in range(m + 1)]
    cof = {(j, i): Matrix.zero(ranks[j], ranks[j - 1]) for j in range(1, m + 1) for i in range(j + 1)}
    return CosimplicialData.from_groups(ring, ranks, cof)


def constant(ring: Ring, r: int, m: int) -> CosimplicialData:
    """The constant cosimplicial group Z^r."""
    I = Matrix.identity(r)
    cof = {(k, i): I for k in range(1, m + 1) for i in range(k + 1)}
    codeg = {(k, i): I for k in range(m) for i in range(k + 1)}
    return CosimplicialData.from_groups(ring, [r] * (m + 1), cof, codeg)


# cobar complexes -------------------------------------------------------------
MAX_COBAR_S = 12
MAX_COBAR_T = 40
MAX_COBAR_RANK = 4096


@dataclass
class HopfData:
    """A connected graded Hopf algebra Γ over F_p, given by structure constants.

    ``coproduct[g]`` lists terms (c, left, right); ``counit`` maps basis names
    to scalars; ``product`` (optional) maps "a*b" to terms (c, name).
    """

    p: int
    basis: list[tuple[str, int]]
    coproduct: dict
    counit: dict
    unit: str = "1"
    product: dict | None = None

    def __post_init__(self):
        self.ring = GF(self.p)
        self.names = [b for b, _ in self.basis]
        self.deg = dict(self.basis)
        self.index = {b: i for i, b in enumerate(self.names)}
        if len(self.index) != len(self.names):
            raise CosimplicialError("repeated basis name in Γ")
        if self.unit not in self.deg or self.deg[self.unit] != 0:
            raise CosimplicialError("the unit must be a basis element of degree 0")
        if [b for b, d in self.basis if d == 0] != [self.unit] or any(d < 0 for _, d in self.basis):
            raise CosimplicialError("Γ must be connected: degree 0 is spanned by the unit, no negative degrees")
        for g, terms in self.coproduct.items():
            for c, a, b in terms:
                if a not in self.deg or b not in self.deg:
                    raise CosimplicialError(f"coproduct of {g} uses an unknown basis element")
                if self.deg[a] + self.deg[b] != self.deg[g]:
                    raise CosimplicialError(f"coproduct of {g} is not homogeneous")
        for g in self.names:
            self.coproduct.setdefault(g, [])

    def eps(self, g: str) -> int:
        return self.ring.reduce(self.counit.get(g, 0))

    def delta(self, g: str) -> dict:
        out: dict = {}
        for c, a, b in self.coproduct[g]:
            out[(a, b)] = self.ring.reduce(out.get((a, b), 0) + c)
        return {k: v for k, v in out.items() if v}

    def axiom_failures(self) -> list[str]:
        R = self.ring
        out = []
        for g in self.names:
            D = self.delta(g)
            left: dict = {}
            right: dict = {}
            for (a, b), c in D.items():
                for (x, y), e in self.delta(a).items():
                    left[(x, y, b)] = R.reduce(left.get((x, y, b), 0) + c * e)
                for (x, y), e in self.delta(b).items():
                    right[(a, x, y)] = R.reduce(right.get((a, x, y), 0) + c * e)
            if {k: v for k, v in left.items() if v} != {k: v for k, v in right.items() if v}:
                out.append(f"coproduct is not coassociative on {g}")
            for side in (0, 1):
                acc: dict = {}
                for (a, b), c in D.items():
                    keep, drop = (b, a) if side == 0 else (a, b)
                    acc[keep] = R.reduce(acc.get(keep, 0) + c * self.eps(drop))
                if {k: v for k, v in acc.items() if v} != {g: 1}:
                    out.append(f"counit law fails on {g}")
        if self.eps(self.unit) != 1 or self.delta(self.unit) != {(self.unit, self.unit): 1}:
            out.append("the unit is not grouplike")
        if self.product is not None:
            out += self._multiplicativity_failures()
        return out

    def _mult(self, a: str, b: str) -> dict:
        if a == self.unit:
            return {b: 1}
        if b == self.unit:
            return {a: 1}
        out: dict = {}
        for c, x in self.product.get(f"{a}*{b}", []):
            out[x] = self.ring.reduce(out.get(x, 0) + c)
        return {k: v for k, v in out.items() if v}

    def _multiplicativity_failures(self) -> list[str]:
        R = self.ring
        out = []
        for a in self.names:
            for b in self.names:
                lhs: dict = {}
                for x, c in self._mult(a, b).items():
                    for k, e in self.delta(x).items():
                        lhs[k] = R.reduce(lhs.get(k, 0) + c * e)
                rhs: dict = {}
                for (a1, a2), c in self.delta(a).items():
                    for (b1, b2), e in self.delta(b).items():
                        sign = -1 if (self.deg[a2] * self.deg[b1]) % 2 else 1
                        for x, f in self._mult(a1, b1).items():
                            for y, h in self._mult(a2, b2).items():
                                rhs[(x, y)] = R.reduce(rhs.get((x, y), 0) + sign * c * e * f * h)
                if {k: v for k, v in lhs.items() if v} != {k: v for k, v in rhs.items() if v}:
                    out.append(f"coproduct is not multiplicative on {a}*{b}")
        return out


@dataclass
class Comodule:
    """A left Γ-comodule: ``coaction[m]`` lists terms (c, γ, m')."""

    basis: list[tuple[str, int]]
    coaction: dict

    def __post_init__(self):
        self.names = [b for b, _ in self.basis]
        self.deg = dict(self.basis)
        self.index = {b: i for i, b in enumerate(self.names)}
        for m in self.names:
            self.coaction.setdefault(m, [])

    def psi(self, H: HopfData, m: str) -> dict:
        out: dict = {}
        for c, g, x in self.coaction[m]:
            out[(g, x)] = H.ring.reduce(out.get((g, x), 0) + c)
        return {k: v for k, v in out.items() if v}

    def axiom_failures(self, H: HopfData) -> list[str]:
        R = H.ring
        out = []
        for m in self.names:
            P = self.psi(H, m)
            for (g, x) in P:
                if g not in H.deg or x not in self.deg or H.deg[g] + self.deg[x] != self.deg[m]:
                    out.append(f"coaction on {m} is not homogeneous")
                    return out
            left: dict = {}
            right: dict = {}
            for (g, x), c in P.items():
                for (a, b), e in H.delta(g).items():
                    left[(a, b, x)] = R.reduce(left.get((a, b, x), 0) + c * e)
                for (h, y), e in self.psi(H, x).items():
                    right[(g, h, y)] = R.reduce(right.get((g, h, y), 0) + c * e)
            if {k: v for k, v in left.items() if v} != {k: v for k, v in right.items() if v}:
                out.append(f"coaction is not coassociative on {m}")
            acc: dict = {}
            for (g, x), c in P.items():
                acc[x] = R.reduce(acc.get(x, 0) + c * H.eps(g))
            if {k: v for k, v in acc.items() if v} != {m: 1}:
                out.append(f"counit law fails on {m}")
        return out


def trivial_comodule(H: HopfData) -> Comodule:
    return Comodule([("m", 0)], {"m": [(1, H.unit, "m")]})


def exterior_hopf(p: int = 2, t0: int = 1) -> HopfData:
    """Λ(x) with x primitive in degree t0."""
    return HopfData(
        p,
        [("1", 0), ("x", t0)],
        {"1": [(1, "1", "1")], "x": [(1, "x", "1"), (1, "1", "x")]},
        {"1": 1},
        product={"x*x": []},
    )


def trivial_hopf(p: int = 2) -> HopfData:
    return HopfData(p, [("1", 0)], {"1": [(1, "1", "1")]}, {"1": 1})


@dataclass
class ExtTable:
    """dim_F Ext^{s,t}_Γ(F_p, M) for 0 <= s <= s_max and t <= t_max."""

    p: int
    s_max: int
    t_max: int
    dims: dict

    def dim(self, s: int, t: int) -> int:
        return self.dims.get((s, t), 0)

    def nonzero(self) -> list[tuple[int, int]]:
        return sorted(k for k, v in self.dims.items() if v)


@dataclass
class CobarResult:
    cosimplicial: CosimplicialData
    table: ExtTable
    oracle: ExtTable
    e2: ExtTable
    keys: dict

    @property
    def agrees(self) -> bool:
        return self.table.dims == self.oracle.dims == self.e2.dims


def _cobar_keys(H: HopfData, M: Comodule, s: int, t_lo: int, t_max: int) -> dict[int, list]:
    """Basis (γ_1, ..., γ_s, m) of Γ^{⊗s} ⊗ M grouped by internal degree t."""
    out: dict = {t: [] for t in range(t_lo, t_max + 1)}
    words = [((), 0)]
    for _ in range(s):
        words = [(w + (g,), d + H.deg[g]) for w, d in words for g in H.names if d + H.deg[g] + t_lo <= t_max]
    for w, d in words:
        for m in M.names:
            t = d + M.deg[m]
            if t_lo <= t <= t_max:
                out[t].append((w, m))
    for t in out:
        out[t].sort(key=lambda k: ([H.index[g] for g in k[0]], M.index[k[1]]))
    return out


def cobar(H: HopfData, M: Comodule | None = None, s_max: int = 8, t_max: int = 8) -> CobarResult:
    """The cobar cosimplicial object Γ^{⊗•} ⊗ M and Ext computed from it.

    Levels are graded by internal degree t (chain degree t, zero
    differential); the object is built to level s_max + 1 so that Ext^s is
    exact for s <= s_max. Ext is read off three ways: the normalized
    cochains, a directly assembled reduced cobar complex, and E_2 of the Tot
    filtration (at (n, s) = (t - s, s)).
    """
    M = M or trivial_comodule(H)
    if s_max < 0 or s_max > MAX_COBAR_S or t_max > MAX_COBAR_T:
        raise CobarBoundsError(f"bounds s <= {MAX_COBAR_S}, t <= {MAX_COBAR_T} exceeded")
    bad = H.axiom_failures() + M.axiom_failures(H)
    if bad:
        raise CosimplicialError(bad[0])
    R = H.ring
    t_lo = min([d for _, d in M.basis], default=0)
    if t_lo > t_max:
        t_lo = t_max
    m = s_max + 1
    keys = {s: _cobar_keys(H, M, s, t_lo, t_max) for s in range(m + 1)}
    for s in keys:
        if sum(len(v) for v in keys[s].values()) > MAX_COBAR_RANK:
            raise CobarBoundsError(f"cobar level {s} exceeds {MAX_COBAR_RANK} basis elements")
    idx = {s: {t: {k: i for i, k in enumerate(keys[s][t])} for t in keys[s]} for s in keys}
    levels = [ChainComplex(R, t_lo, [len(keys[s][t]) for t in range(t_lo, t_max + 1)]) for s in range(m + 1)]

    def build(s_src, s_tgt, fn):
        mats = {}
        for t in range(t_lo, t_max + 1):
            rows, cols = len(keys[s_tgt][t]), len(keys[s_src][t])
            Mx = [[0] * cols for _ in range(rows)]
            for j, key in enumerate(keys[s_src][t]):
                for k2, c in fn(key).items():
                    Mx[idx[s_tgt][t][k2]][j] += c
            mats[t] = Matrix(Mx, rows, cols)
        return ChainMap(levels[s_src], levels[s_tgt], mats, check=False)

    def coface(s, i):
        def fn(key):
            w, x = key
            if i == 0:
                return {((H.unit,) + w, x): 1}
            if i == s + 1:
                return {(w + (g,), y): c for (g, y), c in M.psi(H, x).items()}
            return {(w[: i - 1] + (a, b) + w[i:], x): c for (a, b), c in H.delta(w[i - 1]).items()}

        return build(s, s + 1, fn)

    def codegeneracy(s, j):
        def fn(key):
            w, x = key
            c = H.eps(w[j])
            return {(w[:j] + w[j + 1:], x): c} if c else {}

        return build(s + 1, s, fn)

    cof = {(k, i): coface(k - 1, i) for k in range(1, m + 1) for i in range(k + 1)}
    codeg = {(k, j): codegeneracy(k, j) for k in range(m) for j in range(k + 1)}
    A = CosimplicialData(levels, cof, codeg)

    table = {}
    for t in range(t_lo, t_max + 1):
        C = cochains(A, NORMALIZED, q=t)
        for s in range(s_max + 1):
            d = C.homology(-s).ngens
            if d:
                table[(s, t)] = d
    T = tot_filtration(A, NORMALIZED)
    ss = SpectralSequence(T.filtered)
    e2 = {}
    for s in range(s_max + 1):
        for t in range(t_lo, t_max + 1):
            d = ss.group(2, t - s, s).ngens
            if d:
                e2[(s, t)] = d
    oracle = reduced_cobar_ext(H, M, s_max, t_max)
    return CobarResult(A, ExtTable(H.p, s_max, t_max, table), oracle, ExtTable(H.p, s_max, t_max, e2), keys)


def reduced_cobar_ext(H: HopfData, M: Comodule, s_max: int, t_max: int) -> ExtTable:
    """Ext from the reduced cobar complex Γ̄^{⊗s} ⊗ M, assembled directly.

    d = Σ_i (-1)^i Δ̄ at slot i + (-1)^{s+1} ψ̄, where Δ̄ and ψ̄ drop every
    term with a unit factor. Dimensions come from ranks over F_p.
    """
    R = H.ring
    bar = [g for g in H.names if g != H.unit]
    t_lo = min([d for _, d in M.basis], default=0)

    def words(s, t):
        out = [((), 0)]
        for _ in range(s):
            out = [(w + (g,), d + H.deg[g]) for w, d in out for g in bar if d + H.deg[g] + t_lo <= t]
        return sorted((w, x) for w, d in out for x in M.names if d + M.deg[x] == t)

    def dmat(s, t):
        src, tgt = words(s, t), words(s + 1, t)
        ix = {k: i for i, k in enumerate(tgt)}
        Mx = [[0] * len(src) for _ in range(len(tgt))]
        for j, (w, x) in enumerate(src):
            for i in range(1, s + 1):
                for (a, b), c in H.delta(w[i - 1]).items():
                    if H.unit in (a, b):
                        continue
                    Mx[ix[(w[: i - 1] + (a, b) + w[i:], x)]][j] += (-1) ** i * c
            for (g, y), c in M.psi(H, x).items():
                if g != H.unit:
                    Mx[ix[(w + (g,), y)]][j] += (-1) ** (s + 1) * c
        return Matrix(Mx, len(tgt), len(src)), len(src)

    dims = {}
    for t in range(t_lo, t_max + 1):
        prev_rank = 0
        for s in range(s_max + 1):
            d, size = dmat(s, t)
            rk = rank(d, R) if d.nrows and d.ncols else 0
            h = size - rk - prev_rank
            if h:
                dims[(s, t)] = h
            prev_rank = rk
    return ExtTable(H.p, s_max, t_max, dims)
