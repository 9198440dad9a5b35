"""The spectral sequence of a filtered complex, computed from its exact couple.

Indexing is Adams-style: E_1^{n,s} = H_n(Gr^s X) and d_r has bidegree (-1, r).
Every page is stored as a literal subquotient Z_{r-1}/B_{r-1} of the ambient
chain group Gr^s_n = X^{s+1}_{n-1} ⊕ X^s_n, so classes on different pages are
directly comparable.

Cycles come from τ-divisibility: x survives to E_{r+1} exactly when ∂x lies in
the image of τ^r. Boundaries are accumulated from the differentials as they
are computed; that they agree with j(ker τ^r) is a separate check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .complexes import ChainComplex
from .exactalg import Hom, Matrix, Subquotient, Vector, solve, span_eq, span_le
from .filtration import CONSTANT, ZERO, FilteredComplex

INF = "inf"


class SpectralSequenceError(ValueError):
    pass


class PreconditionError(SpectralSequenceError):
    """An input does not satisfy the preconditions of an operation."""


class ExactCouple:
    """A^{n,s} = H_n(X^s), E^{n,s} = H_n(Gr^s X) and the maps τ, j, ∂."""

    def __init__(self, X: FilteredComplex):
        self.X = X
        self._cache: dict = {}

    def A(self, n: int, s: int) -> Subquotient:
        return self.X.level(s).homology(n)

    def E(self, n: int, s: int) -> Subquotient:
        return self.X.gr(s).homology(n)

    def tau(self, n: int, a: int, b: int) -> Hom:
        """τ^{a-b} : A^{n,a} -> A^{n,b}."""
        key = ("tau", n, a, b)
        if key not in self._cache:
            self._cache[key] = self.X.composite(a, b).induced(n)
        return self._cache[key]

    def j(self, n: int, s: int) -> Hom:
        """A^{n,s} -> E^{n,s}, induced by b |-> (0, b)."""
        key = ("j", n, s)
        if key not in self._cache:
            cone = self.X.gr_cone(s)
            self._cache[key] = Hom.from_ambient(self.A(n, s), self.E(n, s), cone.inclusion.f(n))
        return self._cache[key]

    def boundary(self, n: int, s: int) -> Hom:
        """E^{n,s} -> A^{n-1,s+1}, induced by (a, b) |-> a."""
        key = ("d", n, s)
        if key not in self._cache:
            self._cache[key] = self.X.gr_cone(s).connecting_map(n)
        return self._cache[key]

    def j_vector(self, s: int, n: int, b: Sequence[int]) -> Vector:
        """The ambient vector (0, b) of Gr^s_n."""
        return (0,) * self.X.level(s + 1).rank(n - 1) + tuple(b)

    def exactness_failures(self, degrees=None, window=None) -> list[str]:
        """Check im = ker at the three joints of the triangle; returns failures."""
        X = self.X
        out = []
        degrees = degrees or X.gr_degrees
        window = window or X.e1_range
        for n in degrees:
            for s in window:
                t = self.tau(n, s + 1, s)
                j = self.j(n, s)
                d = self.boundary(n, s)
                t_next = self.tau(n - 1, s + 1, s)
                # at A^{n,s}: im τ = ker j
                A = self.A(n, s)
                if not _same_sub(A, t.image_ambient(), j.kernel_ambient()):
                    out.append(f"A({n},{s})")
                E = self.E(n, s)
                if not _same_sub(E, j.image_ambient(), d.kernel_ambient()):
                    out.append(f"E({n},{s})")
                A1 = self.A(n - 1, s + 1)
                if not _same_sub(A1, d.image_ambient(), t_next.kernel_ambient()):
                    out.append(f"A({n - 1},{s + 1})")
        return out


def _same_sub(G: Subquotient, a: Sequence[Vector], b: Sequence[Vector]) -> bool:
    q = list(G.quot)
    return span_eq(G.ring, G.dim, list(a) + q, list(b) + q)


def exact_couple(X: FilteredComplex) -> ExactCouple:
    return ExactCouple(X)


@dataclass
class PageData:
    """One page: groups, differentials and the bidegree of d_r."""

    r: int | str
    groups: dict
    diffs: dict
    bidegree: tuple[int, int]
    reindexed: bool = False
    cycles: dict = field(default_factory=dict)
    boundaries: dict = field(default_factory=dict)

    def group(self, n: int, s: int) -> Subquotient | None:
        return self.groups.get((n, s))

    def nonzero_cells(self) -> list[tuple[int, int]]:
        return sorted(k for k, g in self.groups.items() if not g.is_trivial())

    def nonzero_diffs(self) -> list[tuple[int, int]]:
        return sorted(k for k, h in self.diffs.items() if not h.is_zero())

    def target(self, n: int, s: int) -> tuple[int, int]:
        return (n + self.bidegree[0], s + self.bidegree[1])


class SpectralSequence:
    """Pages E_r of a filtered complex, for r from 1 up to stabilisation."""

    def __init__(self, X: FilteredComplex):
        self.X = X
        self.couple = ExactCouple(X)
        self.ring = X.ring
        self._Z: dict = {}
        self._B: dict = {}
        self._E: dict = {}
        self._d: dict = {}
        self.certified: set = set()

    # ranges -------------------------------------------------------------
    @property
    def degrees(self) -> range:
        return self.X.gr_degrees

    @property
    def filtrations(self) -> range:
        return self.X.e1_range

    @property
    def r_infinity(self) -> int:
        """A page index from which nothing changes any more."""
        return self.X.length + 2

    def cells(self):
        for n in self.degrees:
            for s in self.filtrations:
                yield n, s

    def in_range(self, n: int, s: int) -> bool:
        return n in self.degrees and s in self.filtrations

    def _r(self, r) -> int:
        if r == INF:
            return self.r_infinity
        if r < 1:
            raise SpectralSequenceError("pages start at r = 1")
        return min(r, self.r_infinity)

    # lattices -----------------------------------------------------------
    def e1(self, n: int, s: int) -> Subquotient:
        return self.couple.E(n, s)

    def dim(self, n: int, s: int) -> int:
        return self.e1(n, s).dim

    def cycles(self, n: int, s: int, r: int) -> list[Vector]:
        """Z_r^{n,s}: ambient generators (the boundaries of Gr included)."""
        if r != INF:
            r = min(r, self.r_infinity)
        else:
            r = self.r_infinity
        key = (n, s, r)
        if key in self._Z:
            return self._Z[key]
        E = self.e1(n, s)
        if r == 0 or E.is_trivial():
            out = list(E.sub)
        else:
            d = self.couple.boundary(n, s)
            img = self.couple.tau(n - 1, s + 1 + r, s + 1).image()
            out = [E.lift(c) for c in d.preimage(img)] + list(E.quot)
        self._Z[key] = out
        return out

    def boundaries(self, n: int, s: int, r: int) -> list[Vector]:
        """B_r^{n,s}, accumulated from the images of d_1, ..., d_r."""
        r = self.r_infinity if r == INF else min(r, self.r_infinity)
        key = (n, s, r)
        if key in self._B:
            return self._B[key]
        E = self.e1(n, s)
        if r == 0 or E.is_trivial():
            out = list(E.quot)
        else:
            prev = self.boundaries(n, s, r - 1)
            d = self.differential(r, n + 1, s - r)
            out = prev + d.image_ambient()
        self._B[key] = out
        return out

    def boundaries_by_couple(self, n: int, s: int, r: int) -> list[Vector]:
        """j(ker τ^r : A^{n,s} -> A^{n,s-r}) plus the boundaries of Gr."""
        E = self.e1(n, s)
        ker = self.couple.tau(n, s, s - r).kernel_ambient()
        return [self.couple.j_vector(s, n, k) for k in ker] + list(E.quot)

    def group(self, r, n: int, s: int) -> Subquotient:
        """E_r^{n,s} = Z_{r-1}/B_{r-1}."""
        r = self._r(r)
        key = (n, s, r)
        if key not in self._E:
            E = self.e1(n, s)
            if r == 1:
                g = E
            else:
                g = Subquotient(self.ring, E.dim, self.cycles(n, s, r - 1), self.boundaries(n, s, r - 1))
            self._E[key] = g
        return self._E[key]

    def differential(self, r, n: int, s: int) -> Hom:
        """d_r : E_r^{n,s} -> E_r^{n-1,s+r}."""
        r = self._r(r)
        key = (n, s, r)
        if key in self._d:
            return self._d[key]
        src = self.group(r, n, s)
        tgt = self.group(r, n - 1, s + r)
        if src.is_trivial() or tgt.is_trivial():
            h = Hom.zero(src, tgt)
        else:
            tau = self.couple.tau(n - 1, s + r, s + 1)
            bd = self.couple.boundary(n, s)
            Hs = self.couple.A(n - 1, s + r)
            cols = []
            for x in src.generators:
                y = bd.apply_vec(x)
                alpha = tau.solve(y)
                if alpha is None:
                    raise SpectralSequenceError(f"no τ^{r - 1}-lift for a cycle at ({n},{s})")
                v = self.couple.j_vector(s + r, n - 1, Hs.lift(alpha))
                cols.append(tgt.coords(v))
            h = Hom(src, tgt, Matrix.from_columns(cols, tgt.ngens))
            self._certify(r, n, s, tau)
        self._d[key] = h
        return h

    def _certify(self, r: int, n: int, s: int, tau: Hom) -> None:
        # the lift α is unique up to ker τ^{r-1}; its j-image must die in E_r
        B = self.boundaries(n - 1, s + r, r - 1)
        E = self.e1(n - 1, s + r)
        vecs = [self.couple.j_vector(s + r, n - 1, k) for k in tau.kernel_ambient()]
        if not span_le(self.ring, E.dim, vecs, B):
            raise SpectralSequenceError(f"d_{r} at ({n},{s}) depends on the choice of lift")
        self.certified.add((r, n, s))

    def page(self, r) -> PageData:
        rr = self._r(r)
        groups, diffs, Z, B = {}, {}, {}, {}
        for n, s in self.cells():
            groups[(n, s)] = self.group(rr, n, s)
            Z[(n, s)] = self.cycles(n, s, rr - 1)
            B[(n, s)] = self.boundaries(n, s, rr - 1)
        for n, s in self.cells():
            diffs[(n, s)] = self.differential(rr, n, s)
        return PageData(r if r == INF else rr, groups, diffs, (-1, rr), cycles=Z, boundaries=B)

    def e_infinity(self, n: int, s: int) -> Subquotient:
        return self.group(INF, n, s)

    # laws -----------------------------------------------------------------
    def page_homology_holds(self, r: int, n: int, s: int) -> bool:
        """Z_r = ker d_r + B_{r-1} and B_r = im d_r + B_{r-1} as lattices."""
        E = self.e1(n, s)
        dr = self.differential(r, n, s)
        ker = dr.kernel_ambient() + self.boundaries(n, s, r - 1)
        if not span_eq(self.ring, E.dim, ker, self.cycles(n, s, r)):
            return False
        din = self.differential(r, n + 1, s - r)
        im = din.image_ambient() + self.boundaries(n, s, r - 1)
        return span_eq(self.ring, E.dim, im, self.boundaries(n, s, r))

    def boundary_formula_holds(self, r: int, n: int, s: int) -> bool:
        E = self.e1(n, s)
        return span_eq(self.ring, E.dim, self.boundaries(n, s, r), self.boundaries_by_couple(n, s, r))

    def d_squared_zero(self, r: int, n: int, s: int) -> bool:
        a = self.differential(r, n, s)
        b = self.differential(r, n - 1, s + r)
        return b.compose(a).is_zero()

    def re_infinity(self, n: int, s: int) -> tuple[Subquotient, int]:
        """lim^1 of the Z_r: zero here, with the page from which Z_r is constant."""
        E = self.e1(n, s)
        final = self.cycles(n, s, self.r_infinity)
        r0 = self.r_infinity
        while r0 > 1 and span_eq(self.ring, E.dim, self.cycles(n, s, r0 - 1), final):
            r0 -= 1
        return Subquotient(self.ring, 0, []), r0

    # detection and convergence -----------------------------------------
    def colimit_hom(self, n: int, s: int) -> Hom:
        X = self.X
        return X.to_colimit(s).induced(n)

    def detects(self, n: int, s: int, x: Sequence[int], theta: Sequence[int]) -> Vector | None:
        """Whether the E_1 class x (ambient vector of Gr^s_n) detects θ
        (ambient vector of X^{-inf}_n); returns a witness lift α in
        H_n(X^s) coordinates, or None when none exists."""
        Einf = self.e_infinity(n, s)
        if not Einf.contains(x):
            raise PreconditionError(f"class at ({n},{s}) is not a permanent cycle")
        if Einf.is_zero(x):
            raise PreconditionError(f"class at ({n},{s}) is zero on the E_infinity page")
        j = self.couple.j(n, s)
        c = self.colimit_hom(n, s)
        E1 = self.e1(n, s)
        W = c.tgt
        x_c = E1.coords(x)
        t_c = W.coords(theta)
        F = j.matrix.vstack(c.matrix)
        orders = list(E1.orders) + list(W.orders)
        cols = F.columns()
        for k, d in enumerate(orders):
            if d:
                cols.append(tuple(d if i == k else 0 for i in range(len(orders))))
        aug = Matrix.from_columns(cols, len(orders))
        sol = solve(aug, tuple(x_c) + tuple(t_c), self.ring)
        if sol is None:
            return None
        return j.src.reduce_coords(sol[: j.src.ngens])

    def filtration_subgroup(self, n: int, s: int) -> list[Vector]:
        """F^s H_n(X^{-inf}) = im(H_n(X^s) -> H_n(X^{-inf})), ambient generators."""
        c = self.colimit_hom(n, s)
        return c.image_ambient() + list(c.tgt.quot)

    def comparison_map(self, n: int, s: int) -> Hom:
        """F^s/F^{s+1} -> E_infinity^{n,s}, α |-> j(α)."""
        c = self.colimit_hom(n, s)
        W = c.tgt
        G = Subquotient(self.ring, W.dim, self.filtration_subgroup(n, s), self.filtration_subgroup(n, s + 1))
        Einf = self.e_infinity(n, s)
        Hs = self.couple.A(n, s)
        images = []
        for g in G.generators:
            alpha = c.solve(W.coords(g))
            if alpha is None:
                raise SpectralSequenceError("filtration generator has no lift")
            images.append(self.couple.j_vector(s, n, Hs.lift(alpha)))
        return Hom.from_images(G, Einf, images)


def page(X: FilteredComplex, r) -> PageData:
    return SpectralSequence(X).page(r)


def re_infty(X: FilteredComplex, n: int, s: int):
    return SpectralSequence(X).re_infinity(n, s)


def detects(X: FilteredComplex, n: int, s: int, x, theta):
    return SpectralSequence(X).detects(n, s, x, theta)


@dataclass
class ConvergenceReport:
    comparison_injective: bool
    comparison_iso: dict
    conditionally_convergent: bool
    derived_complete_filtration: bool
    strongly_convergent: bool
    right_concentrated: bool
    left_concentrated: bool
    vanishes_above: bool
    boardman_consistent: bool
    vanishing_implies_strong: bool

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["comparison_iso"] = {f"{k[0]},{k[1]}": v for k, v in sorted(self.comparison_iso.items())}
        return d


def comparison_and_convergence(X: FilteredComplex, ss: SpectralSequence | None = None) -> ConvergenceReport:
    ss = ss or SpectralSequence(X)
    iso, inj = {}, True
    for n, s in ss.cells():
        h = ss.comparison_map(n, s)
        inj = inj and h.is_injective()
        iso[(n, s)] = h.is_injective() and h.is_surjective()
    conditional = X.is_complete()
    # lim_s F^s: the filtration is constant from s_max on (or zero above it)
    if X.above == ZERO:
        derived_complete = True
    else:
        derived_complete = all(
            Subquotient(X.ring, X.colimit().rank(n), ss.filtration_subgroup(n, X.s_max), X.colimit().homology(n).quot).is_trivial()
            for n in X.degrees
        )
    strong = derived_complete and all(iso.values())
    vanishes = X.above == ZERO or all(X.level(X.s_max).homology(n).is_trivial() for n in X.degrees)
    boardman = (conditional == strong) if X.right_concentrated else True
    return ConvergenceReport(
        comparison_injective=inj,
        comparison_iso=iso,
        conditionally_convergent=conditional,
        derived_complete_filtration=derived_complete,
        strongly_convergent=strong,
        right_concentrated=X.right_concentrated,
        left_concentrated=X.left_concentrated,
        vanishes_above=vanishes,
        boardman_consistent=boardman,
        vanishing_implies_strong=(not vanishes) or strong,
    )


def reindex_second_page(p: PageData, inverse: bool = False) -> PageData:
    """Ẽ_{r+1}^{n,s} = E_r^{n,s+n}; with inverse=True undo it."""
    sign = 1 if inverse else -1
    if not inverse and p.reindexed:
        raise SpectralSequenceError("page is already in second-page indexing")
    if inverse and not p.reindexed:
        raise SpectralSequenceError("page is not reindexed")

    def lab(k):
        n, s = k
        return (n, s + sign * n)

    r = p.r
    new_r = r if r == INF else (r + 1 if not inverse else r - 1)
    db = (p.bidegree[0], p.bidegree[1] + (1 if not inverse else -1))
    return PageData(
        new_r,
        {lab(k): v for k, v in p.groups.items()},
        {lab(k): v for k, v in p.diffs.items()},
        db,
        reindexed=not inverse,
        cycles={lab(k): v for k, v in p.cycles.items()},
        boundaries={lab(k): v for k, v in p.boundaries.items()},
    )
