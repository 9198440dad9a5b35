"""Slow, independent reference computations used only by the tests.

Nothing here calls the page engine or the Smith normal form of the package:
lattices are handled by a small column-echelon routine and invariant factors
by gcds of minors.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd


# ---------------------------------------------------------------------------
# determinants and invariant factors


def det(rows: list[list[int]]) -> int:
    n = len(rows)
    if n == 0:
        return 1
    m = [[Fraction(x) for x in r] for r in rows]
    out = Fraction(1)
    for i in range(n):
        p = next((k for k in range(i, n) if m[k][i]), None)
        if p is None:
            return 0
        if p != i:
            m[i], m[p] = m[p], m[i]
            out = -out
        out *= m[i][i]
        for k in range(i + 1, n):
            f = m[k][i] / m[i][i]
            if f:
                for j in range(i, n):
                    m[k][j] -= f * m[i][j]
    return int(out)


def rank_q(rows: list[list[int]]) -> int:
    """Rank over Q by Fraction elimination."""
    m = [[Fraction(x) for x in r] for r in rows if any(r)]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        p = next((k for k in range(rank, len(m)) if m[k][c]), None)
        if p is None:
            continue
        m[rank], m[p] = m[p], m[rank]
        for k in range(rank + 1, len(m)):
            f = m[k][c] / m[rank][c]
            if f:
                m[k] = [a - f * b for a, b in zip(m[k], m[rank])]
        rank += 1
    return rank


def determinantal_divisors(rows: list[list[int]]) -> list[int]:
    """d_k = gcd of all k x k minors, for k = 1 .. rank."""
    nr = len(rows)
    nc = len(rows[0]) if rows else 0
    out = []
    for k in range(1, min(nr, nc) + 1):
        g = 0
        for R in itertools.combinations(range(nr), k):
            for C in itertools.combinations(range(nc), k):
                g = gcd(g, det([[rows[i][j] for j in C] for i in R]))
        if g == 0:
            break
        out.append(g)
    return out


def invariant_factors(rows: list[list[int]]) -> list[int]:
    """Nonzero diagonal of the Smith form, from determinantal divisors."""
    d = determinantal_divisors(rows)
    return [d[0]] + [d[i] // d[i - 1] for i in range(1, len(d))] if d else []


def cokernel_invariants(rows: list[list[int]], nrows: int) -> tuple[int, list[int]]:
    """(free rank, torsion orders > 1) of Z^nrows / column span."""
    f = invariant_factors(rows) if rows and rows[0] else []
    return nrows - len(f), sorted(x for x in f if abs(x) > 1)


# ---------------------------------------------------------------------------
# lattices over Z (p = 0) or F_p


class Lat:
    def __init__(self, p: int = 0):
        self.p = p

    def red(self, x: int) -> int:
        return x % self.p if self.p else x

    def echelon(self, cols: list[list[int]], dim: int):
        """Column echelon form H = M U with U unimodular; returns (H, U, pivots)."""
        m = len(cols)
        H = [[self.red(x) for x in c] for c in cols]
        U = [[int(i == j) for i in range(m)] for j in range(m)]  # U[j] = column j
        pivots = []
        k = 0
        for row in range(dim):
            if k >= m:
                break
            while True:
                nz = [j for j in range(k, m) if H[j][row]]
                if not nz:
                    break
                j0 = min(nz, key=lambda j: abs(H[j][row]) if not self.p else 0)
                H[k], H[j0] = H[j0], H[k]
                U[k], U[j0] = U[j0], U[k]
                done = True
                for j in range(k + 1, m):
                    if H[j][row]:
                        if self.p:
                            q = H[j][row] * pow(H[k][row], -1, self.p)
                        else:
                            q = H[j][row] // H[k][row]
                        H[j] = [self.red(a - q * b) for a, b in zip(H[j], H[k])]
                        U[j] = [self.red(a - q * b) for a, b in zip(U[j], U[k])]
                        if H[j][row]:
                            done = False
                if done:
                    break
            if H[k][row] if k < m else False:
                pivots.append(row)
                k += 1
        return H, U, pivots

    def kernel(self, cols: list[list[int]], dim: int) -> list[list[int]]:
        """Basis of {x : sum x_j cols[j] = 0} (saturated over Z)."""
        H, U, piv = self.echelon(cols, dim)
        return [U[j] for j in range(len(piv), len(cols))]

    def solve(self, cols: list[list[int]], dim: int, b: list[int]) -> list[int] | None:
        if not cols:
            return [] if not any(self.red(x) for x in b) else None
        H, U, piv = self.echelon(cols, dim)
        res = [self.red(x) for x in b]
        y = [0] * len(cols)
        for j, row in enumerate(piv):
            h = H[j][row]
            if self.p:
                c = res[row] * pow(h, -1, self.p) % self.p
            else:
                if res[row] % h:
                    return None
                c = res[row] // h
            y[j] = c
            res = [self.red(a - c * x) for a, x in zip(res, H[j])]
        if any(res):
            return None
        return [self.red(sum(y[j] * U[j][i] for j in range(len(cols)))) for i in range(len(cols))]

    def contains(self, cols, dim, v) -> bool:
        return self.solve(list(cols), dim, list(v)) is not None

    def le(self, a, b, dim) -> bool:
        return all(self.contains(b, dim, v) for v in a)

    def eq(self, a, b, dim) -> bool:
        return self.le(a, b, dim) and self.le(b, a, dim)


def matvec(rows, v) -> list[int]:
    return [sum(r[j] * v[j] for j in range(len(v))) for r in rows]


def columns(mat) -> list[list[int]]:
    """Columns of a package Matrix (or a list of rows) as plain lists."""
    rows = mat.rows if hasattr(mat, "rows") else mat
    ncols = mat.ncols if hasattr(mat, "ncols") else (len(rows[0]) if rows else 0)
    return [[r[j] for r in rows] for j in range(ncols)]


def rows_of(mat) -> list[list[int]]:
    return [list(r) for r in mat.rows]


# ---------------------------------------------------------------------------
# homology of a chain complex, by minors


def homology_invariants(c, n: int) -> tuple[int, list[int]]:
    """(free rank, torsion) of H_n of a package ChainComplex over Z."""
    dim = c.rank(n)
    d_out = rows_of(c.d(n)) if c.rank(n - 1) and dim else []
    d_in = rows_of(c.d(n + 1)) if c.rank(n + 1) and dim else []
    rk_out = len(invariant_factors(d_out)) if d_out else 0
    f_in = invariant_factors(d_in) if d_in else []
    free = dim - rk_out - len(f_in)
    return free, sorted(x for x in f_in if abs(x) > 1)


def group_invariants(G) -> tuple[int, list[int]]:
    """The same pair read off a package Subquotient."""
    free = sum(1 for d in G.orders if d == 0)
    return free, sorted(d for d in G.orders if d > 1)


# ---------------------------------------------------------------------------
# the spectral sequence, derived couple by derived couple


class DerivedCouplePages:
    """E_{r+1} = H(E_r, d_r), computed as literal lattices Z^(r), B^(r) in
    the chain coordinates of Gr^s = Cone(X^{s+1} -> X^s).

    d_r of a cycle z = (a, b): write a = T c + d e with T : X^{s+r} -> X^{s+1}
    and c a cycle, then d_r z = (0, c) in Gr^{s+r}.
    """

    def __init__(self, X):
        self.X = X
        self.L = Lat(X.ring.p if X.ring.is_field else 0)
        self.cells = [(n, s) for n in X.gr_degrees for s in X.e1_range]
        self.Z = {0: {}}
        self.B = {0: {}}
        for n, s in self.cells:
            g = X.gr(s)
            self.Z[0][(n, s)] = self.L.kernel(columns(g.d(n)), g.rank(n - 1))
            self.B[0][(n, s)] = columns(g.d(n + 1))
        self.D = {}

    def dim(self, n, s) -> int:
        return self.X.gr(s).rank(n)

    def lift(self, r: int, n: int, s: int, z) -> list[int] | None:
        """A chain representative of d_r(z) in Gr^{s+r}_{n-1}."""
        X = self.X
        cone = X.gr_cone(s)
        a, _ = cone.split(n, z)
        top = X.level(s + r)
        mid = X.level(s + 1)
        T = X.composite(s + r, s + 1).f(n - 1)
        zc = self.L.kernel(columns(top.d(n - 1)), top.rank(n - 2))
        cols = [matvec(T.rows, c) for c in zc] + [[-x for x in c] for c in columns(mid.d(n))]
        x = self.L.solve(cols, mid.rank(n - 1), list(a))
        if x is None:
            return None
        c = [sum(x[i] * zc[i][k] for i in range(len(zc))) for k in range(top.rank(n - 1))]
        pre = X.level(s + r + 1).rank(n - 2)
        return [0] * pre + [self.L.red(v) for v in c]

    def step(self, r: int) -> None:
        """From (Z^(r-1), B^(r-1)) build d_r and (Z^(r), B^(r))."""
        Zp, Bp = self.Z[r - 1], self.B[r - 1]
        Zn, Bn = {}, {key: list(v) for key, v in Bp.items()}
        for n, s in self.cells:
            tgt = (n - 1, s + r)
            zs = Zp[(n, s)]
            if tgt not in Zp:
                Zn[(n, s)] = zs
                continue
            imgs = []
            for z in zs:
                v = self.lift(r, n, s, z)
                if v is None:
                    raise AssertionError(f"d_{r} has no lift at ({n},{s})")
                imgs.append(v)
            self.D[(r, n, s)] = (zs, imgs)
            dim_t = self.dim(*tgt)
            if not zs:
                Zn[(n, s)] = []
                continue
            K = self.L.kernel(imgs + Bp[tgt], dim_t)
            m = len(zs)
            keep = []
            for k in K:
                v = [self.L.red(sum(k[i] * zs[i][j] for i in range(m))) for j in range(self.dim(n, s))]
                keep.append(v)
            Zn[(n, s)] = keep + list(Bp[(n, s)])
            Bn[tgt] = Bn[tgt] + imgs
        self.Z[r], self.B[r] = Zn, Bn


def compare_with_engine(X, ss, r_max: int | None = None) -> list[str]:
    """Walk the oracle page by page and compare every lattice and differential."""
    O = DerivedCouplePages(X)
    L = O.L
    R = r_max or ss.r_infinity
    bad = []
    for r in range(1, R + 1):
        for n, s in O.cells:
            dim = O.dim(n, s)
            G = ss.group(r, n, s)
            if not L.eq(G.sub, O.Z[r - 1][(n, s)], dim) and dim:
                bad.append(f"Z_{r - 1} at ({n},{s})")
            if not L.eq(G.quot, O.B[r - 1][(n, s)], dim) and dim:
                bad.append(f"B_{r - 1} at ({n},{s})")
        O.step(r)
        for n, s in O.cells:
            tgt = (n - 1, s + r)
            if tgt not in O.Z[r - 1]:
                continue
            d = ss.differential(r, n, s)
            G = ss.group(r, n, s)
            Gt = ss.group(r, *tgt)
            for g, col in zip(G.generators, d.matrix.columns()):
                v = O.lift(r, n, s, list(g))
                if v is None:
                    bad.append(f"d_{r} lift at ({n},{s})")
                    continue
                diff = [a - b for a, b in zip(Gt.lift(col), v)]
                if not L.contains(list(O.B[r - 1][tgt]), O.dim(*tgt), diff):
                    bad.append(f"d_{r} value at ({n},{s})")
    return bad
