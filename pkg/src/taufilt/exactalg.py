"""Exact linear algebra over the integers and prime fields.

Everything here works on Python ints. A ``Ring`` is either ``ZZ`` or ``GF(p)``;
matrices are immutable ``Matrix`` values and carry no ring, so every
algorithm takes the ring explicitly.

The central object is :class:`Subquotient`, a finitely generated abelian group
realised as S/Q inside a free ambient module. All homology groups and all
spectral sequence pages in the package are instances of it, which means
elements of different pages can be compared as honest ambient vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

Vector = tuple[int, ...]


class AlgebraError(ValueError):
    """Raised on dimension mismatches or violated containment."""


@dataclass(frozen=True)
class Ring:
    """Z (``p is None``) or the prime field F_p."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None:
            if self.p < 2 or any(self.p % q == 0 for q in range(2, int(self.p**0.5) + 1)):
                raise AlgebraError(f"{self.p} is not prime")

    @property
    def is_field(self) -> bool:
        return self.p is not None

    def __repr__(self) -> str:
        return "ZZ" if self.p is None else f"GF({self.p})"

    @property
    def name(self) -> str:
        return "Z" if self.p is None else f"F{self.p}"

    def reduce(self, a: int) -> int:
        return a if self.p is None else a % self.p

    def is_unit(self, a: int) -> bool:
        if self.p is None:
            return a in (1, -1)
        return a % self.p != 0

    def inverse(self, a: int) -> int:
        if self.p is None:
            if a not in (1, -1):
                raise AlgebraError(f"{a} is not a unit in Z")
            return a
        return pow(a, -1, self.p)

    def size(self, a: int) -> int:
        return abs(a) if self.p is None else 1

    def divides(self, a: int, b: int) -> bool:
        """Whether a | b."""
        if self.p is None:
            return b == 0 if a == 0 else b % a == 0
        return a % self.p != 0 or b % self.p == 0

    def quo(self, b: int, a: int) -> int:
        """The exact quotient b / a, assuming a | b and a != 0."""
        if self.p is None:
            return b // a
        return b * pow(a, -1, self.p) % self.p

    def gcdex(self, a: int, b: int) -> tuple[int, int, int, int, int]:
        """Return (g, s, t, u, v) with s*a + t*b = g, u*a + v*b = 0, sv - tu = 1."""
        if self.p is not None:
            a %= self.p
            b %= self.p
            if a:
                return 1, pow(a, -1, self.p), 0, -b % self.p, a
            return 1, 0, pow(b, -1, self.p), -b % self.p, 0
        old_r, r = a, b
        old_s, s = 1, 0
        old_t, t = 0, 1
        while r:
            q = old_r // r
            old_r, r = r, old_r - q * r
            old_s, s = s, old_s - q * s
            old_t, t = t, old_t - q * t
        g, x, y = old_r, old_s, old_t
        if g < 0:
            g, x, y = -g, -x, -y
        return g, x, y, -b // g, a // g

    def normalizer(self, a: int) -> int:
        """A unit c such that c*a is the canonical associate of a."""
        if self.p is None:
            return -1 if a < 0 else 1
        return pow(a, -1, self.p) if a % self.p else 1

    def residue(self, x: int, d: int) -> int:
        """Least nonnegative residue of x modulo the invariant factor d."""
        if self.p is not None:
            return x % self.p
        return x % d if d else x


ZZ = Ring(None)


def GF(p: int) -> Ring:
    return Ring(p)


class Matrix:
    """An immutable integer matrix with explicit shape (zero sizes allowed)."""

    __slots__ = ("rows", "nrows", "ncols", "_cache")

    def __init__(self, rows: Iterable[Iterable[int]], nrows: int | None = None, ncols: int | None = None):
        rows = tuple(tuple(map(int, r)) for r in rows)
        if nrows is None:
            nrows = len(rows)
        if ncols is None:
            if not rows:
                raise AlgebraError("ncols required for a matrix with no rows")
            ncols = len(rows[0])
        if len(rows) != nrows or any(len(r) != ncols for r in rows):
            raise AlgebraError("ragged matrix or wrong shape")
        self.rows = rows
        self.nrows = nrows
        self.ncols = ncols
        self._cache = {}

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "Matrix":
        return cls(((0,) * ncols for _ in range(nrows)), nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls((tuple(int(i == j) for j in range(n)) for i in range(n)), n, n)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[int]], nrows: int) -> "Matrix":
        cols = [tuple(c) for c in cols]
        if any(len(c) != nrows for c in cols):
            raise AlgebraError("column length mismatch")
        return cls((tuple(c[i] for c in cols) for i in range(nrows)), nrows, len(cols))

    @classmethod
    def diagonal(cls, entries: Sequence[int]) -> "Matrix":
        n = len(entries)
        return cls((tuple(entries[i] if i == j else 0 for j in range(n)) for i in range(n)), n, n)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.shape, self.rows))

    def __repr__(self):
        return f"Matrix({[list(r) for r in self.rows]}, {self.nrows}x{self.ncols})"

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.ncols)]

    @property
    def T(self) -> "Matrix":
        return Matrix(self.columns(), self.ncols, self.nrows)

    @classmethod
    def _raw(cls, rows: tuple, nrows: int, ncols: int) -> "Matrix":
        # trusted constructor: rows is already a tuple of int tuples of the right shape
        m = cls.__new__(cls)
        m.rows, m.nrows, m.ncols, m._cache = rows, nrows, ncols, {}
        return m

    def _sparse_rows(self) -> list:
        sp = self._cache.get("sparse")
        if sp is None:
            sp = [[(j, a) for j, a in enumerate(r) if a] for r in self.rows]
            self._cache["sparse"] = sp
        return sp

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise AlgebraError(f"cannot multiply {self.shape} by {other.shape}")
        n = other.ncols
        osp = other._sparse_rows()
        out = []
        for row in self._sparse_rows():
            acc = [0] * n
            for k, a in row:
                for j, b in osp[k]:
                    acc[j] += a * b
            out.append(tuple(acc))
        return Matrix._raw(tuple(out), self.nrows, n)

    def apply(self, v: Sequence[int]) -> Vector:
        if len(v) != self.ncols:
            raise AlgebraError(f"vector of length {len(v)} for matrix {self.shape}")
        return tuple(sum([a * v[j] for j, a in row]) for row in self._sparse_rows())

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise AlgebraError("shape mismatch in sum")
        return Matrix._raw(tuple(tuple(map(int.__add__, r, s)) for r, s in zip(self.rows, other.rows)), *self.shape)

    def __neg__(self) -> "Matrix":
        return self.scale(-1)

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise AlgebraError("shape mismatch in difference")
        return Matrix._raw(tuple(tuple(map(int.__sub__, r, s)) for r, s in zip(self.rows, other.rows)), *self.shape)

    def scale(self, c: int) -> "Matrix":
        c = int(c)
        return Matrix._raw(tuple(tuple(c * a for a in r) for r in self.rows), *self.shape)

    def reduce(self, ring: Ring) -> "Matrix":
        if ring.p is None:
            return self
        p = ring.p
        if not self.nrows or not self.ncols or (min(map(min, self.rows)) >= 0 and max(map(max, self.rows)) < p):
            return self
        return Matrix._raw(tuple(tuple(a % p for a in r) for r in self.rows), *self.shape)

    def is_zero(self, ring: Ring = ZZ) -> bool:
        if ring.p is None:
            return not any(any(r) for r in self.rows)
        p = ring.p
        return all(a % p == 0 for r in self.rows for a in r if a)

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.nrows != other.nrows:
            raise AlgebraError("row mismatch in hstack")
        return Matrix((r + s for r, s in zip(self.rows, other.rows)), self.nrows, self.ncols + other.ncols)

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.ncols:
            raise AlgebraError("column mismatch in vstack")
        return Matrix(self.rows + other.rows, self.nrows + other.nrows, self.ncols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix((tuple(self.rows[i][j] for j in cols) for i in rows), len(rows), len(cols))

    def to_list(self) -> list[list[int]]:
        return [list(r) for r in self.rows]


def block_diag(a: Matrix, b: Matrix) -> Matrix:
    top = a.hstack(Matrix.zero(a.nrows, b.ncols))
    bot = Matrix.zero(b.nrows, a.ncols).hstack(b)
    return top.vstack(bot)


def equal_mod(ring: Ring, u: Sequence[int], v: Sequence[int]) -> bool:
    return len(u) == len(v) and all(ring.reduce(a - b) == 0 for a, b in zip(u, v))


# --------------------------------------------------------------------------
# Smith normal form


class SmithForm:
    """U @ m @ V = D with U, V invertible over the ring; also keeps U^-1, V^-1."""

    def __init__(self, ring, U, Uinv, diag, V, Vinv, nrows, ncols):
        self.ring = ring
        self.U = U
        self.Uinv = Uinv
        self.diag = diag
        self.V = V
        self.Vinv = Vinv
        self.nrows = nrows
        self.ncols = ncols
        self.rank = len(diag)

    @cached_property
    def D(self) -> Matrix:
        return Matrix(
            (tuple(self.diag[i] if i == j and i < self.rank else 0 for j in range(self.ncols)) for i in range(self.nrows)),
            self.nrows,
            self.ncols,
        )


def smith(m: Matrix, ring: Ring = ZZ) -> SmithForm:
    """Smith normal form over a Euclidean ring, with both transforms tracked.

    Over a field this is plain Gaussian elimination with column pivoting; the
    only ring-specific ingredient is ``ring.gcdex``.
    """
    key = ("snf", ring)
    if key in m._cache:
        return m._cache[key]
    nr, nc = m.nrows, m.ncols
    red = ring.reduce
    A = [[red(x) for x in r] for r in m.rows]
    U = [[int(i == j) for j in range(nr)] for i in range(nr)]
    Ui = [[int(i == j) for j in range(nr)] for i in range(nr)]
    V = [[int(i == j) for j in range(nc)] for i in range(nc)]
    Vi = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def row_op(i, j, s, t, u, v):
        # rows (i, j) <- (s r_i + t r_j, u r_i + v r_j); det = 1
        for M in (A, U):
            ri, rj = M[i], M[j]
            M[i] = [red(s * a + t * b) for a, b in zip(ri, rj)]
            M[j] = [red(u * a + v * b) for a, b in zip(ri, rj)]
        for r in Ui:
            a, b = r[i], r[j]
            r[i] = red(v * a - u * b)
            r[j] = red(-t * a + s * b)

    def col_op(i, j, s, t, u, v):
        # cols (i, j) <- (s c_i + t c_j, u c_i + v c_j); det = 1
        for M in (A, V):
            for r in M:
                a, b = r[i], r[j]
                r[i] = red(s * a + t * b)
                r[j] = red(u * a + v * b)
        ri, rj = Vi[i], Vi[j]
        Vi[i] = [red(v * a - u * b) for a, b in zip(ri, rj)]
        Vi[j] = [red(-t * a + s * b) for a, b in zip(ri, rj)]

    def swap_rows(i, j):
        if i != j:
            for M in (A, U):
                M[i], M[j] = M[j], M[i]
            for r in Ui:
                r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        if i != j:
            for M in (A, V):
                for r in M:
                    r[i], r[j] = r[j], r[i]
            Vi[i], Vi[j] = Vi[j], Vi[i]

    diag: list[int] = []
    t = 0
    while t < min(nr, nc):
        best = None
        for i in range(t, nr):
            row = A[i]
            for j in range(t, nc):
                if row[j]:
                    k = ring.size(row[j])
                    if best is None or k < best[0]:
                        best = (k, i, j)
                        if k == 1:
                            break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            for i in range(t + 1, nr):
                b = A[i][t]
                if b:
                    a = A[t][t]
                    if ring.divides(a, b):
                        row_op(t, i, 1, 0, -ring.quo(b, a), 1)
                    else:
                        _, s, tt, u, v = ring.gcdex(a, b)
                        row_op(t, i, s, tt, u, v)
            for j in range(t + 1, nc):
                b = A[t][j]
                if b:
                    a = A[t][t]
                    if ring.divides(a, b):
                        col_op(t, j, 1, 0, -ring.quo(b, a), 1)
                    else:
                        _, s, tt, u, v = ring.gcdex(a, b)
                        col_op(t, j, s, tt, u, v)
            if any(A[i][t] for i in range(t + 1, nr)):
                continue
            if ring.p is None:
                piv = A[t][t]
                bad = next((i for i in range(t + 1, nr) if any(x % piv for x in A[i][t + 1:])), None)
                if bad is not None:
                    row_op(t, bad, 1, 1, 0, 1)
                    continue
            break
        c = ring.normalizer(A[t][t])
        if c != 1:
            A[t] = [red(c * x) for x in A[t]]
            U[t] = [red(c * x) for x in U[t]]
            ci = ring.inverse(c)
            for r in Ui:
                r[t] = red(ci * r[t])
        diag.append(A[t][t])
        t += 1

    res = SmithForm(
        ring,
        Matrix(U, nr, nr),
        Matrix(Ui, nr, nr),
        tuple(diag),
        Matrix(V, nc, nc),
        Matrix(Vi, nc, nc),
        nr,
        nc,
    )
    m._cache[key] = res
    return res


def smith_normal_form(m: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """(U, D, V) with U @ m @ V == D over the integers."""
    f = smith(m, ZZ)
    return f.U, f.D, f.V


def solve(m: Matrix, b: Sequence[int], ring: Ring = ZZ) -> Vector | None:
    """Some x with m x = b, or None when b is not in the image."""
    if len(b) != m.nrows:
        raise AlgebraError(f"right-hand side has length {len(b)}, matrix is {m.shape}")
    f = smith(m, ring)
    c = f.U.apply(b)
    y = []
    for i in range(f.nrows):
        ci = ring.reduce(c[i])
        if i < f.rank:
            if not ring.divides(f.diag[i], ci):
                return None
            y.append(ring.quo(ci, f.diag[i]))
        elif ci != 0:
            return None
    y += [0] * (f.ncols - f.rank)
    y = y[: f.ncols]
    return tuple(ring.reduce(x) for x in f.V.apply(y))


solve_in_image = solve


def kernel_basis(m: Matrix, ring: Ring = ZZ) -> list[Vector]:
    """A basis of the kernel; over Z it is saturated (a direct summand)."""
    if ring.is_field:
        return _field_kernel(m, ring.p)
    f = smith(m, ring)
    return [f.V.column(j) for j in range(f.rank, f.ncols)]


def _field_kernel(m: Matrix, p: int) -> list[Vector]:
    """Kernel over F_p from the reduced row echelon form, one vector per free column."""
    rows = [[a % p for a in r] for r in m.rows]
    nc = m.ncols
    pivots = []
    r = 0
    for c in range(nc):
        k = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if k is None:
            continue
        rows[r], rows[k] = rows[k], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [a * inv % p for a in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(nc) if c not in set(pivots)]
    out = []
    for c in free:
        v = [0] * nc
        v[c] = 1
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][c] % p
        out.append(tuple(v))
    return out


def image_basis(m: Matrix, ring: Ring = ZZ) -> list[Vector]:
    f = smith(m, ring)
    return [tuple(ring.reduce(f.diag[i] * x) for x in f.Uinv.column(i)) for i in range(f.rank)]


def rank(m: Matrix, ring: Ring = ZZ) -> int:
    return smith(m, ring).rank


def cols_matrix(vectors: Sequence[Sequence[int]], dim: int) -> Matrix:
    return Matrix.from_columns(vectors, dim)


# --------------------------------------------------------------------------
# Subquotient groups


class Subquotient:
    """The group <sub>/<quot> inside the free module ring^dim.

    Elements are ambient vectors lying in <sub>. The group is put in Smith
    form once; ``coords`` gives canonical coordinates (least nonnegative
    residues in the Smith basis, unit factors dropped) so two elements are
    equal exactly when their canonical coordinates agree.
    """

    def __init__(self, ring: Ring, dim: int, sub: Iterable[Sequence[int]], quot: Iterable[Sequence[int]] = ()):
        self.ring = ring
        self.dim = dim
        self.sub = tuple(tuple(ring.reduce(x) for x in v) for v in sub)
        self.quot = tuple(tuple(ring.reduce(x) for x in v) for v in quot)
        for v in self.sub + self.quot:
            if len(v) != dim:
                raise AlgebraError(f"vector of length {len(v)} in ambient of rank {dim}")
        smat = cols_matrix(self.sub, dim)
        self._s = smith(smat, ring)
        rel_cols = []
        for k, q in enumerate(self.quot):
            c = self._sub_coords(q)
            if c is None:
                raise AlgebraError(f"quotient generator {k} is not contained in the subgroup")
            rel_cols.append(c)
        r = self._s.rank
        self._rel = smith(cols_matrix(rel_cols, r), ring)
        e = list(self._rel.diag) + [0] * (r - self._rel.rank)
        self._kept = [i for i in range(r) if not ring.is_unit(e[i])]
        self.orders: tuple[int, ...] = tuple(e[i] if not ring.is_field else 0 for i in self._kept)

    # basic data ---------------------------------------------------------
    @property
    def ngens(self) -> int:
        return len(self._kept)

    @property
    def invariants(self) -> tuple[int, ...]:
        """Invariant factors d_1 | d_2 | ... with 0 for each free summand."""
        return self.orders

    @property
    def free_rank(self) -> int:
        return sum(1 for d in self.orders if d == 0)

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(d for d in self.orders if d)

    def is_trivial(self) -> bool:
        return self.ngens == 0

    def order(self) -> int | None:
        """The cardinality, or None if infinite (F_p-spaces are finite)."""
        if self.ring.is_field:
            return self.ring.p ** self.ngens
        if self.free_rank:
            return None
        out = 1
        for d in self.orders:
            out *= d
        return out

    def describe(self) -> str:
        if self.ngens == 0:
            return "0"
        if self.ring.is_field:
            return f"F{self.ring.p}^{self.ngens}" if self.ngens > 1 else f"F{self.ring.p}"
        return " + ".join("Z" if d == 0 else f"Z/{d}" for d in self.orders)

    def __repr__(self):
        return f"Subquotient({self.describe()})"

    @cached_property
    def _basis(self) -> list[Vector]:
        s = self._s
        return [tuple(s.diag[i] * x for x in s.Uinv.column(i)) for i in range(s.rank)]

    @cached_property
    def generators(self) -> list[Vector]:
        """Ambient representatives of the canonical generators."""
        P = self._rel.Uinv
        B = self._basis
        out = []
        for i in self._kept:
            coeffs = P.column(i)
            out.append(tuple(self.ring.reduce(sum(c * b[k] for c, b in zip(coeffs, B))) for k in range(self.dim)))
        return out

    # element handling ---------------------------------------------------
    def _sub_coords(self, x: Sequence[int]) -> list[int] | None:
        s = self._s
        y = s.U.apply(x)
        out = []
        for i, yi in enumerate(y):
            yi = self.ring.reduce(yi)
            if i < s.rank:
                if not self.ring.divides(s.diag[i], yi):
                    return None
                out.append(self.ring.quo(yi, s.diag[i]))
            elif yi:
                return None
        return out

    def contains(self, x: Sequence[int]) -> bool:
        if len(x) != self.dim:
            raise AlgebraError("ambient dimension mismatch")
        return self._sub_coords(x) is not None

    def coords(self, x: Sequence[int]) -> Vector:
        """Canonical coordinates of an ambient vector lying in the subgroup."""
        if len(x) != self.dim:
            raise AlgebraError(f"vector of length {len(x)} in ambient of rank {self.dim}")
        c = self._sub_coords(x)
        if c is None:
            raise AlgebraError("vector is not in the subgroup")
        z = self._rel.U.apply(c)
        return tuple(self.ring.residue(z[i], d) for i, d in zip(self._kept, self.orders))

    def reduce_coords(self, c: Sequence[int]) -> Vector:
        return tuple(self.ring.residue(x, d) for x, d in zip(c, self.orders))

    def lift(self, c: Sequence[int]) -> Vector:
        """An ambient representative of the element with coordinates c."""
        if len(c) != self.ngens:
            raise AlgebraError("coordinate length mismatch")
        out = [0] * self.dim
        for ci, g in zip(c, self.generators):
            if ci:
                for k in range(self.dim):
                    out[k] += ci * g[k]
        return tuple(self.ring.reduce(x) for x in out)

    def is_zero(self, x: Sequence[int]) -> bool:
        return not any(self.coords(x))

    def equal(self, x: Sequence[int], y: Sequence[int]) -> bool:
        return self.coords(x) == self.coords(y)

    def zero(self) -> Vector:
        return (0,) * self.ngens

    def element_order(self, c: Sequence[int]) -> int:
        """Additive order of the element with coordinates c (0 = infinite)."""
        from math import gcd

        if self.ring.is_field:
            return 1 if not any(c) else self.ring.p
        out = 1
        for x, d in zip(self.reduce_coords(c), self.orders):
            if x == 0:
                continue
            if d == 0:
                return 0
            k = d // gcd(d, x)
            out = out * k // gcd(out, k)
        return out

    def elements(self) -> list[Vector]:
        """All elements in canonical coordinates (finite groups only)."""
        import itertools

        if self.order() is None:
            raise AlgebraError("infinite group")
        ranges = [range(self.ring.p) if self.ring.is_field else range(d) for d in self.orders]
        return [tuple(t) for t in itertools.product(*ranges)]

    def relation_matrix(self) -> Matrix:
        return Matrix.diagonal(list(self.orders))

    # subgroups --------------------------------------------------------------
    def sub_span_contains(self, vectors: Sequence[Sequence[int]], x: Sequence[int]) -> bool:
        """Whether x lies in <vectors> + quot."""
        return Subquotient(self.ring, self.dim, list(vectors) + list(self.quot)).contains(x)


def same_invariants(a: Subquotient, b: Subquotient) -> bool:
    return a.ring == b.ring and a.orders == b.orders


def span_contains(ring: Ring, dim: int, vectors: Sequence[Sequence[int]], x: Sequence[int]) -> bool:
    return Subquotient(ring, dim, vectors).contains(x)


def span_le(ring: Ring, dim: int, small: Sequence[Sequence[int]], big: Sequence[Sequence[int]]) -> bool:
    """<small> is contained in <big>."""
    g = Subquotient(ring, dim, big)
    return all(g.contains(v) for v in small)


def span_eq(ring: Ring, dim: int, a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> bool:
    return span_le(ring, dim, a, b) and span_le(ring, dim, b, a)


def cokernel(m: Matrix, ring: Ring = ZZ) -> Subquotient:
    """target / im(m), with the identity as the projection on ambient vectors."""
    n = m.nrows
    return Subquotient(ring, n, Matrix.identity(n).columns(), m.columns())


def subquotient(ambient: Subquotient, sub_gens: Sequence[Sequence[int]], quot_gens: Sequence[Sequence[int]]) -> Subquotient:
    """<sub_gens>/<quot_gens> formed inside the ambient module of a group.

    Generators are ambient vectors of ``ambient``; the quotient relations of
    ``ambient`` are carried along, so the result is a subquotient of it.
    """
    for v in sub_gens:
        if not ambient.contains(v):
            raise AlgebraError("subgroup generator is not an element of the ambient group")
    return Subquotient(ambient.ring, ambient.dim, list(sub_gens) + list(ambient.quot), list(quot_gens) + list(ambient.quot))


class Hom:
    """A homomorphism of subquotients, stored on canonical generators.

    ``matrix[:, i]`` holds the target coordinates of the image of the i-th
    canonical generator of the source.
    """

    def __init__(self, src: Subquotient, tgt: Subquotient, matrix: Matrix, check: bool = True):
        if matrix.shape != (tgt.ngens, src.ngens):
            raise AlgebraError(f"hom matrix shape {matrix.shape}, expected {(tgt.ngens, src.ngens)}")
        self.src = src
        self.tgt = tgt
        self.ring = src.ring
        self.matrix = Matrix(
            (tuple(tgt.ring.residue(x, d) for x in r) for r, d in zip(matrix.rows, tgt.orders)),
            tgt.ngens,
            src.ngens,
        )
        if check and not self.well_defined():
            raise AlgebraError("map does not respect the relations of its source")

    @classmethod
    def from_ambient(cls, src: Subquotient, tgt: Subquotient, m: Matrix) -> "Hom":
        """The map induced by an ambient matrix (which must send sub into sub, quot into quot)."""
        cols = [tgt.coords(m.apply(g)) for g in src.generators]
        for q in src.quot:
            if not tgt.is_zero(m.apply(q)):
                raise AlgebraError("ambient map does not send relations to relations")
        return cls(src, tgt, Matrix.from_columns(cols, tgt.ngens), check=False)

    @classmethod
    def from_images(cls, src: Subquotient, tgt: Subquotient, images: Sequence[Sequence[int]]) -> "Hom":
        """The map sending canonical generator i to the ambient vector images[i]."""
        cols = [tgt.coords(v) for v in images]
        return cls(src, tgt, Matrix.from_columns(cols, tgt.ngens))

    @classmethod
    def zero(cls, src: Subquotient, tgt: Subquotient) -> "Hom":
        return cls(src, tgt, Matrix.zero(tgt.ngens, src.ngens), check=False)

    def well_defined(self) -> bool:
        for i, d in enumerate(self.src.orders):
            if d and not self.ring.is_field:
                col = [d * x for x in self.matrix.column(i)]
                if any(self.tgt.ring.residue(x, e) for x, e in zip(col, self.tgt.orders)):
                    return False
        return True

    def apply(self, c: Sequence[int]) -> Vector:
        return self.tgt.reduce_coords(self.matrix.apply(c))

    def apply_vec(self, x: Sequence[int]) -> Vector:
        """Image of an ambient source vector, as target coordinates."""
        return self.apply(self.src.coords(x))

    def compose(self, first: "Hom") -> "Hom":
        """self ∘ first."""
        return Hom(first.src, self.tgt, self.matrix @ first.matrix, check=False)

    @cached_property
    def _aug(self) -> Matrix:
        # [F | diag(target orders)], kernel of this gives ker F in source coordinates
        tors = [d for d in self.tgt.orders]
        cols = self.matrix.columns()
        for k, d in enumerate(tors):
            if d:
                cols.append(tuple(d if i == k else 0 for i in range(self.tgt.ngens)))
        return Matrix.from_columns(cols, self.tgt.ngens)

    def kernel(self) -> list[Vector]:
        """Generators of the kernel, in source coordinates."""
        k = self.src.ngens
        out = []
        for v in kernel_basis(self._aug, self.ring):
            c = self.src.reduce_coords(v[:k])
            if any(c):
                out.append(c)
        return out

    def kernel_ambient(self) -> list[Vector]:
        return [self.src.lift(c) for c in self.kernel()]

    def kernel_group(self) -> Subquotient:
        return Subquotient(self.ring, self.src.dim, self.kernel_ambient() + list(self.src.quot), self.src.quot)

    def image(self) -> list[Vector]:
        """Generators of the image, in target coordinates."""
        return [c for c in (self.tgt.reduce_coords(col) for col in self.matrix.columns()) if any(c)]

    def image_ambient(self) -> list[Vector]:
        return [self.tgt.lift(c) for c in self.image()]

    def preimage(self, targets: Sequence[Sequence[int]]) -> list[Vector]:
        """Generators (source coordinates) of the preimage of <targets> (target coordinates)."""
        k = self.src.ngens
        m = self._aug
        if targets:
            m = m.hstack(Matrix.from_columns([tuple(-x for x in t) for t in targets], self.tgt.ngens))
        out = []
        for v in kernel_basis(m, self.ring):
            c = self.src.reduce_coords(v[:k])
            if any(c):
                out.append(c)
        return out

    def solve(self, y: Sequence[int]) -> Vector | None:
        """Some source coordinates c with f(c) = y, or None."""
        x = solve(self._aug, y, self.ring)
        if x is None:
            return None
        return self.src.reduce_coords(x[: self.src.ngens])

    def is_zero(self) -> bool:
        return not any(any(c) for c in self.matrix.columns())

    def is_injective(self) -> bool:
        return not self.kernel()

    def is_surjective(self) -> bool:
        n = self.tgt.ngens
        return all(self.solve(tuple(int(i == j) for j in range(n))) is not None for i in range(n))

    def is_iso(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def image_group(self) -> Subquotient:
        return Subquotient(self.ring, self.tgt.dim, self.image_ambient() + list(self.tgt.quot), self.tgt.quot)

    def cokernel_group(self) -> Subquotient:
        return Subquotient(self.ring, self.tgt.dim, list(self.tgt.sub), self.image_ambient() + list(self.tgt.quot))
