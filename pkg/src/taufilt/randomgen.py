"""Seeded random filtered complexes for property testing.

Differentials are drawn first (each d_n from small combinations of the kernel
of d_{n-1}, so d^2 = 0 holds by construction); transitions are then drawn from
the lattice of chain maps, found by solving the linear constraints d f = f d.
Draws that break the entry bound are resampled.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .complexes import ChainComplex, ChainMap
from .exactalg import ZZ, Matrix, Ring, kernel_basis
from .filtration import CONSTANT, ZERO, FilteredComplex


class GenerationError(ValueError):
    pass


@dataclass(frozen=True)
class RandomParams:
    max_levels: int = 4
    max_span: int = 3
    max_rank: int = 3
    entry_bound: int = 3
    ring: Ring = ZZ
    above: str = ZERO
    attempts: int = 40

    def __post_init__(self):
        if not 1 <= self.max_levels <= 6:
            raise GenerationError("the window holds between 1 and 6 levels")
        if not 1 <= self.max_span <= 5:
            raise GenerationError("the degree span is between 1 and 5")
        if not 0 <= self.max_rank <= 4:
            raise GenerationError("ranks are at most 4")
        if not 1 <= self.entry_bound <= 3:
            raise GenerationError("entries lie in [-3, 3]")
        if self.above not in (CONSTANT, ZERO):
            raise GenerationError(f"unknown profile {self.above!r}")


def _combo(rng: random.Random, basis, dim: int, ring: Ring, bound: int, attempts: int):
    """A small random combination of lattice vectors with entries in [-bound, bound]."""
    if not basis:
        return (0,) * dim
    for _ in range(attempts):
        coeffs = [rng.choice((-1, 0, 0, 1)) for _ in basis]
        v = [ring.reduce(sum(c * b[i] for c, b in zip(coeffs, basis))) for i in range(dim)]
        if ring.is_field:
            v = [x - ring.p if x > ring.p // 2 else x for x in v]
        if all(abs(x) <= bound for x in v):
            return tuple(v)
    return (0,) * dim


def random_complex(rng: random.Random, ring: Ring, lo: int, span: int, p: RandomParams) -> ChainComplex:
    ranks = [rng.randint(0, p.max_rank) for _ in range(span)]
    diffs = {}
    prev = None
    for i in range(1, span):
        n = lo + i
        rows, cols = ranks[i - 1], ranks[i]
        if prev is None:
            ker = [tuple(int(a == b) for b in range(rows)) for a in range(rows)]
        else:
            ker = kernel_basis(prev, ring)
        columns = [_combo(rng, ker, rows, ring, p.entry_bound, p.attempts) for _ in range(cols)]
        d = Matrix.from_columns(columns, rows) if cols else Matrix.zero(rows, 0)
        diffs[n] = d
        prev = d
    return ChainComplex(ring, lo, ranks, diffs)


def random_chain_map(
    rng: random.Random, src: ChainComplex, tgt: ChainComplex, p: RandomParams, kill: ChainMap | None = None
) -> ChainMap:
    """A random element of the lattice of chain maps src -> tgt (with f ∘ kill = 0 if given)."""
    ring = src.ring
    degs = list(src.degrees)
    offs, total = {}, 0
    for n in degs:
        offs[n] = total
        total += tgt.rank(n) * src.rank(n)

    def var(n, i, j):  # entry (i, j) of f_n
        return offs[n] + i * src.rank(n) + j

    rows = []
    # (d' f_n - f_{n-1} d)[i, j] = 0 for every n
    for n in degs:
        if n - 1 not in offs:
            continue
        for i in range(tgt.rank(n - 1)):
            for j in range(src.rank(n)):
                row = [0] * total
                dt, ds = tgt.d(n), src.d(n)
                for m in range(tgt.rank(n)):
                    row[var(n, m, j)] += dt[i, m]
                for m in range(src.rank(n - 1)):
                    row[var(n - 1, i, m)] -= ds[m, j]
                rows.append(row)
    if kill is not None:
        for n in degs:
            g = kill.f(n)
            for i in range(tgt.rank(n)):
                for j in range(g.ncols):
                    row = [0] * total
                    for m in range(src.rank(n)):
                        row[var(n, i, m)] += g[m, j]
                    rows.append(row)
    if total == 0:
        sol = ()
    elif rows:
        sol = _combo(rng, kernel_basis(Matrix(rows, len(rows), total), ring), total, ring, p.entry_bound, p.attempts)
    else:
        sol = tuple(rng.randint(-p.entry_bound, p.entry_bound) for _ in range(total))
    mats = {}
    for n in degs:
        r, c = tgt.rank(n), src.rank(n)
        mats[n] = Matrix([[sol[var(n, i, j)] for j in range(c)] for i in range(r)], r, c)
    return ChainMap(src, tgt, mats)


def random_filtered_complex(seed: int, params: RandomParams | None = None) -> FilteredComplex:
    """A deterministic random filtered complex for the given seed.

    Levels are fresh random complexes or copies of the level above (which
    makes scalar transitions such as x2 likely, the source of long
    differentials); transitions are random chain maps.
    """
    p = params or RandomParams()
    rng = random.Random(seed)
    ring = p.ring
    for _ in range(p.attempts):
        L = rng.randint(1, p.max_levels)
        span = rng.randint(1, p.max_span)
        s_min = rng.randint(-1, 1)
        lo = rng.randint(-1, 1)
        top = random_complex(rng, ring, lo, span, p)
        levels = [top]
        trans = []
        for _ in range(L - 1):
            src = levels[-1]
            tgt = src if rng.random() < 0.5 else random_complex(rng, ring, lo, span, p)
            if tgt is src and rng.random() < 0.6:
                c = rng.choice((2, 3, -2)) if not ring.is_field else rng.randint(0, ring.p - 1)
                f = ChainMap.identity(src).scaled(c)
            else:
                f = random_chain_map(rng, src, tgt, p)
            levels.append(tgt)
            trans.append(f)
        if any(sum(c.ranks) for c in levels):
            levels.reverse()
            trans.reverse()
            return FilteredComplex(levels, trans, s_min, CONSTANT, p.above)
        if p.max_rank == 0:
            return FilteredComplex(levels[::-1], trans[::-1], s_min, CONSTANT, p.above)
    raise GenerationError(f"no nonzero instance for seed {seed} after {p.attempts} draws")


def corpus(count: int = 200, params: RandomParams | None = None, start: int = 0) -> list[FilteredComplex]:
    return [random_filtered_complex(start + i, params) for i in range(count)]
