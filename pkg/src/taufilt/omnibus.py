"""Checking the dictionary between π_{*,*}X and the underlying spectral sequence.

``verify_omnibus`` walks every interesting E_1 class (page generators,
permanent cycles and targets of differentials) and checks the lift, torsion,
detection and generation statements, attaching a witness to each claim.
Witnesses are plain chain-level vectors, and ``replay_omnibus`` re-verifies a
serialized report with nothing but matrix arithmetic and linear solving.

``verify_truncated_omnibus`` does the same for X/τ^k, and
``total_diff_table`` tabulates total differentials ∂_a^N with their
compatibility relations and the squares relating them to d_r.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .complexes import ChainComplex
from .exactalg import Hom, Matrix, Ring, Subquotient, Vector, kernel_basis, solve, span_contains, span_eq
from .filtration import FilteredComplex, TotalDifferential, mod_tau_k
from .sseq import INF, PreconditionError, SpectralSequence

FORMAT = 1


@dataclass
class ClassRecord:
    n: int
    s: int
    x: Vector
    permanent: bool
    lift: Vector | None
    cycle_length: int | str
    survival: int | str
    checks: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "s": self.s,
            "x": list(self.x),
            "permanent": self.permanent,
            "lift": None if self.lift is None else list(self.lift),
            "cycle_length": self.cycle_length,
            "survival": self.survival,
            "checks": dict(self.checks),
            "witnesses": _jsonable(self.witnesses),
        }


@dataclass
class OmnibusReport:
    kind: str
    k: int | None
    preconditions: dict
    records: list
    generation: dict
    corollaries: dict
    failures: list

    @property
    def passed(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {
            "format": FORMAT,
            "kind": self.kind,
            "k": self.k,
            "passed": self.passed,
            "preconditions": _jsonable(self.preconditions),
            "records": [r.as_dict() for r in self.records],
            "generation": {f"{n},{s}": _jsonable(v) for (n, s), v in sorted(self.generation.items())},
            "corollaries": _jsonable(self.corollaries),
            "failures": list(self.failures),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k) if not isinstance(k, str) else k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


# ---------------------------------------------------------------------------
# chain-level helpers shared by the engine and the replay


def _neg(v: Sequence[int]) -> Vector:
    return tuple(-a for a in v)


def _add(u: Sequence[int], v: Sequence[int]) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def _eq(ring: Ring, u: Sequence[int], v: Sequence[int]) -> bool:
    return len(u) == len(v) and all(ring.reduce(a - b) == 0 for a, b in zip(u, v))


def _boundary_preimage(c: ChainComplex, q: int, v: Sequence[int]) -> Vector | None:
    """γ with d_{q+1} γ = v in c, or None."""
    return solve(c.d(q + 1), tuple(v), c.ring)


def _gr_matrix(X: FilteredComplex, s: int, n: int) -> tuple[Matrix, Matrix]:
    """(d of Gr^s in degree n+1, the map b |-> (0, b) of X^s_n into Gr^s_n)."""
    cone = X.gr_cone(s)
    return cone.complex.d(n + 1), cone.inclusion.f(n)


def _lift_witness(X: FilteredComplex, n: int, s: int, x: Sequence[int], alpha: Sequence[int]) -> Vector:
    """w with (0, α) - x = d_Gr w, which certifies that α lifts x."""
    dgr, inc = _gr_matrix(X, s, n)
    w = solve(dgr, _add(inc.apply(alpha), _neg(x)), X.ring)
    if w is None:
        raise AssertionError("lift does not reduce to the class")
    return w


def _tau_power_zero_witness(X: FilteredComplex, n: int, s: int, r: int, alpha: Sequence[int]) -> Vector | None:
    v = X.composite(s, s - r).f(n).apply(alpha)
    return _boundary_preimage(X.level(s - r), n, v)


def _not_divisible(X: FilteredComplex, n: int, s: int, R: int, alpha: Sequence[int]) -> bool:
    """No β in Z_n(X^{s+1}) and δ with T^{R-1} α + T^R β = dδ in X^{s-R+1}."""
    lo = s - R + 1
    TR = X.composite(s + 1, lo).f(n)
    dlo = X.level(lo).d(n + 1)
    dtop = X.level(s + 1).d(n)
    top = TR.hstack(-dlo)
    bottom = dtop.hstack(Matrix.zero(dtop.nrows, dlo.ncols))
    rhs = _neg(X.composite(s, lo).f(n).apply(alpha)) + (0,) * dtop.nrows
    return solve(top.vstack(bottom), rhs, X.ring) is None


def _no_lift(X: FilteredComplex, n: int, s: int, x: Sequence[int]) -> bool:
    """No cycle α of X^s_n with (0, α) - x a boundary of Gr^s."""
    dgr, inc = _gr_matrix(X, s, n)
    dX = X.level(s).d(n)
    top = dX.hstack(Matrix.zero(dX.nrows, dgr.ncols))
    bottom = inc.hstack(-dgr)
    return solve(top.vstack(bottom), (0,) * dX.nrows + tuple(x), X.ring) is None


# ---------------------------------------------------------------------------
# class bookkeeping


def _first_boundary_page(ss: SpectralSequence, n: int, s: int, x) -> int | None:
    E = ss.e1(n, s)
    for r in range(0, ss.r_infinity + 1):
        if span_contains(ss.ring, E.dim, ss.boundaries(n, s, r), x):
            return r
    return None


def _cycle_length(ss: SpectralSequence, n: int, s: int, x) -> int | str:
    E = ss.e1(n, s)
    r = 0
    while r < ss.r_infinity and span_contains(ss.ring, E.dim, ss.cycles(n, s, r + 1), x):
        r += 1
    return INF if r == ss.r_infinity else r


def interesting_classes(ss: SpectralSequence, n: int, s: int) -> list[Vector]:
    """Page generators, permanent cycles and targets of differentials at (n,s),
    as distinct nonzero E_1 classes."""
    E = ss.e1(n, s)
    if E.is_trivial():
        return []
    seen, out = set(), []

    def add(v):
        c = E.coords(v)
        if any(c) and c not in seen:
            seen.add(c)
            out.append(E.lift(c))

    for g in E.generators:
        add(g)
    for r in range(2, ss.r_infinity + 1):
        for g in ss.group(r, n, s).generators:
            add(g)
        for v in ss.differential(r - 1, n + 1, s - r + 1).image_ambient():
            add(v)
    Zinf = Subquotient(ss.ring, E.dim, ss.cycles(n, s, INF), E.quot)
    for g in Zinf.generators:
        add(g)
    return out


def _permanent_cycle_generators(ss: SpectralSequence, n: int, t: int) -> list[Vector]:
    E = ss.e1(n, t)
    return Subquotient(ss.ring, E.dim, ss.cycles(n, t, INF), E.quot).generators


# ---------------------------------------------------------------------------
# the full version


def verify_omnibus(X: FilteredComplex, ss: SpectralSequence | None = None, generation: bool = True) -> OmnibusReport:
    if not X.is_complete():
        raise PreconditionError("the filtered complex is not complete: its limit has homology")
    ss = ss or SpectralSequence(X)
    couple = ss.couple
    ring = X.ring
    failures: list[str] = []
    stab = {f"{n},{s}": ss.re_infinity(n, s)[1] for n, s in ss.cells()}
    pre = {"complete": True, "re_infinity_zero": True, "cycles_stable_from": stab}
    records = []
    s_lo = X.s_min - 1
    for n, s in ss.cells():
        E = ss.e1(n, s)
        if E.is_trivial():
            continue
        j = couple.j(n, s)
        A = couple.A(n, s)
        c = ss.colimit_hom(n, s)
        W = c.tgt
        for x in interesting_classes(ss, n, s):
            where = f"({n},{s}) x={list(x)}"
            perm = ss.e_infinity(n, s).contains(x)
            sol = j.solve(E.coords(x))
            alpha = None if sol is None else A.lift(sol)
            b = _first_boundary_page(ss, n, s, x)
            rec = ClassRecord(n, s, tuple(x), perm, alpha, _cycle_length(ss, n, s, x), INF if b is None else b)
            rec.checks["1"] = perm == (alpha is not None)
            if alpha is None:
                rec.witnesses["no_lift"] = True
                records.append(rec)
                if not rec.checks["1"]:
                    failures.append(f"(1) {where}: permanent cycle without a lift")
                continue
            rec.witnesses["lift_boundary"] = _lift_witness(X, n, s, x, alpha)
            if not rec.checks["1"]:
                failures.append(f"(1) {where}: lift of a non-permanent class")
            # (2a): τ^{R-1}(α + τβ) never vanishes, R the survival page
            R = b if b is not None else max(ss.r_infinity, s - s_lo + 1)
            if R >= 1:
                lo = s - R + 1
                t1 = couple.tau(n, s, lo)
                tR = couple.tau(n, s + 1, lo)
                ok = tR.solve(t1.apply(sol)) is None
                rec.checks["2a"] = ok
                rec.witnesses["2a_page"] = R
                if not ok:
                    failures.append(f"(2a) {where}: τ^{R - 1}·(lift) can vanish")
            if b is None:
                theta = c.apply(sol)
                in_next = span_contains(ring, W.dim, ss.filtration_subgroup(n, s + 1), W.lift(theta))
                det = ss.detects(n, s, x, W.lift(theta)) is not None
                rec.checks["2b"] = any(theta) and not in_next and det
                if not rec.checks["2b"]:
                    failures.append(f"(2b) {where}: image in the colimit is not detected")
                # (3b): every θ detected by x is hit by a lift
                hits = []
                targets = [W.lift(theta)] + [_add(W.lift(theta), g) for g in ss.filtration_subgroup(n, s + 1)]
                ok = True
                for th in targets:
                    w = ss.detects(n, s, x, th)
                    if w is None or not W.equal(W.lift(c.apply(w)), th) or j.apply(w) != E.coords(x):
                        ok = False
                        break
                    aw = A.lift(w)
                    gamma = _boundary_preimage(X.colimit(), n, _add(X.to_colimit(s).f(n).apply(aw), _neg(th)))
                    hits.append({"theta": th, "alpha": aw, "lift_boundary": _lift_witness(X, n, s, x, aw), "colimit_boundary": gamma})
                rec.checks["3b"] = ok
                rec.witnesses["3b"] = hits
                if not ok:
                    failures.append(f"(3b) {where}: a detected element has no lift")
            elif b >= 1:
                # (3a): a lift killed by τ^b
                K = couple.tau(n, s, s - b).kernel_group()
                jK = Hom.from_ambient(K, E, _gr_matrix(X, s, n)[1])
                ks = jK.solve(E.coords(x))
                ok = ks is not None
                if ok:
                    a2 = K.lift(ks)
                    wit = _tau_power_zero_witness(X, n, s, b, a2)
                    ok = wit is not None
                    rec.witnesses["3a"] = {"r": b, "alpha": a2, "lift_boundary": _lift_witness(X, n, s, x, a2), "tau_boundary": wit}
                rec.checks["3a"] = ok
                if not ok:
                    failures.append(f"(3a) {where}: no τ^{b}-torsion lift")
            records.append(rec)
    gen = {}
    if generation:
        for n in ss.degrees:
            for s in ss.filtrations:
                g, ok = _generation(ss, n, s)
                gen[(n, s)] = g
                if not ok:
                    failures.append(f"(4) ({n},{s}): lifts of permanent cycles do not generate")
    cors = _torsion_corollary(ss)
    for n, v in cors["torsion_free_iff_no_incoming"].items():
        if not v["holds"]:
            failures.append(f"corollary: stem {n} torsion-freeness disagrees with incoming differentials")
    for key, v in cors["vanishing"].items():
        if not v:
            failures.append(f"corollary: vanishing fails at {key}")
    return OmnibusReport("full", None, pre, records, gen, cors, failures)


def _generation(ss: SpectralSequence, n: int, s: int) -> tuple[dict, bool]:
    """Lifts of permanent-cycle generators in filtrations >= s, pushed down to s."""
    X = ss.X
    couple = ss.couple
    A = couple.A(n, s)
    gens, images = [], []
    for t in ss.filtrations:
        if t < s:
            continue
        j = couple.j(n, t)
        At = couple.A(n, t)
        E = ss.e1(n, t)
        for z in _permanent_cycle_generators(ss, n, t):
            sol = j.solve(E.coords(z))
            if sol is None:
                return {"error": f"permanent cycle at ({n},{t}) without lift"}, False
            gens.append({"t": t, "alpha": At.lift(sol)})
            images.append(A.lift(couple.tau(n, t, s).apply(sol)))
    ok = span_eq(ss.ring, A.dim, images + list(A.quot), list(A.sub) + list(A.quot))
    return {"generators": gens, "trivial_quotient": ok, "group": A.describe()}, ok


def _torsion_corollary(ss: SpectralSequence) -> dict:
    X = ss.X
    couple = ss.couple
    s_lo = X.s_min - 1
    out = {}
    for n in ss.degrees:
        free = all(couple.tau(n, s, s_lo).is_injective() for s in ss.filtrations)
        incoming = []
        for s in ss.filtrations:
            for r in range(1, ss.r_infinity + 1):
                if not ss.differential(r, n + 1, s - r).is_zero():
                    incoming.append([r, s])
        out[n] = {"torsion_free": free, "incoming": incoming, "holds": free == (not incoming)}
    vanish = {}
    for n in ss.degrees:
        for s in ss.filtrations:
            if all(ss.e1(n, t).is_trivial() for t in ss.filtrations if t >= s):
                vanish[f"{n},{s}"] = couple.A(n, s).is_trivial()
    return {"torsion_free_iff_no_incoming": out, "vanishing": vanish}


def torsion_free_iff_no_incoming(X: FilteredComplex, ss: SpectralSequence | None = None) -> dict:
    return _torsion_corollary(ss or SpectralSequence(X))["torsion_free_iff_no_incoming"]


# ---------------------------------------------------------------------------
# replay


def replay_omnibus(X: FilteredComplex, data: dict) -> list[str]:
    """Re-verify the witnesses of a serialized full report; returns problems."""
    ring = X.ring
    bad = []
    if data.get("format") != FORMAT or data.get("kind") != "full":
        return ["not a full omnibus report"]
    for rec in data["records"]:
        n, s, x = rec["n"], rec["s"], tuple(rec["x"])
        where = f"({n},{s}) x={rec['x']}"
        dgr, inc = _gr_matrix(X, s, n)
        if rec["lift"] is None:
            if not _no_lift(X, n, s, x):
                bad.append(f"{where}: a lift exists after all")
            continue
        alpha = tuple(rec["lift"])
        w = rec["witnesses"]

        def lifts(a, gamma):
            return not any(ring.reduce(v) for v in X.level(s).d(n).apply(a)) and _eq(
                ring, _add(inc.apply(a), _neg(x)), dgr.apply(gamma)
            )

        if not lifts(alpha, w["lift_boundary"]):
            bad.append(f"{where}: lift witness fails")
        if "2a_page" in w and not _not_divisible(X, n, s, w["2a_page"], alpha):
            bad.append(f"{where}: τ-multiple of the lift can vanish")
        if "3a" in w:
            t = w["3a"]
            a2, r = tuple(t["alpha"]), t["r"]
            lo = X.level(s - r)
            if not lifts(a2, t["lift_boundary"]) or t["tau_boundary"] is None or not _eq(
                ring, X.composite(s, s - r).f(n).apply(a2), lo.d(n + 1).apply(t["tau_boundary"])
            ):
                bad.append(f"{where}: torsion lift witness fails")
        for h in w.get("3b", []):
            a2 = tuple(h["alpha"])
            img = X.to_colimit(s).f(n).apply(a2)
            g = h["colimit_boundary"]
            if not lifts(a2, h["lift_boundary"]) or g is None or not _eq(
                ring, _add(img, _neg(h["theta"])), X.colimit().d(n + 1).apply(g)
            ):
                bad.append(f"{where}: detection lift witness fails")
    for key, g in data["generation"].items():
        n, s = map(int, key.split(","))
        if not g.get("trivial_quotient"):
            bad.append(f"generation ({key}) not certified")
            continue
        cols = [X.composite(e["t"], s).f(n).apply(tuple(e["alpha"])) for e in g["generators"]]
        c = X.level(s)
        span = cols + c.d(n + 1).columns()
        M = Matrix.from_columns(span, c.rank(n)) if span else Matrix.zero(c.rank(n), 0)
        for z in kernel_basis(c.d(n), ring):
            if solve(M, z, ring) is None:
                bad.append(f"generation ({key}): a cycle is not generated")
                break
    return bad


# ---------------------------------------------------------------------------
# the truncated version


def _h(c: ChainComplex, n: int) -> Subquotient:
    return c.homology(n)


def verify_truncated_omnibus(X: FilteredComplex, k: int, ss: SpectralSequence | None = None) -> OmnibusReport:
    if k < 1:
        raise ValueError("truncation order k must be at least 1")
    ss = ss or SpectralSequence(X)
    M = mod_tau_k(X, k)
    Mf = M.filtered
    failures: list[str] = []
    records = []
    for n, s in ss.cells():
        E = ss.e1(n, s)
        if E.is_trivial():
            continue
        H = _h(M.level(s), n)
        red = Hom.from_ambient(H, E, M.reduction(1, s).f(n))
        lift_ker = _lift_indeterminacy(X, k, n, s)
        for x in interesting_classes(ss, n, s):
            where = f"k={k} ({n},{s}) x={list(x)}"
            cyc = span_contains(ss.ring, E.dim, ss.cycles(n, s, k - 1), x)
            sol = red.solve(E.coords(x))
            b = _first_boundary_page(ss, n, s, x)
            rec = ClassRecord(n, s, tuple(x), cyc, None if sol is None else H.lift(sol), _cycle_length(ss, n, s, x), INF if b is None else b)
            rec.checks["1"] = cyc == (sol is not None)
            if not rec.checks["1"]:
                failures.append(f"(1) {where}")
            if sol is None:
                records.append(rec)
                continue
            # (2a) for r = min(survival, k), over all lifts
            r = k if b is None else min(b, k)
            if r >= 1:
                T = Mf.composite(s, s - r + 1).induced(n)
                y = T.apply(sol)
                if lift_ker is None:
                    ok = any(y)
                else:
                    ok = T.compose(lift_ker).solve(y) is None
                rec.checks["2a"] = ok
                rec.witnesses["2a_page"] = r
                if not ok:
                    failures.append(f"(2a) {where}: τ^{r - 1}·(lift) can vanish")
            # (2b): ∂_k^{k+1} of any lift represents d_k(x)
            D = TotalDifferential(X, k, k + 1).at(s, n)
            Gk = ss.group(k, n, s)
            dk = ss.differential(k, n, s)
            Gt = dk.tgt
            want = dk.apply(Gk.coords(x))
            lifts = [sol]
            if lift_ker is not None:
                lifts += [H.reduce_coords(_add(sol, lift_ker.apply(e))) for e in _units(lift_ker.src.ngens)]
            ok = True
            for a in lifts:
                v = D.tgt.lift(D.apply(a))
                if not span_contains(ss.ring, Gt.dim, ss.cycles(n - 1, s + k, k - 1), v) or Gt.coords(v) != want:
                    ok = False
            rec.checks["2b"] = ok
            if not ok:
                failures.append(f"(2b) {where}: ∂_k^(k+1) does not represent d_k")
            # (3): a τ^r-torsion lift when x is hit by d_r, r < k
            if b is not None and 1 <= b < k:
                T = Mf.composite(s, s - b).induced(n)
                K = T.kernel_group()
                rK = Hom.from_ambient(K, E, M.reduction(1, s).f(n))
                ks = rK.solve(E.coords(x))
                rec.checks["3"] = ks is not None
                if ks is not None:
                    rec.witnesses["3"] = {"r": b, "alpha": K.lift(ks)}
                else:
                    failures.append(f"(3) {where}: no τ^{b}-torsion lift")
            records.append(rec)
    gen = {}
    for n in ss.degrees:
        for s in ss.filtrations:
            g, probs = _truncated_generation(ss, k, n, s)
            gen[(n, s)] = g
            failures.extend(f"generation k={k} ({n},{s}): {p}" for p in probs)
    cors = _coarse_corollary(ss, k)
    failures.extend(f"coarse corollary k={k}: {c}" for c, v in cors.items() if not v)
    return OmnibusReport("truncated", k, {"k": k}, records, gen, cors, failures)


def _units(m: int) -> list[Vector]:
    return [tuple(int(i == j) for j in range(m)) for i in range(m)]


def _lift_indeterminacy(X: FilteredComplex, k: int, n: int, s: int) -> Hom | None:
    """τ(-) : H_n((X/τ^{k-1})^{s+1}) -> H_n((X/τ^k)^s), whose image is the kernel of
    reduction mod τ; None for k = 1 (lifts are unique)."""
    if k == 1:
        return None
    M = mod_tau_k(X, k)
    small = mod_tau_k(X, k - 1)
    return Hom.from_ambient(_h(small.level(s + 1), n), _h(M.level(s), n), M.tau_power(1, s).f(n))


def _truncated_generation(ss: SpectralSequence, k: int, n: int, s: int) -> tuple[dict, list[str]]:
    X = ss.X
    M = mod_tau_k(X, k)
    H = _h(M.level(s), n)
    alphas: list[tuple[int, Vector]] = []
    probs = []
    for i in range(1, k + 1):
        t = s + k - i
        E = ss.e1(n, t)
        if E.is_trivial():
            continue
        Mi = mod_tau_k(X, i)
        Hi = _h(Mi.level(t), n)
        red = Hom.from_ambient(Hi, E, Mi.reduction(1, t).f(n))
        layer = Subquotient(ss.ring, E.dim, ss.cycles(n, t, i - 1), ss.boundaries(n, t, k - i))
        push = M.tau_power(k - i, s).f(n) if i < k else Matrix.identity(H.dim)
        for g in layer.generators:
            sol = red.solve(E.coords(g))
            if sol is None:
                probs.append(f"layer {i} generator has no lift")
                continue
            alphas.append((i, push.apply(Hi.lift(sol))))
    vecs = [a for _, a in alphas]
    ok = span_eq(ss.ring, H.dim, vecs + list(H.quot), list(H.sub) + list(H.quot))
    if not ok:
        probs.append("the τ^(k-i)-pushed lifts do not generate")
    rel = {}
    for m in range(1, k):
        red = Hom.from_ambient(H, _h(mod_tau_k(X, m).level(s), n), M.reduction(m, s).f(n))
        ker = red.kernel_ambient()
        mine = [a for i, a in alphas if i <= k - m]
        good = span_eq(ss.ring, H.dim, mine + list(H.quot), ker + list(H.quot))
        rel[m] = good
        if not good:
            probs.append(f"kernel of reduction to X/τ^{m} is not generated by layers i <= {k - m}")
    return {"count": len(alphas), "group": H.describe(), "generated": ok, "relative": rel}, probs


def _coarse_corollary(ss: SpectralSequence, k: int) -> dict:
    X = ss.X
    M = mod_tau_k(X, k)
    out = {}
    for n in ss.degrees:
        for s in ss.filtrations:
            empty = [ss.e1(n, s + d).is_trivial() for d in range(k)]
            H = _h(M.level(s), n)
            if all(empty):
                out[f"vanish {n},{s}"] = H.is_trivial()
            for m in range(1, k):
                if all(empty[m:]):
                    red = Hom.from_ambient(H, _h(mod_tau_k(X, m).level(s), n), M.reduction(m, s).f(n))
                    out[f"injective {n},{s},m={m}"] = red.is_injective()
    return out


# ---------------------------------------------------------------------------
# total differentials


@dataclass
class TotalDiffReport:
    rows: list
    failures: list
    surjective: dict
    warning_cases: list

    @property
    def passed(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {
            "format": FORMAT,
            "passed": self.passed,
            "rows": _jsonable(self.rows),
            "surjective": _jsonable(self.surjective),
            "warning_cases": _jsonable(self.warning_cases),
            "failures": list(self.failures),
        }


def _hom_equal(f: Hom, g: Hom) -> bool:
    T = g.tgt
    return all(T.equal(f.tgt.lift(f.apply(e)), T.lift(g.apply(e))) for e in _units(f.src.ngens))


def _tdiff(X: FilteredComplex, a: int, N: int | None) -> TotalDifferential:
    key = ("tdiff", a, N)
    if key not in X._cache:
        X._cache[key] = TotalDifferential(X, a, N)
    return X._cache[key]


def total_diff_table(X: FilteredComplex, N_max: int = 5, r_max: int = 4, ss: SpectralSequence | None = None) -> TotalDiffReport:
    """Values of ∂_a^N (a <= N <= N_max) on every cell with their cross-checks."""
    if N_max < 1 or r_max < 1:
        raise ValueError("bounds must be positive")
    ss = ss or SpectralSequence(X)
    couple = ss.couple
    rows, failures, warn = [], [], []
    surj = {}
    for n, s in ss.cells():
        for a in range(1, N_max + 1):
            D = _tdiff(X, a, None).at(s, n)
            rows.append({"n": n, "s": s, "a": a, "N": "inf", "rank": len(D.image()), "zero": D.is_zero()})
            for N in range(a + 1, N_max + 1):
                DN = _tdiff(X, a, N).at(s, n)
                cone = mod_tau_k(X, N - a).cone(s + a)
                inc = Hom.from_ambient(D.tgt, DN.tgt, cone.inclusion.f(n - 1))
                ok = _hom_equal(DN, inc.compose(D))
                rows.append({"n": n, "s": s, "a": a, "N": N, "zero": DN.is_zero(), "reduction_of_inf": ok})
                if not ok:
                    failures.append(f"∂_{a}^{N} is not the reduction of ∂_{a}^inf at ({n},{s})")
            for kk in range(1, a):
                Dk = _tdiff(X, kk, None).at(s, n)
                Ma = mod_tau_k(X, a)
                red = Hom.from_ambient(D.src, Dk.src, Ma.reduction(kk, s).f(n))
                T = couple.tau(n - 1, s + a, s + kk)
                ok = _hom_equal(T.compose(D), Dk.compose(red))
                if not ok:
                    failures.append(f"τ^{a - kk}∂_{a}^inf != ∂_{kk}^inf∘red at ({n},{s})")
        for r in range(1, r_max + 1):
            failures.extend(_squares(ss, n, s, r, N_max, surj))
        failures.extend(_divisibility(ss, n, s, r_max, warn))
    return TotalDiffReport(rows, failures, surj, warn)


def _squares(ss: SpectralSequence, n: int, s: int, r: int, N_max: int, surj: dict) -> list[str]:
    X = ss.X
    couple = ss.couple
    out = []
    E = ss.e1(n, s)
    Mr = mod_tau_k(X, r)
    H = _h(Mr.level(s), n)
    red = Hom.from_ambient(H, E, Mr.reduction(1, s).f(n))
    Z = ss.cycles(n, s, r - 1)
    img = red.image_ambient()
    if not span_eq(ss.ring, E.dim, img + list(E.quot), Z):
        out.append(f"image of π(X/τ^{r}) is not Z_{r - 1} at ({n},{s})")
    G = ss.group(r, n, s)
    onto = Hom.from_ambient(H, G, Mr.reduction(1, s).f(n))
    surj[f"{n},{s},r={r}"] = onto.is_surjective()
    if not surj[f"{n},{s},r={r}"]:
        out.append(f"π(X/τ^{r}) -> E_{r} not onto at ({n},{s})")
    if r == 1:
        A = couple.A(n, s)
        Einf = ss.e_infinity(n, s)
        okinf = Hom.from_ambient(A, Einf, X.gr_cone(s).inclusion.f(n)).is_surjective()
        surj[f"{n},{s},r=inf"] = okinf
        if not okinf:
            out.append(f"π_(n,s)X -> E_inf not onto at ({n},{s})")
    dr = ss.differential(r, n, s)
    Gt = dr.tgt
    D = _tdiff(X, r, None).at(s, n)
    jt = couple.j(n - 1, s + r)
    for e in _units(H.ngens):
        x = E.lift(red.apply(e)) if not E.is_trivial() else ()
        want = dr.apply(G.coords(x)) if x else Gt.zero()
        # ∂_r^inf then reduction mod τ
        v = jt.tgt.lift(jt.apply(D.apply(e)))
        if Gt.ngens or want:
            if Gt.coords(v) != want:
                out.append(f"square ∂_{r}^inf vs d_{r} fails at ({n},{s})")
        # ∂_r^R lands in Z_m / B_{r-1}, m = min(r-1, R-r-1)
        for R in range(r + 1, N_max + 1):
            DR = _tdiff(X, r, R).at(s, n)
            MR = mod_tau_k(X, R - r)
            Et = ss.e1(n - 1, s + r)
            redR = Hom.from_ambient(DR.tgt, Et, MR.reduction(1, s + r).f(n - 1))
            y = Et.lift(redR.apply(DR.apply(e)))
            m = min(r - 1, R - r - 1)
            Q = Subquotient(ss.ring, Et.dim, ss.cycles(n - 1, s + r, m), ss.boundaries(n - 1, s + r, r - 1))
            target = Gt.lift(want) if Gt.ngens else (0,) * Et.dim
            if not Q.contains(y) or not Q.equal(y, target):
                out.append(f"square ∂_{r}^{R} vs d_{r} fails at ({n},{s})")
    return out


def _divisibility(ss: SpectralSequence, n: int, s: int, r_max: int, warn: list) -> list[str]:
    """τ-divisibility of ∂_1^inf(x) against the vanishing of d_1..d_r."""
    X = ss.X
    couple = ss.couple
    out = []
    E = ss.e1(n, s)
    if E.is_trivial():
        return out
    D = _tdiff(X, 1, None).at(s, n)
    M1 = mod_tau_k(X, 1)
    H1 = _h(M1.level(s), n)
    for g in E.generators:
        d = D.apply(H1.coords(g))
        for r in range(0, r_max + 1):
            T = couple.tau(n - 1, s + 1 + r, s + 1)
            a = T.solve(d)
            in_Z = span_contains(ss.ring, E.dim, ss.cycles(n, s, r), g)
            if a is not None:
                if not in_Z:
                    out.append(f"∂x is τ^{r}-divisible but d_<= {r}(x) != 0 at ({n},{s})")
                    continue
                # the reduction of the division represents d_{r+1}(x)
                jt = couple.j(n - 1, s + r + 1)
                v = jt.tgt.lift(jt.apply(a))
                dr = ss.differential(r + 1, n, s)
                if dr.tgt.ngens and dr.tgt.coords(v) != dr.apply(ss.group(r + 1, n, s).coords(g)):
                    out.append(f"division of ∂x does not represent d_{r + 1} at ({n},{s})")
            elif r >= 1 and span_contains(ss.ring, E.dim, ss.cycles(n, s, r - 1), g):
                dr = ss.differential(r, n, s)
                if dr.apply(ss.group(r, n, s).coords(g)) == dr.tgt.zero():
                    Bt = ss.boundaries(n - 1, s + r, r - 1)
                    Et = ss.e1(n - 1, s + r)
                    clean = span_eq(ss.ring, Et.dim, Bt, list(Et.quot))
                    if clean:
                        out.append(f"d_{r}(x) = 0 without shorter incoming differentials, yet ∂x is not τ^{r}-divisible at ({n},{s})")
                    else:
                        warn.append({"n": n, "s": s, "r": r, "x": list(g)})
    return out
