"""Command line front end.

    taufilt COMMAND [INSTANCE | --seed N] [options]

Exit status: 0 on success, 2 when an instance fails to load or a verified
statement fails, 3 when a precondition of the requested computation does not
hold (for instance omnibus on an incomplete filtration).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import instance as inst_mod
from . import render
from .cosimplicial import (
    CobarBoundsError,
    CosimplicialError,
    cobar,
    decalage,
    random_cosimplicial_complex,
    tot_filtration,
    verify_decalage,
    verify_tot,
)
from .exactalg import Subquotient
from .filtration import FilteredComplex
from .instance import Instance, InstanceError
from .multiplicative import FilteredRingError, leibniz_check
from .omnibus import replay_omnibus, total_diff_table, verify_omnibus, verify_truncated_omnibus
from .randomgen import random_filtered_complex
from .render import ChartSpec
from .sseq import INF, PageData, PreconditionError, SpectralSequence, reindex_second_page
from .taubss import bss_compare_to_sseq, build_bss, build_truncated_bss, truncated_checks
from .taumod import bigraded_homotopy, is_derived_complete

EXIT_OK, EXIT_INVALID, EXIT_PRECONDITION = 0, 2, 3

COMMANDS = ("pages", "tau-module", "omnibus", "bockstein", "total-diffs", "tot", "decalage", "ext", "chart")


class UsageError(ValueError):
    pass


class CheckFailed(Exception):
    """The computation ran but a verified statement failed; carries the output."""

    def __init__(self, text: str):
        super().__init__("verification failed")
        self.text = text


# ---------------------------------------------------------------------------
# argument helpers


def page_range(text: str) -> tuple[int, int | str]:
    """'2', '1..3' or '2..inf'."""
    a, sep, b = text.partition("..")
    try:
        lo = int(a)
        hi: int | str = lo if not sep else (INF if b == "inf" else int(b))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad page range {text!r}; use r1..r2") from None
    if lo < 1 or (hi != INF and hi < lo):
        raise argparse.ArgumentTypeError(f"bad page range {text!r}")
    return lo, hi


def int_range(text: str) -> tuple[int, int]:
    a, sep, b = text.partition("..")
    try:
        lo, hi = int(a), int(b if sep else a)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}; use a..b") from None
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="taufilt", description="Spectral sequences of filtered complexes, exactly.")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def cmd(name, help, formats, default, seed=True, pages=False, reindex=False):
        p = sub.add_parser(name, help=help)
        p.add_argument("instance", nargs="?", help="instance file (JSON, format 1)")
        if seed:
            p.add_argument("--seed", type=int, help="use a seeded random instance instead of a file")
        p.add_argument("--format", choices=formats, default=default)
        p.add_argument("-o", "--output", help="write here instead of stdout")
        if pages:
            p.add_argument("--pages", type=page_range, default=None, metavar="R1..R2")
        if reindex:
            p.add_argument("--reindex", choices=("second",), default=None)
        return p

    cmd("pages", "E_r pages of a filtered complex", ("csv", "json", "svg"), "csv", pages=True, reindex=True)
    cmd("tau-module", "the bigraded Z[τ]-module π_{n,s}", ("csv", "json"), "csv")
    p = cmd("omnibus", "verify the dictionary between π_{*,*} and the pages", ("json",), "json")
    p.add_argument("--k", type=int, default=None, help="verify the τ^k-truncated version")
    p.add_argument("--replay", default=None, metavar="REPORT", help="re-verify the witnesses of a saved report")
    p = cmd("bockstein", "the τ-Bockstein spectral sequence", ("csv", "json"), "csv", pages=True)
    p.add_argument("--k", type=int, default=None, help="truncate at τ^k")
    p = cmd("total-diffs", "total differentials and their cross-checks", ("json", "csv"), "json")
    p.add_argument("--N", dest="n_max", type=int, default=3, help="largest N in ∂_a^N (default 3)")
    p.add_argument("--r-max", type=int, default=3)
    cmd("tot", "the Tot filtration of a cosimplicial payload", ("csv", "json", "svg"), "csv", pages=True, reindex=True)
    cmd("decalage", "the décalage filtration of a cosimplicial payload", ("csv", "json", "svg"), "csv", pages=True, reindex=True)
    p = cmd("ext", "Ext of a Hopf payload via the cobar construction", ("csv", "json", "svg"), "csv", seed=False)
    p.add_argument("--range", type=int_range, default=None, metavar="S0..S1", help="cohomological degrees s to report")
    cmd("chart", "an Adams-indexed SVG chart", ("svg",), "svg", pages=True, reindex=True)
    return ap


# ---------------------------------------------------------------------------
# instances


def _load(args) -> Instance:
    seed = getattr(args, "seed", None)
    if seed is not None and args.instance:
        raise UsageError("give either an instance file or --seed, not both")
    if seed is None and not args.instance:
        raise UsageError("an instance file is required")
    if seed is None:
        return inst_mod.load(args.instance)
    if args.command in ("tot", "decalage"):
        A = random_cosimplicial_complex(seed)
        return Instance(f"random-cosimplicial-{seed}", A.ring, cosimplicial=A)
    X = random_filtered_complex(seed)
    return Instance(f"random-{seed}", X.ring, filtered=X)


def _filtered(inst: Instance) -> FilteredComplex:
    if inst.filtered is not None:
        return inst.filtered
    if inst.dga is not None:
        return inst.dga.filtered_complex()
    raise UsageError("the instance has no filtered complex (add a 'filtered' or 'multiplication' section)")


def _pages(ss: SpectralSequence, rng, default_hi=None) -> list:
    lo, hi = rng or (1, default_hi or ss.r_infinity)
    if hi == INF:
        return [ss.page(r) for r in range(lo, ss.r_infinity + 1)] + [ss.page(INF)]
    return [ss.page(r) for r in range(lo, hi + 1)]


def _emit_pages(args, pages, meta: dict, title: str) -> str:
    if getattr(args, "reindex", None) == "second":
        pages = [reindex_second_page(p) for p in pages]
    if args.format == "csv":
        return render.pages_csv(pages)
    if args.format == "svg":
        if len(pages) == 1:
            return render.emit_chart(pages[0], ChartSpec(pages[0].r, f"{title} E_{render.page_label(pages[0].r)}"))
        return render.emit_chart_sheet(pages, title)
    return render.to_json({"format": 1, **meta, "pages": render.pages_json(pages)})


# ---------------------------------------------------------------------------
# commands


def cmd_pages(args, inst: Instance) -> str:
    X = _filtered(inst)
    ss = SpectralSequence(X)
    meta = {"command": "pages", "instance": inst.name, "r_infinity": ss.r_infinity}
    return _emit_pages(args, _pages(ss, args.pages), meta, inst.name)


def cmd_tau_module(args, inst: Instance) -> str:
    X = _filtered(inst)
    M = bigraded_homotopy(X)
    rows = []
    for n in M.stems:
        for s in M.window:
            G = M.group(n, s)
            tau = None
            if s - 1 in M.window and (G.ngens or M.group(n, s - 1).ngens):
                tau = render.matrix_text(M.tau(n, s).matrix)
            if G.ngens or tau:
                rows.append({"n": n, "s": s, "invariant_factors": render.factors(G), "tau": tau})
    if args.format == "csv":
        return render.tau_module_csv(rows)
    comp = is_derived_complete(M)
    return render.to_json({
        "format": 1,
        "command": "tau-module",
        "instance": inst.name,
        "window": [M.s_min, M.s_max],
        "profiles": {"below": M.below, "above": M.above},
        "groups": rows,
        "colimit": {str(n): X.colimit().homology(n).describe() for n in X.degrees},
        "derived_complete": comp.complete,
        "completeness": {str(n): v for n, v in comp.per_stem.items()},
    })


def cmd_omnibus(args, inst: Instance) -> str:
    X = _filtered(inst)
    if args.replay:
        data = json.loads(Path(args.replay).read_text("utf-8"))
        problems = replay_omnibus(X, data)
        text = render.to_json({"format": 1, "command": "omnibus-replay", "instance": inst.name,
                               "passed": not problems, "problems": problems})
        if problems:
            raise CheckFailed(text)
        return text
    if args.k is not None:
        rep = verify_truncated_omnibus(X, args.k)
    else:
        rep = verify_omnibus(X)
    out = {"instance": inst.name, **rep.as_dict()}
    ok = rep.passed
    if inst.dga is not None:
        v = leibniz_check(inst.dga, inst.leibniz_n)
        out["leibniz"] = {"n": v.n, "pairs": v.pairs, "derivation": v.derivation, "linear": v.linear,
                          "cone_agrees": v.cone_agrees, "failures": [str(f) for f in v.failures]}
        ok = ok and v.holds
    text = render.to_json(out)
    if not ok:
        raise CheckFailed(text)
    return text


def cmd_bockstein(args, inst: Instance) -> str:
    X = _filtered(inst)
    bss = build_bss(X) if args.k is None else build_truncated_bss(X, args.k)
    lo, hi = args.pages or (1, bss.r_infinity)
    rs = list(range(lo, (bss.r_infinity if hi == INF else hi) + 1)) + ([INF] if hi == INF else [])
    pages = [bss.page(r) for r in rs]
    if args.format == "csv":
        return render.tri_pages_csv(pages)
    rep = bss_compare_to_sseq(X, bss) if args.k is None else truncated_checks(X, args.k)
    text = render.to_json({
        "format": 1,
        "command": "bockstein",
        "instance": inst.name,
        "k": args.k,
        "weights": list(bss.weights),
        "clauses": rep.clauses,
        "failures": [list(map(str, f)) for f in rep.failures],
        "pages": render.tri_pages_json(pages),
    })
    if not rep.ok:
        raise CheckFailed(text)
    return text


def cmd_total_diffs(args, inst: Instance) -> str:
    X = _filtered(inst)
    rep = total_diff_table(X, args.n_max, args.r_max)
    if args.format == "csv":
        text = render.rows_csv(["n", "s", "a", "N", "rank", "zero", "reduction_of_inf"], rep.rows)
    else:
        text = render.to_json({"instance": inst.name, **rep.as_dict()})
    if not rep.passed:
        raise CheckFailed(text)
    return text


def _cosimplicial(inst: Instance):
    if inst.cosimplicial is not None:
        return inst.cosimplicial
    if inst.hopf is not None:
        s_max, t_max = inst.ext_bounds
        return cobar(inst.hopf, inst.comodule, s_max, t_max).cosimplicial
    raise UsageError("the instance has no cosimplicial or Hopf payload")


def cmd_tot(args, inst: Instance) -> str:
    A = _cosimplicial(inst)
    T = tot_filtration(A)
    ss = SpectralSequence(T.filtered)
    meta = {"command": "tot", "instance": inst.name, "m": A.m, "mode": T.mode}
    pages = _pages(ss, args.pages, default_hi=min(ss.r_infinity, A.m + 1))
    if args.format != "json":
        return _emit_pages(args, pages, meta, inst.name)
    chk = verify_tot(A, T)
    meta["exact_through"] = {render.page_label(p.r): T.exact_through(ss.r_infinity if p.r == INF else p.r) for p in pages}
    meta["checks"] = {"e1_iso": chk.e1_iso, "d1_agrees": chk.d1_agrees, "page2_iso": chk.page2_iso,
                      "complete": chk.complete, "failures": chk.failures}
    text = _emit_pages(args, pages, meta, inst.name)
    if not chk.passed:
        raise CheckFailed(text)
    return text


def cmd_decalage(args, inst: Instance) -> str:
    A = _cosimplicial(inst)
    D = decalage(A)
    ss = SpectralSequence(D.filtered)
    meta = {"command": "decalage", "instance": inst.name, "m": A.m}
    pages = _pages(ss, args.pages, default_hi=min(ss.r_infinity, 4))
    if args.format != "json":
        return _emit_pages(args, pages, meta, inst.name)
    chk = verify_decalage(A, r_max=min(4, max(ss.r_infinity if p.r == INF else p.r for p in pages)))
    meta["checks"] = {"pages": chk.pages, "cells": chk.cells, "complete": chk.complete,
                      "colimit_is_tot": chk.colimit_is_tot, "failures": chk.failures}
    text = _emit_pages(args, pages, meta, inst.name)
    if not chk.passed:
        raise CheckFailed(text)
    return text


def cmd_ext(args, inst: Instance) -> str:
    if inst.hopf is None:
        raise UsageError("the instance has no Hopf payload")
    s_max, t_max = inst.ext_bounds
    s_lo = 0
    if args.range is not None:
        s_lo, s_max = args.range
    res = cobar(inst.hopf, inst.comodule, s_max, t_max)
    table = res.table
    keep = {k: v for k, v in table.dims.items() if k[0] >= s_lo}
    table = type(table)(table.p, table.s_max, table.t_max, keep)
    if args.format == "csv":
        text = render.ext_csv(table)
    elif args.format == "svg":
        text = render.emit_chart(_ext_page(table, inst.hopf.ring, s_lo), ChartSpec(2, f"{inst.name} Ext"))
    else:
        text = render.to_json({
            "format": 1,
            "command": "ext",
            "instance": inst.name,
            "p": table.p,
            "s_range": [s_lo, s_max],
            "t_max": t_max,
            "ext": [{"s": s, "t": t, "stem": t - s, "dim": table.dim(s, t)} for s, t in table.nonzero()],
            "agrees": res.agrees,
        })
    if not res.agrees:
        raise CheckFailed(text)
    return text


def _ext_page(table, ring, s_lo) -> PageData:
    groups = {}
    for s in range(s_lo, table.s_max + 1):
        for t in range(0, table.t_max + 1):
            d = table.dim(s, t)
            key = (t - s, s)
            if d or (t - s >= 0):
                groups[key] = Subquotient(ring, d, [tuple(int(i == j) for j in range(d)) for i in range(d)])
    return PageData(2, groups, {}, (-1, 2))


def cmd_chart(args, inst: Instance) -> str:
    if inst.filtered is not None or inst.dga is not None:
        ss = SpectralSequence(_filtered(inst))
    else:
        ss = SpectralSequence(tot_filtration(_cosimplicial(inst)).filtered)
    lo, hi = args.pages or (1, 1)
    return _emit_pages(args, _pages(ss, (lo, hi)), {}, inst.name)


HANDLERS = {
    "pages": cmd_pages,
    "tau-module": cmd_tau_module,
    "omnibus": cmd_omnibus,
    "bockstein": cmd_bockstein,
    "total-diffs": cmd_total_diffs,
    "tot": cmd_tot,
    "decalage": cmd_decalage,
    "ext": cmd_ext,
    "chart": cmd_chart,
}


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = _parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INVALID
    code = EXIT_OK
    try:
        inst = _load(args)
        text = HANDLERS[args.command](args, inst)
    except CheckFailed as e:
        text, code = e.text, EXIT_INVALID
        print("taufilt: a verified statement failed; see the report", file=stderr)
    except (InstanceError, UsageError, FileNotFoundError, FilteredRingError) as e:
        print(f"taufilt: {e}", file=stderr)
        return EXIT_INVALID
    except (PreconditionError, CobarBoundsError, CosimplicialError) as e:
        print(f"taufilt: precondition failed: {e}", file=stderr)
        return EXIT_PRECONDITION
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
