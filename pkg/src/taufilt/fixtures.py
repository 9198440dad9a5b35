"""The shipped instance files and the CLI runs whose output is kept as golden files.

``write_fixtures(root)`` regenerates ``root/*.json``; ``GOLDEN`` lists the
command lines whose output lives under ``root/golden``.
"""

from __future__ import annotations

import io
from pathlib import Path

from .complexes import ChainComplex, ChainMap
from .cosimplicial import double_complex, exterior_hopf, group_nerve, kan_extend, nerve_cochains, staircase
from .exactalg import GF, ZZ, span_contains
from .filtration import CONSTANT, FilteredComplex, adic_filtration_complex, filtered_sphere, moore_complex
from .instance import dumps, hopf_to_json, instance_to_json
from .multiplicative import FilteredDGA, koszul_dga


def dga_to_json(R: FilteredDGA, leibniz_n: int = 1) -> dict:
    """Multiplication payload of a DGA whose filtration is spanned by basis elements."""
    names = [b for b, _ in R.basis]
    filt = []
    for i, (_, q) in enumerate(R.basis):
        e = tuple(int(j == R.pos[i]) for j in range(R.rank(q)))
        s = 0
        while s < R.s_max and _in_span(R, s + 1, q, e):
            s += 1
        filt.append(s)
    d = {names[i]: {names[k]: c for k, c in out.items()} for i, out in sorted(R._d.items()) if out}
    products = {}
    for i in range(len(names)):
        for j in range(len(names)):
            out = {names[k]: c for k, c in R._mult(i, j).items() if c}
            if out:
                products[f"{names[i]}*{names[j]}"] = out
    return {
        "basis": [[b, q, f] for (b, q), f in zip(R.basis, filt)],
        "d": d,
        "products": products,
        "leibniz_n": leibniz_n,
    }


def _in_span(R: FilteredDGA, s: int, q: int, e) -> bool:
    return span_contains(R.ring, R.rank(q), R.F(s, q), e)


def _constant_z() -> FilteredComplex:
    c = ChainComplex.single(ZZ, 0)
    return FilteredComplex([c, c], [ChainMap.identity(c)], 0, CONSTANT, CONSTANT)


def build_fixtures() -> dict[str, dict]:
    moore = adic_filtration_complex(moore_complex(2, 2), 2, 6)
    st = kan_extend(double_complex(*staircase(ZZ, 2, 0, 2, 3, 0, 2)))
    return {
        "moore_p2": instance_to_json(
            "moore_p2", ZZ, filtered=moore,
            description="2-adic filtration of Z --4--> Z, levels 0..6, transitions x2",
        ),
        "sphere": instance_to_json("sphere", ZZ, filtered=filtered_sphere(0, 0), description="the filtered (0,0)-sphere"),
        "incomplete": instance_to_json(
            "incomplete", ZZ, filtered=_constant_z(),
            description="constant filtration on Z: its limit is Z, so it is not complete",
        ),
        "exterior": instance_to_json(
            "exterior", GF(2), hopf=hopf_to_json(exterior_hopf(2, 1), None, 8, 8),
            description="exterior Hopf algebra on a primitive x of degree 1 over F2",
        ),
        "koszul": instance_to_json(
            "koszul", GF(2), multiplication=dga_to_json(koszul_dga(2), 1),
            description="F2[x]/(x^6) with y, dy = x^2; x and y in filtration 1",
        ),
        "bz2": instance_to_json(
            "bz2", ZZ, cosimplicial=nerve_cochains(group_nerve(2), 3, ZZ),
            description="integral cochains on the nerve of Z/2, truncated at level 3",
        ),
        "staircase": instance_to_json(
            "staircase", ZZ, cosimplicial=st,
            description="cosimplicial complex from a double complex with a length-2 zig-zag (d_2 = x2)",
        ),
    }


# (fixture, arguments, golden file, exit status)
GOLDEN = [
    ("moore_p2", ["pages", "--pages", "1..3"], "moore_p2.pages.csv", 0),
    ("moore_p2", ["pages", "--format", "json"], "moore_p2.pages.json", 0),
    ("moore_p2", ["pages", "--pages", "2..3", "--reindex", "second"], "moore_p2.pages-second.csv", 0),
    ("moore_p2", ["tau-module"], "moore_p2.tau-module.csv", 0),
    ("moore_p2", ["tau-module", "--format", "json"], "moore_p2.tau-module.json", 0),
    ("moore_p2", ["omnibus"], "moore_p2.omnibus.json", 0),
    ("moore_p2", ["omnibus", "--k", "2"], "moore_p2.omnibus-k2.json", 0),
    ("moore_p2", ["bockstein", "--pages", "1..3"], "moore_p2.bockstein.csv", 0),
    ("moore_p2", ["total-diffs", "--N", "3"], "moore_p2.total-diffs.json", 0),
    ("moore_p2", ["chart", "--pages", "1"], "moore_p2.chart-e1.svg", 0),
    ("moore_p2", ["chart", "--pages", "2"], "moore_p2.chart-e2.svg", 0),
    ("sphere", ["pages"], "sphere.pages.csv", 0),
    ("sphere", ["omnibus"], "sphere.omnibus.json", 0),
    ("sphere", ["chart"], "sphere.chart-e1.svg", 0),
    ("incomplete", ["tau-module", "--format", "json"], "incomplete.tau-module.json", 0),
    ("exterior", ["ext", "--range", "0..8"], "exterior.ext.csv", 0),
    ("exterior", ["ext", "--range", "0..8", "--format", "svg"], "exterior.ext.svg", 0),
    ("koszul", ["omnibus"], "koszul.omnibus.json", 0),
    ("bz2", ["tot"], "bz2.tot.csv", 0),
    ("bz2", ["tot", "--format", "json"], "bz2.tot.json", 0),
    ("staircase", ["tot", "--pages", "1..3"], "staircase.tot.csv", 0),
    ("staircase", ["decalage", "--pages", "1..3"], "staircase.decalage.csv", 0),
    ("staircase", ["chart", "--pages", "1..3"], "staircase.chart.svg", 0),
]


def write_fixtures(root: str | Path) -> list[Path]:
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    out = []
    for name, doc in build_fixtures().items():
        p = root / f"{name}.json"
        p.write_text(dumps(doc), encoding="utf-8")
        out.append(p)
    return out


def run_golden(root: str | Path, fixture: str, args: list[str]) -> tuple[int, bytes]:
    """Run one golden command line in-process; returns (exit status, stdout bytes)."""
    from .cli import run

    out, err = io.StringIO(), io.StringIO()
    code = run([args[0], str(Path(root) / f"{fixture}.json"), *args[1:]], out, err)
    return code, out.getvalue().encode("utf-8")


def write_golden(root: str | Path) -> list[Path]:
    gold = Path(root) / "golden"
    gold.mkdir(parents=True, exist_ok=True)
    written = []
    for fixture, args, name, expect in GOLDEN:
        code, data = run_golden(root, fixture, args)
        if code != expect:
            raise RuntimeError(f"{fixture} {' '.join(args)} exited {code}, expected {expect}")
        (gold / name).write_bytes(data)
        written.append(gold / name)
    return written
