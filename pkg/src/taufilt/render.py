"""Text and SVG renderings of pages, τ-modules and Ext tables.

Everything here is a pure function of its input and sorts before it writes,
so equal inputs give equal bytes.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from xml.sax.saxutils import escape

from .exactalg import Matrix, Subquotient
from .sseq import INF, PageData

# ---------------------------------------------------------------------------
# cell text


def factors(G: Subquotient) -> list[str]:
    """Invariant factors, one entry per minimal generator."""
    if G.ring.is_field:
        return [f"F{G.ring.p}"] * G.ngens
    return ["Z" if d == 0 else f"Z/{d}" for d in G.orders]


def factor_text(G: Subquotient) -> str:
    return ";".join(factors(G)) or "0"


def matrix_text(m: Matrix) -> str:
    return "[" + ";".join(" ".join(str(x) for x in row) for row in m.rows) + "]"


def page_label(r) -> str:
    return "inf" if r == INF else str(r)


def _cell_d(p: PageData, key) -> tuple | None:
    h = p.diffs.get(key)
    if h is None or h.is_zero():
        return None
    return p.target(*key), h.matrix


def page_rows(p: PageData) -> list[dict]:
    rows = []
    for key in p.nonzero_cells():
        n, s = key
        d = _cell_d(p, key)
        rows.append({
            "n": n,
            "s": s,
            "invariant_factors": factors(p.groups[key]),
            "d_target": None if d is None else list(d[0]),
            "d_matrix": None if d is None else [list(r) for r in d[1].rows],
        })
    return rows


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def pages_csv(pages: list[PageData]) -> str:
    rows = []
    for p in pages:
        for key in p.nonzero_cells():
            d = _cell_d(p, key)
            tgt = "" if d is None else f"({d[0][0]},{d[0][1]}):{matrix_text(d[1])}"
            rows.append([page_label(p.r), key[0], key[1], factor_text(p.groups[key]), tgt])
    return _csv(["r", "n", "s", "invariant_factors", "d_targets"], rows)


def pages_json(pages: list[PageData]) -> list[dict]:
    return [
        {"r": page_label(p.r), "bidegree": list(p.bidegree), "reindexed": p.reindexed, "cells": page_rows(p)}
        for p in pages
    ]


def tri_pages_csv(pages) -> str:
    rows = []
    for p in pages:
        for key in p.nonzero_cells():
            n, w, s = key
            h = p.diffs.get(key)
            tgt = ""
            if h is not None and not h.is_zero():
                tgt = f"({n - 1},{w},{s + (p.tridegree[2] if p.r == INF else p.r)}):{matrix_text(h.matrix)}"
            rows.append([page_label(p.r), n, w, s, factor_text(p.groups[key]), tgt])
    return _csv(["r", "n", "w", "s", "invariant_factors", "d_targets"], rows)


def tri_pages_json(pages) -> list[dict]:
    out = []
    for p in pages:
        cells = []
        for key in p.nonzero_cells():
            n, w, s = key
            h = p.diffs.get(key)
            t = p.tbar.get(key)
            cells.append({
                "n": n, "w": w, "s": s,
                "invariant_factors": factors(p.groups[key]),
                "d_matrix": None if h is None or h.is_zero() else [list(r) for r in h.matrix.rows],
                "tbar_matrix": None if t is None else [list(r) for r in t.matrix.rows],
            })
        out.append({"r": page_label(p.r), "cells": cells})
    return out


def tau_module_csv(rows: list[dict]) -> str:
    return _csv(
        ["n", "s", "invariant_factors", "tau"],
        [[r["n"], r["s"], ";".join(r["invariant_factors"]) or "0", r["tau"] or ""] for r in rows],
    )


def ext_csv(table) -> str:
    rows = [[s, t, t - s, table.dim(s, t)] for s, t in table.nonzero()]
    return _csv(["s", "t", "stem", "dim"], rows)


def rows_csv(header: list[str], rows: list[dict]) -> str:
    return _csv(header, [["" if r.get(h) is None else _plain(r.get(h)) for h in header] for r in rows])


def _plain(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    return v


def to_json(obj) -> str:
    return json.dumps(obj, indent=1, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# charts


@dataclass(frozen=True)
class ChartSpec:
    """Stem n runs to the right, filtration s runs up (Adams convention)."""

    r: int | str = 1
    title: str = ""
    cell: int = 40
    margin: int = 36
    dot: float = 3.0
    spacing: float = 8.0
    stems: tuple[int, int] | None = None
    filtrations: tuple[int, int] | None = None


def _extent(p: PageData, spec: ChartSpec) -> tuple[int, int, int, int]:
    keys = list(p.groups)
    if spec.stems:
        n0, n1 = spec.stems
    else:
        n0, n1 = (min(k[0] for k in keys), max(k[0] for k in keys)) if keys else (0, 0)
    if spec.filtrations:
        s0, s1 = spec.filtrations
    else:
        s0, s1 = (min(k[1] for k in keys), max(k[1] for k in keys)) if keys else (0, 0)
    return n0, n1, s0, s1


def _num(x: float) -> str:
    return f"{x:.1f}".rstrip("0").rstrip(".")


def _chart_body(p: PageData, spec: ChartSpec) -> tuple[list[str], int, int]:
    n0, n1, s0, s1 = _extent(p, spec)
    c, m = spec.cell, spec.margin
    width = 2 * m + (n1 - n0 + 1) * c
    height = 2 * m + (s1 - s0 + 1) * c + (16 if spec.title else 0)
    top = m + (16 if spec.title else 0)

    def X(n):
        return m + (n - n0) * c + c / 2

    def Y(s):
        return top + (s1 - s) * c + c / 2

    out = []
    if spec.title:
        out.append(f'<text class="title" x="{m}" y="{m - 8}">{escape(spec.title)}</text>')
    out.append('<g class="grid">')
    for i in range(n1 - n0 + 2):
        x = m + i * c
        out.append(f'<line x1="{x}" y1="{top}" x2="{x}" y2="{top + (s1 - s0 + 1) * c}"/>')
    for j in range(s1 - s0 + 2):
        y = top + j * c
        out.append(f'<line x1="{m}" y1="{y}" x2="{m + (n1 - n0 + 1) * c}" y2="{y}"/>')
    out.append("</g>")
    out.append('<g class="axes">')
    for n in range(n0, n1 + 1):
        out.append(f'<text x="{_num(X(n))}" y="{top + (s1 - s0 + 1) * c + 14}" text-anchor="middle">{n}</text>')
    for s in range(s0, s1 + 1):
        out.append(f'<text x="{m - 6}" y="{_num(Y(s) + 4)}" text-anchor="end">{s}</text>')
    out.append("</g>")

    def spots(key):
        G = p.groups[key]
        g = G.ngens
        return [(X(key[0]) + (i - (g - 1) / 2) * spec.spacing, Y(key[1])) for i in range(g)]

    arrows = []
    for key in p.nonzero_diffs():
        tgt = p.target(*key)
        if tgt not in p.groups or not (n0 <= tgt[0] <= n1 and s0 <= tgt[1] <= s1):
            continue
        (x1, y1), (x2, y2) = spots(key)[0], spots(tgt)[0] if p.groups[tgt].ngens else (X(tgt[0]), Y(tgt[1]))
        lx, ly = (x1 + x2) / 2 + 4, (y1 + y2) / 2
        arrows.append(
            f'<line x1="{_num(x1)}" y1="{_num(y1)}" x2="{_num(x2)}" y2="{_num(y2)}" marker-end="url(#head)"/>'
            f'<text x="{_num(lx)}" y="{_num(ly)}">d<tspan baseline-shift="sub" font-size="7">{page_label(p.r)}</tspan></text>'
        )
    out.append('<g class="differentials">')
    out.extend(arrows)
    out.append("</g>")
    out.append('<g class="generators">')
    for key in p.nonzero_cells():
        n, s = key
        if not (n0 <= n <= n1 and s0 <= s <= s1):
            continue
        G = p.groups[key]
        orders = G.orders if not G.ring.is_field else (G.ring.p,) * G.ngens
        for (x, y), d in zip(spots(key), orders):
            if d == 0 or G.ring.is_field:
                out.append(f'<circle cx="{_num(x)}" cy="{_num(y)}" r="{_num(spec.dot)}"/>')
            else:
                out.append(f'<circle class="torsion" cx="{_num(x)}" cy="{_num(y)}" r="{_num(spec.dot)}"/>')
                out.append(f'<text class="order" x="{_num(x)}" y="{_num(y - 5)}" text-anchor="middle">{d}</text>')
    out.append("</g>")
    return out, width, height


_STYLE = (
    "<style type=\"text/css\">"
    ".grid line{stroke:#ddd;stroke-width:1}"
    "text{font-family:sans-serif;font-size:10px}"
    ".title{font-size:12px}"
    ".order{font-size:7px}"
    "circle{fill:#000}"
    "circle.torsion{fill:#fff;stroke:#000;stroke-width:1}"
    ".differentials line{stroke:#b00;stroke-width:1}"
    ".differentials text{fill:#b00;font-size:8px}"
    "</style>"
)

_DEFS = (
    '<defs><marker id="head" markerWidth="6" markerHeight="6" refX="5" refY="3" orient="auto">'
    '<path d="M0,0 L6,3 L0,6 z" fill="#b00"/></marker></defs>'
)


def _document(width: int, height: int, body: list[str]) -> str:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    )
    return "\n".join([head, _STYLE, _DEFS, *body, "</svg>"]) + "\n"


def emit_chart(page: PageData, spec: ChartSpec | None = None) -> str:
    """One page as an SVG 1.1 document: a dot per generator (open and
    labelled with its order when torsion), an arrow per nonzero d_r."""
    spec = spec or ChartSpec(page.r)
    body, w, h = _chart_body(page, spec)
    return _document(w, h, body)


def emit_chart_sheet(pages: list[PageData], title: str = "") -> str:
    """Several pages stacked vertically on a common grid."""
    keys = [k for p in pages for k in p.groups]
    stems = (min(k[0] for k in keys), max(k[0] for k in keys)) if keys else (0, 0)
    filts = (min(k[1] for k in keys), max(k[1] for k in keys)) if keys else (0, 0)
    body, y, width = [], 0, 0
    for p in pages:
        name = f"{title} E_{page_label(p.r)}".strip()
        part, w, h = _chart_body(p, ChartSpec(p.r, name, stems=stems, filtrations=filts))
        body.append(f'<g transform="translate(0,{y})">')
        body.extend(part)
        body.append("</g>")
        y += h
        width = max(width, w)
    return _document(width, max(y, 1), body)
