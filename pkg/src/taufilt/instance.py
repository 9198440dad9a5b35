"""Instance files: one JSON format (``"format": 1``) for every command.

An instance carries a ring tag and any of four optional payloads: a filtered
complex, a filtered DG algebra on a monomial basis, a truncated cosimplicial
object, and a Hopf algebra with a comodule. Every error raised while loading
names its location (byte offset, line, column and JSON path).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema

from .complexes import ChainComplex, ChainMap
from .cosimplicial import Comodule, CosimplicialData, CosimplicialError, HopfData, trivial_comodule
from .exactalg import GF, ZZ, AlgebraError, Matrix, Ring
from .filtration import CONSTANT, ZERO, FilteredComplex
from .multiplicative import FilteredDGA, monomial_dga

FORMAT = 1


class InstanceError(ValueError):
    """A located load error. ``kind`` is one of: encoding, syntax, schema,
    ring, dimension, d_squared, chain_map, cosimplicial, multiplication, hopf."""

    def __init__(self, kind: str, message: str, source: str = "<string>", path: str = "$",
                 offset: int | None = None, line: int | None = None, column: int | None = None):
        self.kind = kind
        self.message = message
        self.source = source
        self.path = path
        self.offset = offset
        self.line = line
        self.column = column
        super().__init__(str(self))

    def __str__(self):
        where = self.source
        if self.line is not None:
            where += f":{self.line}:{self.column}"
        at = f" (byte {self.offset})" if self.offset is not None else ""
        return f"{where}: {self.kind} error at {self.path}{at}: {self.message}"

    def as_dict(self) -> dict:
        return {
            "kind": self.kind, "message": self.message, "source": self.source, "path": self.path,
            "offset": self.offset, "line": self.line, "column": self.column,
        }


@dataclass
class Instance:
    name: str
    ring: Ring
    filtered: FilteredComplex | None = None
    dga: FilteredDGA | None = None
    leibniz_n: int = 1
    cosimplicial: CosimplicialData | None = None
    hopf: HopfData | None = None
    comodule: Comodule | None = None
    ext_bounds: tuple[int, int] = (8, 8)
    raw: dict = field(default_factory=dict, repr=False)


def schema() -> dict:
    return json.loads(resources.files("taufilt").joinpath("data/instance.schema.json").read_text("utf-8"))


# ---------------------------------------------------------------------------
# locating JSON paths in the source text

_DECODER = json.JSONDecoder()
_WS = " \t\n\r"


def _skip(text: str, i: int) -> int:
    while i < len(text) and text[i] in _WS:
        i += 1
    return i


def _positions(text: str) -> dict:
    """Start offset (in characters) of every value, keyed by its path tuple."""
    out: dict = {}

    def value(i: int, path: tuple) -> int:
        i = _skip(text, i)
        out[path] = i
        c = text[i]
        if c == "{":
            i = _skip(text, i + 1)
            if text[i] == "}":
                return i + 1
            while True:
                key, i = json.decoder.scanstring(text, _skip(text, i) + 1)
                i = _skip(text, i) + 1  # the colon
                i = _skip(text, value(i, path + (key,)))
                if text[i] == "}":
                    return i + 1
                i += 1
        if c == "[":
            i = _skip(text, i + 1)
            if text[i] == "]":
                return i + 1
            k = 0
            while True:
                i = _skip(text, value(i, path + (k,)))
                k += 1
                if text[i] == "]":
                    return i + 1
                i += 1
        _, end = _DECODER.raw_decode(text, i)
        return end

    value(0, ())
    return out


class _Locator:
    def __init__(self, text: str, source: str):
        self.text = text
        self.source = source
        self._pos: dict | None = None

    def error(self, kind: str, message: str, path: tuple = ()) -> InstanceError:
        if self._pos is None:
            self._pos = _positions(self.text)
        p = tuple(path)
        while p not in self._pos and p:
            p = p[:-1]
        ch = self._pos.get(p, 0)
        offset = len(self.text[:ch].encode("utf-8"))
        line = self.text.count("\n", 0, ch) + 1
        column = ch - (self.text.rfind("\n", 0, ch) + 1) + 1
        return InstanceError(kind, message, self.source, _fmt_path(path), offset, line, column)


def _fmt_path(path) -> str:
    out = "$"
    for k in path:
        out += f"[{k}]" if isinstance(k, int) else f".{k}"
    return out


# ---------------------------------------------------------------------------
# loading


def parse_ring(tag: str) -> Ring:
    if tag == "Z":
        return ZZ
    return GF(int(tag[1:]))


def load(path: str | Path) -> Instance:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"{p}: no such instance file")
    return loads(p.read_bytes(), str(p))


def loads(data: bytes | str, source: str = "<string>") -> Instance:
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise InstanceError("encoding", f"invalid UTF-8 ({e.reason})", source, "$", e.start) from None
    else:
        text = data
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        offset = len(text[: e.pos].encode("utf-8"))
        raise InstanceError("syntax", e.msg, source, "$", offset, e.lineno, e.colno) from None
    loc = _Locator(text, source)
    err = jsonschema.exceptions.best_match(jsonschema.Draft202012Validator(schema()).iter_errors(doc))
    if err is not None:
        raise loc.error("schema", err.message, tuple(err.absolute_path))
    return _build(doc, loc)


def _build(doc: dict, loc: _Locator) -> Instance:
    try:
        ring = parse_ring(doc["ring"])
    except AlgebraError as e:
        raise loc.error("ring", str(e), ("ring",)) from None
    inst = Instance(doc.get("name", ""), ring, raw=doc)
    if "filtered" in doc:
        inst.filtered = _filtered(doc["filtered"], ring, loc, ("filtered",))
    if "multiplication" in doc:
        inst.dga, inst.leibniz_n = _dga(doc["multiplication"], ring, loc, ("multiplication",))
    if "cosimplicial" in doc:
        inst.cosimplicial = _cosimplicial(doc["cosimplicial"], ring, loc, ("cosimplicial",))
    if "hopf" in doc:
        inst.hopf, inst.comodule, inst.ext_bounds = _hopf(doc["hopf"], ring, loc, ("hopf",))
    return inst


def _matrix(rows: list, shape: tuple[int, int], loc: _Locator, path: tuple, what: str) -> Matrix:
    r, c = shape
    if len(rows) != r or any(len(row) != c for row in rows):
        got = f"{len(rows)}x{len(rows[0]) if rows else 0}"
        bad = next((i for i, row in enumerate(rows) if len(row) != c), None)
        p = path + (bad,) if bad is not None and len(rows) == r else path
        raise loc.error("dimension", f"{what} has shape {got}, expected {r}x{c}", p)
    return Matrix(rows, r, c)


def _degree_keys(mats: dict, lo: int, hi: int, loc: _Locator, path: tuple, what: str) -> None:
    for key in mats:
        if not lo <= int(key) <= hi:
            raise loc.error("dimension", f"{what} in degree {key} lies outside the window [{lo},{hi}]", path + (key,))


def _complex(spec: dict, ring: Ring, lo: int, hi: int, loc: _Locator, path: tuple) -> ChainComplex:
    ranks = spec["ranks"]
    if len(ranks) != hi - lo + 1:
        raise loc.error("dimension", f"{len(ranks)} ranks for the degree window [{lo},{hi}]", path + ("ranks",))
    rk = dict(zip(range(lo, hi + 1), ranks))
    d = spec.get("d", {})
    _degree_keys(d, lo + 1, hi, loc, path + ("d",), "differential")
    mats = {}
    for key, rows in d.items():
        n = int(key)
        mats[n] = _matrix(rows, (rk[n - 1], rk[n]), loc, path + ("d", key), f"d_{n}")
    for n in range(lo + 2, hi + 1):
        if n in mats and n - 1 in mats and not (mats[n - 1] @ mats[n]).is_zero(ring):
            raise loc.error("d_squared", f"d_{n - 1} d_{n} != 0", path + ("d", str(n)))
    return ChainComplex(ring, lo, ranks, mats)


def _chain_map(spec: dict, src: ChainComplex, tgt: ChainComplex, loc: _Locator, path: tuple, what: str) -> ChainMap:
    lo, hi = src.lo, src.hi
    _degree_keys(spec, lo, hi, loc, path, what)
    mats = {}
    for key, rows in spec.items():
        n = int(key)
        mats[n] = _matrix(rows, (tgt.rank(n), src.rank(n)), loc, path + (key,), f"{what} in degree {n}")
    ring = src.ring
    for n in range(lo + 1, hi + 1):
        fn = mats.get(n, Matrix.zero(tgt.rank(n), src.rank(n)))
        fm = mats.get(n - 1, Matrix.zero(tgt.rank(n - 1), src.rank(n - 1)))
        if not (tgt.d(n) @ fn - fm @ src.d(n)).is_zero(ring):
            key = str(n) if str(n) in spec else str(n - 1) if str(n - 1) in spec else None
            raise loc.error("chain_map", f"{what} does not commute with the differential in degree {n}",
                            path + ((key,) if key else ()))
    return ChainMap(src, tgt, mats, check=False)


def _window(spec: dict, loc: _Locator, path: tuple) -> tuple[int, int]:
    lo, hi = spec["degrees"]
    if lo > hi:
        raise loc.error("dimension", f"empty degree window [{lo},{hi}]", path + ("degrees",))
    return lo, hi


def _filtered(spec: dict, ring: Ring, loc: _Locator, path: tuple) -> FilteredComplex:
    lo, hi = _window(spec, loc, path)
    s_min = spec.get("s_min", 0)
    levels = [_complex(c, ring, lo, hi, loc, path + ("levels", i)) for i, c in enumerate(spec["levels"])]
    trans_spec = spec.get("transitions", [])
    if len(trans_spec) != len(levels) - 1:
        raise loc.error("dimension", f"{len(levels)} levels need {len(levels) - 1} transitions, got {len(trans_spec)}",
                        path + ("transitions",))
    trans = [
        _chain_map(t, levels[i + 1], levels[i], loc, path + ("transitions", i), f"transition t_{s_min + i + 1}")
        for i, t in enumerate(trans_spec)
    ]
    return FilteredComplex(levels, trans, s_min, spec.get("below", CONSTANT), spec.get("above", ZERO))


def _dga(spec: dict, ring: Ring, loc: _Locator, path: tuple) -> tuple[FilteredDGA, int]:
    names = [b[0] for b in spec["basis"]]
    index = {}
    for i, nm in enumerate(names):
        if nm in index:
            raise loc.error("multiplication", f"repeated basis name {nm!r}", path + ("basis", i))
        index[nm] = i
    basis = [(b[0], b[1]) for b in spec["basis"]]
    filt = {i: b[2] for i, b in enumerate(spec["basis"])}

    def element(el: dict, p: tuple) -> dict:
        for k in el:
            if k not in index:
                raise loc.error("multiplication", f"unknown basis element {k!r}", p + (k,))
        return {index[k]: v for k, v in el.items()}

    d = {}
    for k, el in spec.get("d", {}).items():
        if k not in index:
            raise loc.error("multiplication", f"unknown basis element {k!r}", path + ("d", k))
        d[index[k]] = element(el, path + ("d", k))
    table = {}
    for key, el in spec.get("products", {}).items():
        a, _, b = key.partition("*")
        if a not in index or b not in index:
            raise loc.error("multiplication", f"product key {key!r} must be 'a*b' with basis names", path + ("products", key))
        table[(index[a], index[b])] = element(el, path + ("products", key))
    R = monomial_dga(ring, basis, filt, d, lambda i, j: table.get((i, j), {}), "instance")
    bad = [k for k, v in R.check_axioms().items() if not v]
    if bad:
        raise loc.error("multiplication", f"not a multiplicatively filtered DG algebra: {', '.join(bad)} fails", path)
    return R, spec.get("leibniz_n", 1)


def _cosimplicial(spec: dict, ring: Ring, loc: _Locator, path: tuple) -> CosimplicialData:
    lo, hi = _window(spec, loc, path) if "degrees" in spec else (0, 0)
    levels = [_complex(c, ring, lo, hi, loc, path + ("levels", i)) for i, c in enumerate(spec["levels"])]
    m = len(levels) - 1

    def maps(table: dict, key_ok, src_of, name: str, sect: str) -> dict:
        out = {}
        for key, mats in table.items():
            k, i = map(int, key.split(","))
            if not key_ok(k, i):
                raise loc.error("cosimplicial", f"{name}^{i} into level {k} is out of range for m = {m}", path + (sect, key))
            src, tgt = levels[src_of(k)], levels[k]
            out[(k, i)] = _chain_map(mats, src, tgt, loc, path + (sect, key), f"{name}^{i} into level {k}")
        return out

    cof = maps(spec["cofaces"], lambda k, i: 1 <= k <= m and 0 <= i <= k, lambda k: k - 1, "d", "cofaces")
    codeg = None
    if "codegeneracies" in spec:
        codeg = maps(spec["codegeneracies"], lambda k, i: 0 <= k < m and 0 <= i <= k, lambda k: k + 1, "s", "codegeneracies")
    for k in range(1, m + 1):
        for i in range(k + 1):
            cof.setdefault((k, i), ChainMap.zero(levels[k - 1], levels[k]))
    if codeg is not None:
        for k in range(m):
            for i in range(k + 1):
                codeg.setdefault((k, i), ChainMap.zero(levels[k + 1], levels[k]))
    try:
        return CosimplicialData(levels, cof, codeg)
    except CosimplicialError as e:
        raise loc.error("cosimplicial", str(e), path) from None


def _hopf(spec: dict, ring: Ring, loc: _Locator, path: tuple):
    p = spec["p"]
    if ring.p != p:
        raise loc.error("hopf", f"Hopf data over F{p} in an instance over {ring.name}", path + ("p",))
    coproduct = {g: [tuple(t) for t in terms] for g, terms in spec["coproduct"].items()}
    product = None
    if "product" in spec:
        product = {k: [tuple(t) for t in terms] for k, terms in spec["product"].items()}
    try:
        H = HopfData(p, [tuple(b) for b in spec["basis"]], coproduct, dict(spec["counit"]), spec.get("unit", "1"), product)
    except CosimplicialError as e:
        raise loc.error("hopf", str(e), path + ("basis",)) from None
    for g in coproduct:
        if g not in H.deg:
            raise loc.error("hopf", f"coproduct given for unknown basis element {g!r}", path + ("coproduct", g))
    bad = H.axiom_failures()
    if bad:
        raise loc.error("hopf", bad[0], path)
    if "comodule" in spec:
        cm = spec["comodule"]
        M = Comodule([tuple(b) for b in cm["basis"]], {m: [tuple(t) for t in ts] for m, ts in cm["coaction"].items()})
        bad = M.axiom_failures(H)
        if bad:
            raise loc.error("hopf", bad[0], path + ("comodule",))
    else:
        M = trivial_comodule(H)
    return H, M, (spec.get("s_max", 8), spec.get("t_max", 8))


# ---------------------------------------------------------------------------
# writing


def _rows(m: Matrix) -> list:
    return [list(r) for r in m.rows]


def _nonzero_mats(f, degrees, ring) -> dict:
    return {str(n): _rows(f(n)) for n in degrees if not f(n).is_zero(ring)}


def complex_to_json(c: ChainComplex) -> dict:
    out = {"ranks": list(c.ranks)}
    d = _nonzero_mats(c.d, range(c.lo + 1, c.hi + 1), c.ring)
    if d:
        out["d"] = d
    return out


def filtered_to_json(X: FilteredComplex) -> dict:
    return {
        "s_min": X.s_min,
        "below": X.below,
        "above": X.above,
        "degrees": [X.lo, X.hi],
        "levels": [complex_to_json(X.level(s)) for s in X.window],
        "transitions": [_nonzero_mats(X.transition(s).f, X.degrees, X.ring) for s in range(X.s_min + 1, X.s_max + 1)],
    }


def cosimplicial_to_json(A: CosimplicialData) -> dict:
    out = {
        "degrees": [A.lo, A.hi],
        "levels": [complex_to_json(A.level(k)) for k in range(A.m + 1)],
        "cofaces": {},
    }
    degs = range(A.lo, A.hi + 1)
    for k in range(1, A.m + 1):
        for i in range(k + 1):
            mats = _nonzero_mats(A.d(k, i).f, degs, A.ring)
            if mats:
                out["cofaces"][f"{k},{i}"] = mats
    if A.is_cosimplicial:
        out["codegeneracies"] = {}
        for k in range(A.m):
            for i in range(k + 1):
                mats = _nonzero_mats(A.s(k, i).f, degs, A.ring)
                if mats:
                    out["codegeneracies"][f"{k},{i}"] = mats
    return out


def hopf_to_json(H: HopfData, M: Comodule | None = None, s_max: int = 8, t_max: int = 8) -> dict:
    out = {
        "p": H.p,
        "unit": H.unit,
        "basis": [list(b) for b in H.basis],
        "coproduct": {g: [list(t) for t in H.coproduct[g]] for g in H.names},
        "counit": dict(H.counit),
    }
    if H.product is not None:
        out["product"] = {k: [list(t) for t in v] for k, v in H.product.items()}
    if M is not None:
        out["comodule"] = {"basis": [list(b) for b in M.basis], "coaction": {m: [list(t) for t in M.coaction[m]] for m in M.names}}
    out["s_max"], out["t_max"] = s_max, t_max
    return out


def instance_to_json(name: str, ring: Ring, filtered: FilteredComplex | None = None,
                     cosimplicial: CosimplicialData | None = None, hopf: dict | None = None,
                     multiplication: dict | None = None, description: str | None = None) -> dict:
    doc: dict = {"format": FORMAT, "name": name}
    if description:
        doc["description"] = description
    doc["ring"] = ring.name
    if filtered is not None:
        doc["filtered"] = filtered_to_json(filtered)
    if multiplication is not None:
        doc["multiplication"] = multiplication
    if cosimplicial is not None:
        doc["cosimplicial"] = cosimplicial_to_json(cosimplicial)
    if hopf is not None:
        doc["hopf"] = hopf
    return doc


def _flat(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (list, dict)) or _flat(x) for x in v)


def _dump(v, indent: int) -> str:
    one = json.dumps(v, ensure_ascii=False, separators=(", ", ": "))
    if _flat(v) or not isinstance(v, (list, dict)) or len(one) + indent <= 80:
        return one
    pad, inner = " " * indent, " " * (indent + 1)
    if isinstance(v, list):
        return "[\n" + ",\n".join(inner + _dump(x, indent + 1) for x in v) + "\n" + pad + "]"
    items = (inner + json.dumps(k, ensure_ascii=False) + ": " + _dump(x, indent + 1) for k, x in v.items())
    return "{\n" + ",\n".join(items) + "\n" + pad + "}"


def dumps(doc: dict) -> str:
    """Indented JSON with matrices and other flat arrays kept on one line."""
    return _dump(doc, 0) + "\n"
