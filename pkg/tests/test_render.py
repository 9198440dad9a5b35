import csv
import io
import xml.etree.ElementTree as ET

from taufilt import render
from taufilt.cosimplicial import cobar, exterior_hopf
from taufilt.exactalg import GF, ZZ, Matrix, Subquotient
from taufilt.sseq import INF, SpectralSequence

NS = "{http://www.w3.org/2000/svg}"


def test_factor_text():
    assert render.factor_text(Subquotient(ZZ, 2, [(1, 0), (0, 1)], [(0, 4)])) == "Z/4;Z"
    assert render.factor_text(Subquotient(GF(3), 2, [(1, 0), (0, 1)])) == "F3;F3"
    assert render.factor_text(Subquotient(ZZ, 0, [])) == "0"


def test_matrix_text_and_labels():
    assert render.matrix_text(Matrix([[1, -2], [0, 3]])) == "[1 -2;0 3]"
    assert render.page_label(INF) == "inf" and render.page_label(3) == "3"


def test_pages_csv_and_json_agree(moore):
    ss = SpectralSequence(moore)
    pages = [ss.page(r) for r in (1, 2)]
    rows = list(csv.DictReader(io.StringIO(render.pages_csv(pages))))
    js = render.pages_json(pages)
    assert len(rows) == sum(len(p["cells"]) for p in js)
    d2 = [c for c in js[1]["cells"] if c["d_matrix"]]
    assert d2[0]["d_target"] == [0, 2]


def test_chart_marks_torsion(moore):
    page = SpectralSequence(moore).page(2)
    root = ET.fromstring(render.emit_chart(page).encode())
    torsion = root.findall(f".//{NS}circle[@class='torsion']")
    assert len(torsion) == len(page.nonzero_cells())
    orders = {t.text for t in root.findall(f".//{NS}text[@class='order']")}
    assert orders == {"2"}
    assert len(root.findall(f".//{NS}g[@class='differentials']/{NS}line")) == len(page.nonzero_diffs())


def test_chart_is_deterministic(moore):
    ss = SpectralSequence(moore)
    a = render.emit_chart_sheet([ss.page(1), ss.page(2)], "m")
    b = render.emit_chart_sheet([SpectralSequence(moore).page(1), SpectralSequence(moore).page(2)], "m")
    assert a == b


def test_ext_csv():
    table = cobar(exterior_hopf(2, 1), None, 3, 3).table
    rows = list(csv.reader(io.StringIO(render.ext_csv(table))))
    assert rows[0] == ["s", "t", "stem", "dim"]
    assert rows[1:] == [[str(s), str(s), "0", "1"] for s in range(4)]


def test_rows_csv_booleans():
    text = render.rows_csv(["a", "b"], [{"a": True, "b": None}])
    assert text.splitlines() == ["a,b", "true,"]
