import csv
import io
import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from conftest import FIXTURES
from taufilt.cli import COMMANDS, run
from taufilt.fixtures import GOLDEN, run_golden


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("fixture,args,name,expect", GOLDEN, ids=[g[2] for g in GOLDEN])
def test_golden(fixture, args, name, expect):
    code, data = run_golden(FIXTURES, fixture, args)
    assert code == expect
    assert data == (FIXTURES / "golden" / name).read_bytes()


def test_every_command_has_a_golden_run():
    assert {g[1][0] for g in GOLDEN} == set(COMMANDS)


def test_pages_csv_header():
    code, out, _ = call("pages", FIXTURES / "moore_p2.json", "--pages", "2")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["r", "n", "s", "invariant_factors", "d_targets"]
    assert ["2", "1", "0", "Z/2", "(0,2):[1]"] in rows


def test_incomplete_omnibus_is_a_precondition_failure():
    code, out, err = call("omnibus", FIXTURES / "incomplete.json")
    assert code == 3 and out == ""
    assert "precondition failed" in err


def test_missing_and_broken_files(tmp_path):
    assert call("pages", tmp_path / "nope.json")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"format": 1, "ring": "Z", "filtered": [')
    code, _, err = call("pages", bad)
    assert code == 2 and "syntax error" in err


def test_usage_errors():
    assert call("frobnicate")[0] == 2
    assert call("pages", FIXTURES / "sphere.json", "--bogus")[0] == 2
    assert call("pages", FIXTURES / "sphere.json", "--pages", "3..1")[0] == 2
    assert call("pages")[0] == 2
    assert call("pages", FIXTURES / "sphere.json", "--seed", "3")[0] == 2
    assert call("ext", FIXTURES / "sphere.json")[0] == 2
    assert call("tot", FIXTURES / "sphere.json")[0] == 2


def test_seeded_instances_are_reproducible():
    a = call("pages", "--seed", "5", "--format", "json")
    b = call("pages", "--seed", "5", "--format", "json")
    assert a[0] == 0 and a == b
    assert json.loads(a[1])["instance"] == "random-5"
    assert call("tot", "--seed", "2")[0] == 0


def test_omnibus_replay(tmp_path):
    report = tmp_path / "report.json"
    assert call("omnibus", FIXTURES / "moore_p2.json", "-o", report)[0] == 0
    code, out, _ = call("omnibus", FIXTURES / "moore_p2.json", "--replay", report)
    assert code == 0 and json.loads(out)["passed"] is True
    data = json.loads(report.read_text())
    rec = next(r for r in data["records"] if r["lift"] is not None)
    rec["lift"] = [v + 1 for v in rec["lift"]]
    report.write_text(json.dumps(data))
    code, out, _ = call("omnibus", FIXTURES / "moore_p2.json", "--replay", report)
    assert code == 2 and json.loads(out)["problems"]


def test_truncated_omnibus_and_bockstein():
    code, out, _ = call("omnibus", FIXTURES / "moore_p2.json", "--k", "3")
    assert code == 0 and json.loads(out)["k"] == 3
    code, out, _ = call("bockstein", FIXTURES / "moore_p2.json", "--k", "2", "--format", "json")
    assert code == 0 and all(json.loads(out)["clauses"].values())


def test_svg_is_well_formed():
    for args in (["chart", FIXTURES / "moore_p2.json", "--pages", "2"],
                 ["ext", FIXTURES / "exterior.json", "--format", "svg"],
                 ["pages", FIXTURES / "moore_p2.json", "--format", "svg", "--pages", "1..inf"]):
        code, out, _ = call(*args)
        assert code == 0
        root = ET.fromstring(out.encode())
        assert root.tag.endswith("svg")


def test_empty_page_still_draws_a_grid(tmp_path):
    doc = {"format": 1, "ring": "Z", "filtered": {"s_min": 0, "below": "constant", "above": "zero",
                                                  "degrees": [0, 0], "levels": [{"ranks": [0]}], "transitions": []}}
    p = tmp_path / "zero.json"
    p.write_text(json.dumps(doc))
    code, out, _ = call("chart", p)
    assert code == 0
    root = ET.fromstring(out.encode())
    ns = "{http://www.w3.org/2000/svg}"
    assert root.findall(f".//{ns}g[@class='grid']/{ns}line")
    assert not root.findall(f".//{ns}circle")


def test_output_file(tmp_path):
    out = tmp_path / "p.csv"
    code, text, _ = call("pages", FIXTURES / "sphere.json", "-o", out)
    assert code == 0 and text == ""
    assert out.read_bytes() == (FIXTURES / "golden" / "sphere.pages.csv").read_bytes()


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "taufilt.cli", "pages", str(FIXTURES / "sphere.json")],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout == (FIXTURES / "golden" / "sphere.pages.csv").read_text()
