import json
import subprocess
import sys

import pytest

from cuboid_eform import cli, polyparse
from cuboid_eform.polyparse import _read_embedded_corpus


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_kernel(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "kernel")
    doc = json.loads(out)
    assert code == 0 and doc["ok"] and doc["passed"] == 14


def test_verify_all(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "verify", "--suite", "all", "--out", str(target))
    doc = json.loads(target.read_text())
    assert code == 0 and out == "" and doc["failed"] == 0
    assert {c["name"].split("/")[0] for c in doc["checks"]} == {"s3", "factor", "eform", "kernel"}


def test_corrupted_corpus_exits_2(capsys, monkeypatch):
    raw = _read_embedded_corpus()
    monkeypatch.setattr(polyparse, "_read_embedded_corpus", lambda: raw.replace(b"81*", b"82*", 1))
    code, _, err = run(capsys, "verify", "--suite", "kernel")
    assert code == 2 and "checksum" in err


def test_corpus_override_failure_exits_1(capsys, tmp_path):
    bad = tmp_path / "k.poly"
    bad.write_text("~q1:=E10;\n")
    code, out, _ = run(capsys, "verify", "--suite", "kernel", "--corpus", str(bad))
    doc = json.loads(out)
    assert code == 1 and doc["checks"][0]["witness"] == "x1+x2+x3"


def test_reduce_default(capsys):
    code, out, _ = run(capsys, "reduce")
    doc = json.loads(out)
    assert code == 0 and doc["annihilated"] == doc["targets"] == 15
    rel = {c["name"]: c.get("details", {}).get("relation") for c in doc["comparisons"]}
    assert rel["midpoint/m412"] == "equal"


def test_reduce_displayed_convention_records_outcome(capsys):
    code, out, _ = run(capsys, "reduce", "--convention", "displayed")
    doc = json.loads(out)
    assert doc["convention"] == "displayed" and doc["targets"] == 15
    # the alias kept for the documented flag value gives the same report
    _, alias, _ = run(capsys, "reduce", "--convention", "paper")
    assert json.loads(alias)["checks"] == [
        {**c, "name": c["name"].replace("/displayed/", "/paper/")} for c in doc["checks"]
    ]
    assert code == (0 if doc["ok"] else 1)


def test_reduce_emit_equations(capsys):
    code, out, _ = run(capsys, "reduce", "--emit-equations")
    names = [line.split(":=")[0] for line in out.splitlines()]
    assert code == 0 and names == ["m410", "m411", "m412", "m413"]
    assert "4*E11^2" in out.splitlines()[2]


def test_search_bound_2(capsys):
    code, out, _ = run(capsys, "search", "--bound", "2")
    rows = [json.loads(line) for line in out.splitlines()]
    assert code == 0
    assert {"e10": 2, "e01": 1, "e11": 1, "l": 1, "positive": True, "primitive": True} in rows
    assert list(rows[0]) == ["e10", "e01", "e11", "l", "positive", "primitive"]


def test_search_positive_filter(capsys):
    code, out, _ = run(capsys, "search", "--bound", "50", "--positive")
    rows = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and rows
    assert all(min(r["e10"], r["e01"], r["e11"], r["l"]) > 0 and r["positive"] for r in rows)


def test_search_shard_determinism(capsys):
    _, one, _ = run(capsys, "search", "--bound", "10", "--shards", "1")
    _, four, _ = run(capsys, "search", "--bound", "10", "--shards", "4")
    assert one == four and one.count("\n") > 100


def test_search_env_shards(capsys, monkeypatch):
    _, base, _ = run(capsys, "search", "--bound", "10")
    monkeypatch.setenv("CUBOID_EFORM_SHARDS", "4")
    _, env, _ = run(capsys, "search", "--bound", "10")
    assert base == env


def test_search_lift(capsys):
    code, out, _ = run(capsys, "search", "--bound", "3", "--lift")
    rows = [json.loads(line) for line in out.splitlines()]
    assert code == 0
    for r in rows:
        assert ("lift" in r) == (r["e10"] ** 2 + r["e01"] ** 2 != 0)
        if "lift" in r:
            assert r["lift"]["verified"]


def test_search_bad_bound(capsys):
    code, _, err = run(capsys, "search", "--bound", "0")
    assert code == 2 and "bound" in err


def test_search_unwritable_output(capsys, tmp_path):
    code, _, _ = run(capsys, "search", "--bound", "2", "--out", str(tmp_path / "missing" / "x.jsonl"))
    assert code == 2


def test_heron(capsys):
    code, out, _ = run(capsys, "heron", "--bound", "10")
    rows = [json.loads(line) for line in out.splitlines()]
    assert code == 0
    assert rows == [
        {"a": 3, "b": 4, "c": 5, "s": 6},
        {"a": 5, "b": 5, "c": 6, "s": 12},
        {"a": 5, "b": 5, "c": 8, "s": 12},
        {"a": 6, "b": 8, "c": 10, "s": 24},
    ]


def test_lift_json_and_jsonl(capsys, tmp_path):
    single = tmp_path / "p.json"
    single.write_text(json.dumps({"e10": 2, "e01": 1, "e11": 1, "l": 1}))
    code, out, _ = run(capsys, "lift", "--input", str(single))
    row = json.loads(out)
    assert code == 0 and row["scale_alpha"] == 10 and row["rational_point"]["E21"] == "1/10"

    many = tmp_path / "p.jsonl"
    many.write_text('{"e10":1,"e01":1,"e11":0,"l":0}\n{"e10":0,"e01":0,"e11":5,"l":1}\n')
    code, out, _ = run(capsys, "lift", "--input", str(many))
    rows = [json.loads(line) for line in out.splitlines()]
    assert code == 1 and rows[0]["verified"] and "excluded" in rows[1]["error"]


def test_lift_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "lift", "--input", str(tmp_path / "nope.json"))
    assert code == 2


def test_parse_kernel_corpus_stats(capsys, tmp_path):
    path = tmp_path / "kernel.poly"
    path.write_bytes(_read_embedded_corpus())
    code, out, _ = run(capsys, "parse", str(path), "--stats")
    stats = [line for line in out.splitlines() if line.startswith("# ")]
    assert code == 0 and len(stats) == 14
    assert stats[12].split("\t") == ["# ~q13", "terms=223", "total_degree=13", "weighted_degree=15"]


def test_parse_zero_and_error(capsys, tmp_path):
    z = tmp_path / "z.poly"
    z.write_text("0;")
    code, out, _ = run(capsys, "parse", str(z))
    assert code == 0 and out.strip().rstrip(";") == "0"
    bad = tmp_path / "bad.poly"
    bad.write_text("q:=E01^*2;")
    code, _, err = run(capsys, "parse", str(bad))
    assert code == 1 and "1:8" in err


def test_parse_other_ring(capsys, tmp_path):
    f = tmp_path / "h.poly"
    f.write_text("h:=(4*S)^2+(a^2+b^2-c^2)^2-4*a^2*b^2;")
    code, out, _ = run(capsys, "parse", str(f), "--ring", "HERON", "--stats")
    assert code == 0 and "weighted_degree=-" in out


def test_console_script_module_entry():
    proc = subprocess.run(
        [sys.executable, "-m", "cuboid_eform.cli", "search", "--bound", "1"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0 and proc.stdout.count("\n") == 4


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as info:
        cli.main(["search"])
    assert info.value.code == 2
