import csv
import io
import json

import pytest

from kstar_fano.cli import (
    ExportRow,
    export_rows,
    load_allowlist,
    load_lists,
    main,
    parse_family,
    rows_from_json,
    rows_to_json,
)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_enumerate_json_counts(capsys, classification):
    code, out, _ = run(capsys, "enumerate", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == len(classification[0])
    assert [r["id"] for r in rows] == list(range(1, len(rows) + 1))


def test_enumerate_filters(capsys):
    code, out, _ = run(capsys, "enumerate", "--type", "A", "--format", "md")
    assert code == 0
    assert sum(line.startswith("| ") for line in out.splitlines()) - 1 == 50
    code, out, _ = run(capsys, "enumerate", "--n", "5", "--format", "json")
    assert [r["list_id"] for r in json.loads(out)] == [154]
    code, out, _ = run(capsys, "enumerate", "--d", "2,1", "--type", "c", "--format", "json")
    assert [r["list_id"] for r in json.loads(out)] == [142]


def test_enumerate_csv(capsys, tmp_path):
    path = tmp_path / "out.csv"
    code, _, _ = run(capsys, "enumerate", "--type", "B", "--n", "4", "--format", "csv", "--out", str(path))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(path.read_text())))
    assert len(rows) == 3
    for r in rows:
        matrix = [list(map(int, block.split())) for block in r["degree_matrix"].split(";")]
        assert len(matrix[0]) == 6


@pytest.mark.parametrize("argv", [
    ["enumerate", "--format", "xml"],
    ["enumerate", "--type", "D"],
    ["enumerate", "--d", "x"],
    ["enumerate", "--n", "three"],
    ["frobnicate"],
])
def test_bad_flags_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as e:
        main(argv)
    assert e.value.code == 2


def test_verify_clean(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    assert "MISMATCH" not in out
    assert out.count("documented discrepancy") == len(load_allowlist())


def test_verify_strict_lists_allowlisted(capsys):
    code, out, _ = run(capsys, "verify", "--strict")
    assert code == 1
    ids = {int(x.split()[2]) for x in out.splitlines() if x.startswith("MISMATCH: ID")}
    assert ids == {a["list_id"] for a in load_allowlist() if a["list_id"] is not None}
    assert out.count("MISMATCH") == len(load_allowlist())


def test_verify_detects_corrupted_degree(capsys, tmp_path):
    lists = load_lists()
    lists[0]["degree"] += 1
    path = tmp_path / "lists.json"
    path.write_text(json.dumps(lists))
    code, out, _ = run(capsys, "verify", "--lists", str(path))
    assert code == 1
    assert "MISMATCH: ID 1 degree" in out
    assert "A d=1 l=1,2,3,7 s=1,1,1,1" in out


def test_show_by_id(capsys):
    code, out, _ = run(capsys, "show", "1")
    assert code == 0
    assert "-K^3: 42" in out and "list id: 1" in out
    assert "numerator: [1, 20, 20, 1]" in out


def test_show_by_key_and_list_id(capsys):
    code, out, _ = run(capsys, "show", "A", "d=2", "l=2,2,2,2", "s=5,1,1,1")
    assert code == 0
    assert "list id: 149" in out
    assert "class group: Z + Z/2 + Z/2 + Z/2" in out
    assert "cone 01,11,21,31" in out
    code, out2, _ = run(capsys, "show", "--list-id", "149")
    assert code == 0 and out2.splitlines()[0] == out.splitlines()[0]


def test_show_unknown(capsys):
    assert run(capsys, "show", "999")[0] == 3
    assert run(capsys, "show", "--list-id", "999")[0] == 3
    assert run(capsys, "show", "Z d=1")[0] == 3


def test_show_json(capsys):
    code, out, _ = run(capsys, "show", "1", "--format", "json")
    row = json.loads(out)
    assert row["degree"] == 42 and row["numerator"] == [1, 20, 20, 1]


def test_json_round_trip(records):
    rows = export_rows(records)
    assert rows_from_json(rows_to_json(rows)) == rows
    assert all(isinstance(r, ExportRow) for r in rows)


def test_output_deterministic(capsys):
    _, a, _ = run(capsys, "enumerate", "--format", "csv")
    _, b, _ = run(capsys, "enumerate", "--format", "csv")
    assert a == b


def test_parse_family():
    f = parse_family("a d=1,1 l=1,2,2,2,4 s=2,1,1,1,1")
    assert f.type == "A" and f.d == (1, 1)
    with pytest.raises(ValueError):
        parse_family("A d=1")
