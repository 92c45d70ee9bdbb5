from __future__ import annotations

import json
import subprocess
import sys

import pytest

from conftest import EXAMPLE_TYPE, EXAMPLE_VALUES
from jagged import storage
from jagged.cli import ExpressionSyntaxError, main, parse_expression
from jagged.jsonio import to_json
from jagged.slicing import At, FlatIndex, Range, getitem


@pytest.fixture
def example_json(tmp_path):
    path = tmp_path / "example.json"
    path.write_text(json.dumps(EXAMPLE_VALUES))
    return path


@pytest.fixture
def example_container(example_json, tmp_path, capsys):
    out = tmp_path / "example.jagged"
    assert main(["convert", str(example_json), str(out)]) == 0
    capsys.readouterr()
    return out


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_convert_prints_type_and_writes_container(example_json, tmp_path, capsys):
    code, out, err = run(capsys, "convert", example_json, tmp_path / "c")
    assert (code, out, err) == (0, EXAMPLE_TYPE + "\n", "")
    assert storage.is_container(tmp_path / "c")


def test_convert_empty_array(tmp_path, capsys):
    (tmp_path / "e.json").write_text("[]")
    assert run(capsys, "convert", tmp_path / "e.json", tmp_path / "c")[:2] == (0, "0 * unknown\n")


def test_convert_ndjson_and_fast_path(tmp_path, capsys):
    (tmp_path / "n.json").write_text('{"a": 1}\n{"a": 2}\n')
    assert run(capsys, "convert", "--ndjson", tmp_path / "n.json", tmp_path / "c1")[1] == '2 * {"a": int64}\n'
    (tmp_path / "f.json").write_text("[[1.5], [], [2]]")
    code, out, _ = run(capsys, "convert", "--numbers-depth", 2, tmp_path / "f.json", tmp_path / "c2")
    assert (code, out) == (0, "3 * var * float64\n")


def test_type_of_container_and_json(example_json, example_container, capsys):
    assert run(capsys, "type", example_container)[:2] == (0, EXAMPLE_TYPE + "\n")
    assert run(capsys, "type", example_json)[:2] == (0, EXAMPLE_TYPE + "\n")


def test_type_of_strings(tmp_path, capsys):
    (tmp_path / "s.json").write_text('["one", "two", "three"]')
    run(capsys, "convert", tmp_path / "s.json", tmp_path / "c")
    assert run(capsys, "type", tmp_path / "c")[1] == "3 * string\n"


def test_slice_prints_json(example_container, capsys):
    code, out, err = run(capsys, "slice", example_container, '"y", [0, 2], :, 1:')
    assert (code, out, err) == (0, "[[[],[0.2]],[[0.3,3.3]]]\n", "")


def test_slice_matches_library(example_container, capsys):
    expected = to_json(getitem(storage.read(example_container), ("y", slice(None), slice(None), 0)))
    assert run(capsys, "slice", example_container, '"y", :, :, 0')[1] == expected + "\n"


def test_slice_scalars(example_container, capsys):
    assert run(capsys, "slice", example_container, "0, 1, 'y', 1")[1] == "0.2\n"
    assert run(capsys, "slice", example_container, '0, 0, "x"')[1] == "1\n"
    assert run(capsys, "slice", example_container, '0, 0, "x"', "--json")[1] == "1\n"
    assert run(capsys, "slice", example_container, '0, 0')[1] == '{"x":1,"y":[1.1]}\n'


def test_empty_expression_is_identity(example_container, capsys):
    assert run(capsys, "slice", example_container, "")[1] == to_json(storage.read(example_container)) + "\n"


def test_slice_missing_field_exits_1(example_container, capsys):
    code, out, err = run(capsys, "slice", example_container, '"z"')
    assert (code, out) == (1, "")
    assert "'z'" in err and "x" in err and "y" in err


def test_slice_out_of_range_reports_position(example_container, capsys):
    code, _, err = run(capsys, "slice", example_container, ":, 1")
    assert code == 1
    assert "sublist 1" in err and "[dim 1]" in err


@pytest.mark.parametrize("expr, column", [('"y", [0, 2', 10), ("0, , 1", 3), ("0, foo", 3), ("::0", 0)])
def test_slice_syntax_error_exits_3(example_container, capsys, expr, column):
    code, out, err = run(capsys, "slice", example_container, expr)
    assert (code, out) == (3, "")
    assert f"column {column}" in err


def test_tojson_round_trips(example_container, capsys):
    code, out, _ = run(capsys, "tojson", example_container)
    assert code == 0
    assert json.loads(out) == EXAMPLE_VALUES


def test_missing_input_exits_2(tmp_path, capsys):
    for argv in (["type", tmp_path / "nope"], ["tojson", tmp_path / "nope"],
                 ["slice", tmp_path / "nope", "0"], ["convert", tmp_path / "nope", tmp_path / "c"]):
        code, out, err = run(capsys, *argv)
        assert (code, out) == (2, "")
        assert "nope" in err


def test_corrupt_container_exits_2(example_container, capsys):
    (example_container / "b1.raw").write_bytes(b"")
    code, _, err = run(capsys, "type", example_container)
    assert code == 2 and "b1" in err


def test_truncated_json_exits_1_with_offset(tmp_path, capsys):
    (tmp_path / "t.json").write_text("[[1, 2], [3")
    code, out, err = run(capsys, "convert", tmp_path / "t.json", tmp_path / "c")
    assert (code, out) == (1, "")
    assert "offset 11" in err
    assert not (tmp_path / "c").exists()


def test_convert_refuses_non_container_directory(example_json, tmp_path, capsys):
    (tmp_path / "d").mkdir()
    (tmp_path / "d" / "x").write_text("")
    assert run(capsys, "convert", example_json, tmp_path / "d")[0] == 2


def test_bench_output(example_json, capsys):
    code, out, err = run(capsys, "bench", example_json, "--repeat", 3)
    lines = out.splitlines()
    assert code == 0 and err == ""
    assert [line.split()[0] for line in lines[:3]] == ["run=1", "run=2", "run=3"]
    assert all(line.split()[1].startswith("seconds=") and line.split()[2].startswith("mbps=") for line in lines[:3])
    rates = sorted(float(line.split("mbps=")[1]) for line in lines[:3])
    assert lines[3] == f"median_mbps={rates[1]:.3f}"


def test_bench_invalid_input_exits_before_timing(tmp_path, capsys):
    (tmp_path / "b.json").write_text("[1, 2,]")
    code, out, err = run(capsys, "bench", tmp_path / "b.json")
    assert (code, out) == (1, "")
    assert "offset 6" in err


def test_parse_expression():
    assert parse_expression('"y", [0, 2], :, 1:') == (
        parse_expression('"y"')[0], FlatIndex([0, 2]), Range(None, None, None), Range(1, None, None)
    )
    assert parse_expression(" -1 , ::-2 ") == (At(-1), Range(None, None, -2))
    assert parse_expression("   ") == ()
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_expression("1, 'x")
    assert info.value.position == 5


def test_module_entry_point(example_json):
    proc = subprocess.run([sys.executable, "-m", "jagged", "type", str(example_json)],
                          capture_output=True, text=True, check=False)
    assert (proc.returncode, proc.stdout) == (0, EXAMPLE_TYPE + "\n")
