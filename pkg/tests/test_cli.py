"""End-to-end command-line behavior, formats, and exit codes."""

import json
import math
import os
import struct

import numpy as np
import pytest

from fibfrac import cli, words


def run(args):
    return cli.main(args)


# ---------------------------------------------------------------------------
# angle parsing


def test_parse_angle_literals():
    assert cli.parse_angle("pi/2") == math.pi / 2
    assert cli.parse_angle("pi") == math.pi
    assert cli.parse_angle("2pi/12") == pytest.approx(math.pi / 6)
    assert cli.parse_angle("2*pi/4") == pytest.approx(math.pi / 2)
    assert cli.parse_angle("0.25") == 0.25
    assert cli.parse_angle(" PI/6 ") == pytest.approx(math.pi / 6)


def test_parse_angle_rejects_garbage():
    for bad in ("pie", "pi/0", "1/pi", "", "pi/2x"):
        with pytest.raises(ValueError):
            cli.parse_angle(bad)


def test_parse_angle_list():
    assert cli.parse_angle_list("0, pi/2") == (0.0, math.pi / 2)
    with pytest.raises(ValueError):
        cli.parse_angle_list(" , ")


# ---------------------------------------------------------------------------
# word


def test_word_text_stdout(capsysbinary):
    assert run(["word", "--i", "2", "--n", "5"]) == 0
    assert capsysbinary.readouterr().out == b"01001010\n"


def test_word_binary_file(tmp_path):
    out = tmp_path / "w.bin"
    assert run(["word", "--i", "3", "--n", "5", "--format", "bin",
                "--out", str(out)]) == 0
    blob = out.read_bytes()
    (length,) = struct.unpack("<Q", blob[:8])
    assert length == 11
    bits = np.unpackbits(np.frombuffer(blob[8:], dtype=np.uint8),
                         bitorder="little")[:length]
    assert np.array_equal(bits, words.word_concat(3, 5).bits())


def test_word_usage_errors(capsysbinary):
    assert run(["word", "--i", "1", "--n", "3"]) == 2
    assert run(["word", "--i", "2", "--n", "0"]) == 2
    assert run(["word", "--i", "2", "--n", "500"]) == 2  # over the length cap
    err = capsysbinary.readouterr().err
    assert b"error" in err


# ---------------------------------------------------------------------------
# curve


def test_curve_svg_structure(tmp_path):
    out = tmp_path / "c.svg"
    assert run(["curve", "--n", "8", "--svg", str(out)]) == 0
    text = out.read_text()
    assert text.startswith('<?xml version="1.0"')
    assert text.count("<path") == 1
    assert text.count("<rect") == 0
    assert 'viewBox="' in text
    # one M plus one L per remaining vertex
    n_pts = words.fib_length(2, 8) + 1
    path = text.split('<path d="')[1].split('"')[0]
    assert path.count("L") == n_pts - 1


def test_curve_svg_bbox_overlay(tmp_path):
    out = tmp_path / "c.svg"
    assert run(["curve", "--n", "8", "--bbox", "--svg", str(out)]) == 0
    assert out.read_text().count("<rect") == 1


def test_curve_svg_deterministic(tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    run(["curve", "--n", "10", "--alpha", "pi/3", "--svg", str(a)])
    run(["curve", "--n", "10", "--alpha", "pi/3", "--svg", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_curve_csv_vertices(tmp_path):
    out = tmp_path / "c.csv"
    assert run(["curve", "--n", "6", "--csv", str(out)]) == 0
    pts = np.loadtxt(out, delimiter=",")
    assert pts.shape == (words.fib_length(2, 6) + 1, 2)
    assert np.array_equal(pts[0], [0.0, 0.0])
    assert pts[1] == pytest.approx([0.0, 1.0], abs=1e-15)


def test_curve_rejects_conflicting_shorthands(tmp_path):
    code = run(["curve", "--svg", str(tmp_path / "a.svg"),
                "--csv", str(tmp_path / "a.csv")])
    assert code == 2


def test_curve_alpha_out_of_range():
    assert run(["curve", "--n", "6", "--alpha", "2.0"]) == 2


# ---------------------------------------------------------------------------
# stats


def test_stats_json_values(tmp_path):
    out = tmp_path / "s.json"
    assert run(["stats", "--i", "2", "--n", "2", "--format", "json",
                "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["vertices"] == 3
    assert doc["width"] == pytest.approx(math.sqrt(2.0))
    assert doc["aspect"] == pytest.approx(2.0)
    assert doc["turn_count"] == -1


def test_stats_text_lines(capsysbinary):
    assert run(["stats", "--n", "8"]) == 0
    lines = capsysbinary.readouterr().out.decode().splitlines()
    keys = [ln.split()[0] for ln in lines]
    assert keys == ["i", "n", "alpha", "segments", "vertices", "width",
                    "height", "aspect", "net_angle", "turn_count"]


# ---------------------------------------------------------------------------
# dim


def test_dim_csv_table(capsysbinary):
    assert run(["dim"]) == 0
    lines = capsysbinary.readouterr().out.decode().splitlines()
    assert lines[0] == "alpha,R,r_plus,aspect_limit,dimension"
    assert len(lines) == 10  # default 9-point grid
    first = lines[1].split(",")
    assert float(first[0]) == 0.0
    assert first[3] == "inf"
    assert float(first[4]) == 1.0


def test_dim_json_nulls_nonfinite(tmp_path):
    out = tmp_path / "d.json"
    assert run(["dim", "--alphas", "0,pi/2", "--format", "json",
                "--out", str(out)]) == 0
    rows = json.loads(out.read_text())
    assert rows[0]["aspect_limit"] is None
    assert rows[0]["dimension"] == 1.0
    assert rows[1]["aspect_limit"] == pytest.approx(math.sqrt(2.0))
    assert rows[1]["dimension"] == pytest.approx(1.6379382096763471)


def test_dim_plot_output(tmp_path):
    plot = tmp_path / "s.svg"
    assert run(["dim", "--out", str(tmp_path / "d.csv"),
                "--plot", str(plot)]) == 0
    assert plot.read_text().count("<path") == 1


def test_dim_bad_angle_list():
    assert run(["dim", "--alphas", "0,xyz"]) == 2
    assert run(["dim", "--alphas", "0,2.5"]) == 2


# ---------------------------------------------------------------------------
# ifs / attractor


def test_ifs_json_stdout(capsysbinary):
    assert run(["ifs", "--alpha", "pi/2"]) == 0
    doc = json.loads(capsysbinary.readouterr().out.decode())
    assert doc["alpha"] == pytest.approx(math.pi / 2)
    assert doc["parity"] == "even"
    assert len(doc["maps"]) == 5
    R = 1.0 / (1.0 + math.sqrt(2.0))
    assert doc["maps"][0]["scale"] == pytest.approx(R, rel=1e-12)


def test_attractor_row_count(tmp_path):
    out = tmp_path / "a.csv"
    assert run(["attractor", "--depth", "2", "--out", str(out)]) == 0
    assert np.loadtxt(out, delimiter=",").shape == (50, 2)


def test_attractor_budget(tmp_path):
    out = tmp_path / "a.csv"
    assert run(["attractor", "--budget", "100", "--out", str(out)]) == 0
    assert np.loadtxt(out, delimiter=",").shape == (50, 2)


def test_attractor_usage_errors(tmp_path):
    assert run(["attractor", "--depth", "13"]) == 2
    assert run(["attractor", "--depth", "3", "--budget", "10"]) == 2
    assert run(["attractor", "--budget", "1"]) == 2


# ---------------------------------------------------------------------------
# verify


def test_verify_words_level(tmp_path):
    out = tmp_path / "r.json"
    assert run(["verify", "--level", "words", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["passed"] is True
    assert rep["level"] == "words"
    assert all(c["name"].startswith("words.") for c in rep["checks"])
    assert all(c["passed"] for c in rep["checks"])


def test_verify_negative_control(tmp_path, capsysbinary):
    out = tmp_path / "r.json"
    assert run(["verify", "--level", "words", "--negative-control",
                "--out", str(out)]) == 1
    rep = json.loads(out.read_text())
    assert rep["passed"] is False
    failed = [c["name"] for c in rep["checks"] if not c["passed"]]
    assert failed == ["ifs.similarity_fit"]


# ---------------------------------------------------------------------------
# output handling


def test_missing_output_directory_is_usage_error(tmp_path):
    target = tmp_path / "no" / "such" / "dir" / "x.csv"
    assert run(["curve", "--n", "6", "--csv", str(target)]) == 2
    assert not target.exists()


def test_no_temp_files_left_behind(tmp_path):
    out = tmp_path / "w.txt"
    assert run(["word", "--i", "2", "--n", "8", "--out", str(out)]) == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["w.txt"]


# ---------------------------------------------------------------------------
# sweep


def sweep_into(tmp_path, name, monkeypatch, threads):
    outdir = tmp_path / name
    monkeypatch.setenv("FIBFRAC_THREADS", str(threads))
    code = run(["sweep", "--alphas", "pi/6,pi/3", "--what", "dim,ifs",
                "--out", str(outdir)])
    assert code == 0
    return {p.name: p.read_bytes() for p in sorted(outdir.iterdir())}


def test_sweep_outputs_and_thread_independence(tmp_path, monkeypatch):
    one = sweep_into(tmp_path, "t1", monkeypatch, 1)
    two = sweep_into(tmp_path, "t2", monkeypatch, 2)
    assert sorted(one) == ["dim.csv", "ifs_00.json", "ifs_01.json"]
    assert one == two
    doc = json.loads(one["ifs_00.json"].decode())
    assert doc["alpha"] == pytest.approx(math.pi / 6)


def test_sweep_attractor_files(tmp_path):
    outdir = tmp_path / "sw"
    assert run(["sweep", "--alphas", "pi/2", "--what", "attractor",
                "--depth", "3", "--out", str(outdir)]) == 0
    pts = np.loadtxt(outdir / "attractor_00.csv", delimiter=",")
    assert pts.shape == (250, 2)


def test_sweep_requires_out():
    with pytest.raises(SystemExit):
        run(["sweep", "--alphas", "pi/2"])


def test_bad_threads_env(tmp_path, monkeypatch):
    monkeypatch.setenv("FIBFRAC_THREADS", "zero")
    assert run(["sweep", "--alphas", "pi/2", "--what", "dim",
                "--out", str(tmp_path / "s")]) == 2
