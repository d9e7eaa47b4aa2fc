import json
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isoperturb.cli import loglog_slope, main
from isoperturb.graphs import complete, gnp, permuted_pair, read_graph, write_graph


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_example_pair(capsys, data_dir):
    code, out, _ = run(capsys, "test", str(data_dir / "example_a.el"), str(data_dir / "example_b.el"))
    assert code == 0 and "mapping: 1 3 4 5 6 2" in out


def test_same_file_twice(capsys, data_dir):
    path = str(data_dir / "example_a.g6")
    assert run(capsys, "test", path, path)[0] == 0


def test_degree_mismatch(capsys, data_dir):
    code, out, _ = run(capsys, "test", str(data_dir / "k4.el"), str(data_dir / "c4.el"))
    assert code == 1 and "degree sequence mismatch" in out


def test_parse_and_usage_errors(capsys, data_dir, tmp_path):
    bad = tmp_path / "bad.el"
    bad.write_text("3\n1 7\n")
    code, _, err = run(capsys, "test", str(bad), str(data_dir / "k4.el"))
    assert code == 2 and "line 2" in err
    assert run(capsys, "test", str(tmp_path / "missing.el"), str(bad))[0] == 2
    assert run(capsys, "test", "only-one-file")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_structured_output_is_byte_stable(capsys, data_dir):
    code, out, _ = run(capsys, "trace", str(data_dir / "example_a.el"), str(data_dir / "example_b.el"),
                       "--eps", "paper", "--format", "json-lines", "--deterministic")
    assert code == 0
    assert out == (data_dir / "example_trace.jsonl").read_text()
    docs = [json.loads(line) for line in out.splitlines()]
    assert docs[0]["format"] == "isoperturb-trace" and docs[0]["version"] == 1
    assert [d["m_A"] for d in docs[1:-1]] == [2, 3, 5, 5, 6]
    assert docs[2]["epsilon"] == "0.1" and docs[2]["epsilon_exact"] == "1/10"
    assert docs[-1]["mapping"] == "1 3 4 5 6 2"


def test_timings_present_unless_deterministic(capsys, data_dir):
    _, out, _ = run(capsys, "test", str(data_dir / "example_a.el"), str(data_dir / "example_b.el"),
                    "--format", "json-lines")
    records = [json.loads(line) for line in out.splitlines()[1:-1]]
    assert all(isinstance(r["wall_time_ms"], float) for r in records)


def test_human_trace_renders_classes(capsys, data_dir):
    code, out, _ = run(capsys, "trace", str(data_dir / "example_a.el"), str(data_dir / "example_b.el"),
                       "--eps", "paper")
    assert code == 0
    assert "R1(A^0)={1,6}, R2(A^0)={2,3,4,5}" in out
    assert "D12=0.01637" in out
    assert "D12=0.01811, D13=0.001762, D23=0.01635" in out
    assert "correspondence: 1 3 4 5 . ." in out


def test_complete_self_trace(capsys, tmp_path):
    path = tmp_path / "k6.el"
    write_graph(complete(6), str(path))
    _, out, _ = run(capsys, "trace", str(path), str(path), "--format", "json-lines", "--deterministic")
    docs = [json.loads(line) for line in out.splitlines()]
    assert docs[1]["m_A"] == 1 and docs[2]["m_A"] == 2
    assert docs[2]["epsilon_exact"] == "1/6"


def test_gen_and_roundtrip(capsys, tmp_path):
    prefix = str(tmp_path / "pair.g6")
    code, out, _ = run(capsys, "gen", "pair", "--base", "torus", "--rows", "3", "--cols", "4", "--out", prefix)
    assert code == 0
    a, b = read_graph(str(tmp_path / "pair_a.g6")), read_graph(str(tmp_path / "pair_b.g6"))
    code, _, _ = run(capsys, "test", str(tmp_path / "pair_a.g6"), str(tmp_path / "pair_b.g6"))
    assert code == 0 and a.n == b.n == 12
    code, out, _ = run(capsys, "gen", "gnp", "--n", "5", "--prob", "0.5", "--seed", "3")
    assert code == 0 and out.splitlines()[0] == "5"
    assert run(capsys, "gen", "torus", "--rows", "2", "--cols", "2")[0] == 2
    assert run(capsys, "gen", "pair")[0] == 2


def test_hunt_gnp(capsys):
    code, out, _ = run(capsys, "hunt", "--count", "200", "--n", "7", "--seed", "42", "--format", "json-lines")
    report = json.loads(out)
    assert code == 0 and report["counterexamples"] == 0
    assert report["engine_iso_oracle_not"] == 0
    assert report["engine_iso_oracle_iso"] + report["engine_not_oracle_not"] == 200


def test_hunt_complete(capsys):
    code, out, _ = run(capsys, "hunt", "--family", "complete", "--n", "6", "--count", "10", "--format", "json-lines")
    report = json.loads(out)
    assert code == 0 and report["engine_iso_oracle_iso"] == 10


def test_hunt_torus_needs_cap_override(capsys, tmp_path):
    argv = ["hunt", "--family", "torus", "--rows", "4", "--cols", "4", "--count", "6", "--format", "json-lines"]
    assert run(capsys, *argv)[0] == 2
    code, out, _ = run(capsys, *argv, "--oracle-cap", "16", "--out", str(tmp_path))
    assert code == 0 and json.loads(out)["counterexamples"] == 0


def test_bench_csv(capsys):
    code, out, _ = run(capsys, "bench", "--family", "complete", "--sizes", "4,5,6,7,8")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("family,size,n,")
    rows = [line.split(",") for line in lines[1:-1]]
    assert [int(r[5]) for r in rows] == [3, 4, 5, 6, 7]
    assert lines[-1].startswith("# loglog_slope,")


def test_loglog_slope():
    rows = [{"n": n, "seconds": str(0.001 * n**3)} for n in (4, 8, 16)]
    assert loglog_slope(rows) == pytest.approx(3.0)
    assert loglog_slope(rows[:1]) is None


@settings(max_examples=15, deadline=None)
@given(st.integers(3, 8), st.integers(0, 2**32))
def test_exit_code_tracks_isomorphism(tmp_path_factory, n, seed):
    tmp = tmp_path_factory.mktemp("pairs")
    g = gnp(n, 0.5, seed)
    a, b, _ = permuted_pair(g, seed)
    write_graph(a, str(tmp / "a.el"))
    write_graph(b, str(tmp / "b.g6"))
    assert main(["test", str(tmp / "a.el"), str(tmp / "b.g6"), "--out", str(tmp / "r.txt")]) == 0


def test_console_entry_point(data_dir):
    proc = subprocess.run(
        [sys.executable, "-m", "isoperturb.cli", "test", str(data_dir / "k4.el"), str(data_dir / "c4.el")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 1


def test_log_level_from_environment(data_dir):
    env = {"ISO_PERTURB_LOG": "DEBUG", "PATH": ""}
    proc = subprocess.run(
        [sys.executable, "-m", "isoperturb.cli", "test", str(data_dir / "example_a.el"),
         str(data_dir / "example_b.el")],
        capture_output=True, text=True, env=env,
    )
    assert proc.returncode == 0 and "DEBUG isoperturb" in proc.stderr
