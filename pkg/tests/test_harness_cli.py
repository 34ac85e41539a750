import csv
import io
import json

import pytest

from winsum.cli import main
from winsum.core import ConfigurationError
from winsum.harness import CSV_HEADER, RunConfig, format_csv, run_bench, run_compare, run_grid
from winsum.streamgen import parse_stream_spec


def cfg(algo="refined", stream="uniform:-10..10", n=100, eps="0.5", length=2000, **kw):
    return RunConfig(algo, n, eps, parse_stream_spec(stream, seed=1, length=length), **kw)


def test_refined_uniform():
    r = run_compare(cfg(length=10_000, check_invariants=True))
    assert r.ok and r.summary["max_rel_err"] <= 0.5
    assert r.summary["max_q"] <= r.summary["q_bound"]


def test_eh_bits():
    r = run_compare(cfg("eh", "bits:p=0.5", eps="0.1", check_invariants=True))
    assert r.ok and r.summary["max_rel_err"] <= 0.1


def test_standard_half():
    r = run_compare(cfg("standard", beta="0.5", check_invariants=True))
    assert r.ok and r.summary["max_rel_err"] <= 2 / 3


def test_nonempty_allneg():
    r = run_compare(cfg("nonempty", "allneg:-50..-1", eps="0.2", check_invariants=True))
    assert r.ok and (r.exact < 0).all()


def test_buffer_oracle_agrees():
    a = run_compare(cfg("refined", "walk:step=3", n=30, length=600))
    b = run_compare(cfg("refined", "walk:step=3", n=30, length=600, oracle="buffer"))
    assert (a.exact == b.exact).all()


def test_config_errors():
    with pytest.raises(ConfigurationError):
        cfg("eh", "uniform:-1..1")
    with pytest.raises(ConfigurationError):
        cfg("greedy")


def test_grid_runs_independently():
    configs = [cfg(n=n, length=300) for n in (10, 20)]
    assert [r.summary["n"] for r in run_grid(configs)] == [10, 20]


def test_bench_rows():
    rows = run_bench(cfg(n=50, length=500), doublings=2, repeats=1, oracle_steps=50)
    assert [r["n"] for r in rows] == [50, 100, 200]
    assert all(r["updates_per_s"] > 0 and "oracle_ns_per_update" in r for r in rows)


def test_csv_schema():
    text = format_csv(run_compare(cfg(length=50)))
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_HEADER == ("t", "estimate", "exact", "rel_err", "q")
    assert [int(r[0]) for r in rows[1:]] == list(range(1, 51))


def run_cli(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def test_cli_csv_and_summary(capsys, tmp_path):
    out_path = tmp_path / "r.csv"
    code, out, err = run_cli(
        ["run", "--algo", "refined", "--n", "50", "--eps", "0.2", "--stream", "walk:step=3",
         "--seed", "4", "--len", "500", "--report", "csv", "--out", str(out_path), "--check"],
        capsys,
    )
    assert code == 0 and out == ""
    assert out_path.read_text().startswith("t,estimate,exact,rel_err,q\n")
    summary = json.loads(err.strip().splitlines()[-1])
    assert summary["length"] == 500 and summary["violations"] == 0


def test_cli_json(capsys):
    code, out, _ = run_cli(
        ["run", "--algo", "eh", "--n", "20", "--eps", "0.5", "--stream", "bits:p=0.3",
         "--len", "100", "--report", "json"],
        capsys,
    )
    doc = json.loads(out)
    assert code == 0 and len(doc["records"]) == 100
    assert set(doc["records"][0]) == set(CSV_HEADER)
    assert doc["summary"]["algo"] == "eh"


def test_cli_default_length(capsys):
    code, out, _ = run_cli(["run", "--n", "7", "--stream", "uniform:-3..3"], capsys)
    assert code == 0 and len(out.strip().splitlines()) == 71


def test_cli_usage_errors(capsys):
    with pytest.raises(SystemExit) as e:
        main(["run", "--algo", "eh", "--n", "5", "--stream", "uniform:-1..1"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["run", "--n", "5", "--stream", "uniform:-1..1", "--eps", "1.5"])
    assert e.value.code == 2


def test_cli_invariant_failure_exit_code(capsys, monkeypatch):
    from winsum import smooth_histogram

    monkeypatch.setattr(smooth_histogram.SmoothHistogram, "structure_ok", lambda self: False)
    monkeypatch.setattr(smooth_histogram.SmoothHistogram, "_int64_safe", lambda self: False)
    code, _, err = run_cli(
        ["run", "--n", "10", "--stream", "uniform:-5..5", "--len", "50", "--check"], capsys
    )
    assert code == 1
    assert "invariant violation" in err and '"instances"' in err


def test_cli_bench(capsys):
    code, out, _ = run_cli(
        ["bench", "--n", "20", "--stream", "uniform:-5..5", "--len", "200",
         "--doublings", "1", "--repeats", "1"],
        capsys,
    )
    rows = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and [r["n"] for r in rows] == [20, 40]


def test_cli_file_stream(capsys, tmp_path):
    p = tmp_path / "s.txt"
    p.write_text("\n".join(str(v) for v in [3, -1, 4, -1, -5, 9, -2, 6]) + "\n")
    code, out, _ = run_cli(["run", "--n", "3", "--eps", "0.1", "--stream", f"file:{p}"], capsys)
    rows = list(csv.reader(io.StringIO(out)))[1:]
    assert code == 0 and len(rows) == 8
    assert [int(r[2]) for r in rows] == [3, 3, 6, 4, 4, 9, 9, 13]
