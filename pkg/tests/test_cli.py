"""End-to-end tests for the epshull command line."""
import json

import pandas as pd
import pytest

from app.domain.models import Point
from app.main import main
from app.services.stream_io_service import StreamIOService
from app.services.oracle_service import OracleService

io = StreamIOService()


def _write(path, rows):
    io.write_points(path, [Point(tuple(row)) for row in rows])
    return str(path)


def test_gen_square_grid_is_deterministic(tmp_path):
    first, second = tmp_path / "a.txt", tmp_path / "b.txt"
    assert main(["gen", "--kind", "square_grid", "--n", "4", "--output", str(first)]) == 0
    assert main(["gen", "--kind", "square_grid", "--n", "4", "--output", str(second)]) == 0
    assert len(first.read_text().splitlines()) == 4
    assert first.read_bytes() == second.read_bytes()


def test_gen_lower_bound_writes_sidecar(tmp_path):
    out = tmp_path / "lb.txt"
    assert main(["gen", "--kind", "lower_bound_3d", "--f", "const:1", "--r", "2", "--output", str(out)]) == 0
    assert len(io.read_points(out)) == 34
    metadata = io.read_sidecar(out)
    assert metadata.layer_boundaries == [0, 4, 14, 34]
    assert metadata.eps_star > 0


def test_run_multipass_on_square(tmp_path):
    source = _write(tmp_path / "square.txt", [(0, 0), (1, 0), (1, 1), (0, 1)])
    results = tmp_path / "results.csv"
    code = main([
        "run", "--algo", "multipass", "--input", source, "--eps", "1.0",
        "--output", str(tmp_path / "hull.txt"), "--results", str(results), "--opt", "brute",
    ])
    assert code == 0
    row = pd.read_csv(results).iloc[0]
    assert row["passes"] <= 3
    assert bool(row["is_eps_hull"])
    assert row["status"] == "ok"


def test_run_roa_on_shuffled_circle(tmp_path):
    circle = tmp_path / "circle.txt"
    assert main(["gen", "--kind", "circle", "--n", "1000", "--random-angles", "--seed", "2",
                 "--output", str(circle)]) == 0
    results = tmp_path / "results.csv"
    code = main([
        "run", "--algo", "roa", "--input", str(circle), "--eps", "0.01", "--shuffle-seed", "9",
        "--output", str(tmp_path / "s.txt"), "--results", str(results),
    ])
    assert code == 0
    row = pd.read_csv(results).iloc[0]
    assert bool(row["is_eps_hull"])
    assert row["mode"] == "full,random_order"


def test_run_epsdelta_respects_sample_size(tmp_path):
    source = tmp_path / "disk.txt"
    assert main(["gen", "--kind", "disk", "--n", "500", "--seed", "1", "--output", str(source)]) == 0
    results = tmp_path / "results.csv"
    code = main([
        "run", "--algo", "epsdelta", "--input", str(source), "--k", "4", "--delta", "0.2",
        "--gamma", "0.1", "--samples", "1000", "--output", str(tmp_path / "s.txt"),
        "--results", str(results),
    ])
    assert code == 0
    row = pd.read_csv(results).iloc[0]
    assert row["stored_final"] <= 600
    assert row["stored_peak"] == 600


def test_run_epsdelta_exits_one_when_too_many_directions_are_bad(tmp_path, monkeypatch):
    monkeypatch.setattr(
        OracleService,
        "eps_delta_bad_fraction",
        lambda self, *args, **kwargs: 0.5,
    )
    source = _write(tmp_path / "square.txt", [(0, 0), (1, 0), (1, 1), (0, 1)])
    results = tmp_path / "results.csv"
    code = main([
        "run", "--algo", "epsdelta", "--input", source, "--k", "4", "--delta", "0.2",
        "--gamma", "0.1", "--samples", "100", "--output", str(tmp_path / "s.txt"),
        "--results", str(results),
    ])
    assert code == 1
    row = pd.read_csv(results).iloc[0]
    assert row["status"] == "fail"
    assert row["bad_fraction"] == 0.5


def test_run_roa_rejects_three_dimensional_input(tmp_path):
    source = _write(tmp_path / "cube.txt", [(0, 0, 0), (1, 1, 1)])
    code = main(["run", "--algo", "roa", "--input", source, "--eps", "0.1",
                 "--output", str(tmp_path / "s.txt")])
    assert code == 2


def test_run_missing_input_is_a_usage_error(tmp_path):
    code = main(["run", "--algo", "multipass", "--input", str(tmp_path / "nope.txt"), "--eps", "0.1",
                 "--output", str(tmp_path / "s.txt")])
    assert code == 2


def test_run_requires_eps_for_roa(tmp_path):
    source = _write(tmp_path / "p.txt", [(0, 0), (1, 0)])
    assert main(["run", "--algo", "roa", "--input", source, "--output", str(tmp_path / "s.txt")]) == 2


def test_validate_reports_pass_and_fail(tmp_path, capsys):
    stream = _write(tmp_path / "p.txt", [(0, 0), (1, 0)])
    corner = _write(tmp_path / "s.txt", [(0, 0)])

    assert main(["validate", "--input", stream, "--subset", stream, "--eps", "0"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["is_eps_hull"] is True
    assert summary["max_violation"] <= 1e-12

    assert main(["validate", "--input", stream, "--subset", corner, "--eps", "0.5"]) == 1
    summary = json.loads(capsys.readouterr().out)
    assert summary["is_eps_hull"] is False
    assert summary["max_violation"] == pytest.approx(1.0)
    assert summary["witness"] == [1.0, 0.0]


def test_validate_with_delta(tmp_path, capsys):
    stream = _write(tmp_path / "p.txt", [(0, 0), (1, 0), (1, 1), (0, 1)])
    assert main(["validate", "--input", stream, "--subset", stream, "--eps", "0",
                 "--delta", "0.1", "--samples", "2000"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["bad_fraction"] == 0.0


def test_bench_rejects_unknown_suite(tmp_path):
    assert main(["bench", "--suite", "nope", "--output", str(tmp_path / "b.csv")]) == 2


def test_bench_ear_error_suite(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    assert main(["bench", "--suite", "ear_error", "--trials", "5", "--seed", "1", "--output", str(out)]) == 0
    frame = pd.read_csv(out)
    assert len(frame) == 6
    assert frame["status"].iloc[-1] == "summary"
    assert "agrees=pass" in capsys.readouterr().out


def test_version_flag_exits_cleanly(capsys):
    assert main(["--version"]) == 0
    assert "epshull-streams" in capsys.readouterr().out
