"""Test module for the command-line interface."""

import json

import pytest

from trackmatch.cli import main


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_gen_network(tmp_path, capsys):
    """Test subcommand `gen-network`."""
    for name in ("a.json", "b.json"):
        assert main(
            [
                "--seed", "3",
                "gen-network",
                "--rows", "3",
                "--cols", "4",
                "--spacing", "100",
                "--perturbation", "10",
                "--output", str(tmp_path / name),
            ]
        ) == 0
        assert capsys.readouterr().out.strip() == "12 nodes, 17 edges"
    assert (tmp_path / "a.json").read_bytes() == (
        tmp_path / "b.json"
    ).read_bytes()
    document = json.loads((tmp_path / "a.json").read_text(encoding="utf-8"))
    assert len(document["nodes"]) == 12


def test_gen_network_too_few_rows(tmp_path):
    """Test subcommand `gen-network` for a single row."""
    with pytest.raises(SystemExit) as exc_info:
        main(
            [
                "gen-network",
                "--rows", "1",
                "--output", str(tmp_path / "network.json"),
            ]
        )
    assert exc_info.value.code == 2


def test_simulate(tmp_path, capsys):
    """Test subcommand `simulate`."""
    assert main(
        [
            "gen-network",
            "--rows", "5",
            "--cols", "5",
            "--spacing", "200",
            "--output", str(tmp_path / "network.json"),
        ]
    ) == 0
    assert main(
        [
            "simulate",
            "--network", str(tmp_path / "network.json"),
            "--routes", "2",
            "--tracks-per-route", "2",
            "--sigma", "5",
            "--tau", "10",
            "--min-length", "400",
            "--max-length", "1600",
            "--output", str(tmp_path / "data"),
        ]
    ) == 0
    assert capsys.readouterr().out.splitlines()[-1] == (
        "2 route(s), 4 track(s)"
    )
    for r in range(2):
        directory = tmp_path / "data" / f"route_{r}"
        for k in range(2):
            assert (directory / f"track_{k}.csv").is_file()
            assert (directory / f"truth_{k}.json").is_file()


def test_match(fixtures, tmp_path, capsys):
    """Test subcommand `match`."""
    truth = _write(
        tmp_path / "truth.json",
        json.dumps(
            {
                "segments": [{"edgeId": 0, "lo": 100.0, "hi": 900.0}],
                "totalLength": 800.0,
            }
        ),
    )
    assert main(
        [
            "match",
            "--network", str(fixtures / "straight_road.yaml"),
            "--track", str(fixtures / "straight_track.csv"),
            "--lambda", "0.01",
            "--truth", str(truth),
            "--output", str(tmp_path / "match.json"),
        ]
    ) == 0
    assert capsys.readouterr().out.splitlines() == [
        "total_cost=1600.000000 length=800.000",
        "similarity=1.000000",
    ]
    assert (tmp_path / "match.json").is_file()


def test_multimatch(fixtures, tmp_path, capsys):
    """Test subcommand `multimatch`."""
    (tmp_path / "tracks").mkdir()
    _write(
        tmp_path / "tracks" / "a.csv", "1,100,0\n2,300,0\n3,500,0\n4,700,0\n"
    )
    _write(
        tmp_path / "tracks" / "b.csv",
        "1.5,200,0\n2.5,400,0\n3.5,600,0\n4.5,800,0\n",
    )
    assert main(
        [
            "multimatch",
            "--network", str(fixtures / "straight_road.yaml"),
            "--tracks", str(tmp_path / "tracks"),
            "--method", "iterative",
            "--lambda", "0.01",
        ]
    ) == 0
    out = capsys.readouterr().out
    print(out)
    assert "length=700.000" in out
    assert "samples=8/8" in out


def test_similarity(tmp_path, capsys):
    """Test subcommand `similarity`."""
    first = _write(
        tmp_path / "first.json",
        json.dumps({"segments": [{"edgeId": 0, "lo": 0.0, "hi": 100.0}]}),
    )
    second = _write(
        tmp_path / "second.json",
        json.dumps({"segments": [{"edgeId": 0, "lo": 0.0, "hi": 50.0}]}),
    )
    assert main(["similarity", str(first), str(first)]) == 0
    assert main(["similarity", str(first), str(second)]) == 0
    assert capsys.readouterr().out.splitlines() == ["1.000000", "0.500000"]


def test_sweep(tmp_path, capsys):
    """Test subcommand `sweep` including resuming."""
    assert main(
        ["gen-network", "--output", str(tmp_path / "network.json")]
    ) == 0
    args = [
        "sweep",
        "--network", str(tmp_path / "network.json"),
        "--sigmas", "5",
        "--taus", "60",
        "--lambdas", "1",
        "--methods", "single",
        "--routes", "1",
        "--instances", "2",
        "--distribution", "uniform",
        "--output", str(tmp_path / "results.csv"),
    ]
    capsys.readouterr()
    assert main(args) == 0
    assert "2 new row(s), 0 existing row(s)" in capsys.readouterr().out
    results = (tmp_path / "results.csv").read_bytes()
    assert main(args) == 0
    assert "0 new row(s), 2 existing row(s)" in capsys.readouterr().out
    assert (tmp_path / "results.csv").read_bytes() == results
    assert len(results.decode("utf-8").splitlines()) == 3


def test_sweep_record_runtime(tmp_path):
    """Test subcommand `sweep` with runtime recording."""
    assert main(
        ["gen-network", "--output", str(tmp_path / "network.json")]
    ) == 0
    assert main(
        [
            "sweep",
            "--network", str(tmp_path / "network.json"),
            "--sigmas", "5",
            "--taus", "60",
            "--lambdas", "1",
            "--methods", "single",
            "--routes", "1",
            "--instances", "1",
            "--record-runtime",
            "--output", str(tmp_path / "results.csv"),
        ]
    ) == 0
    header, row = (
        (tmp_path / "results.csv").read_text(encoding="utf-8").splitlines()
    )
    runtime = row.split(",")[header.split(",").index("runtime_ms")]
    assert float(runtime) > 0.0


def test_sweep_missing_axes(tmp_path, capsys):
    """Test subcommand `sweep` without sweep axes."""
    assert main(
        ["sweep", "--sigmas", "5", "--output", str(tmp_path / "r.csv")]
    ) == 1
    assert "Missing sweep axes" in capsys.readouterr().err


def test_missing_file(tmp_path, capsys):
    """Test error reporting for a missing input file."""
    assert main(
        [
            "match",
            "--network", str(tmp_path / "missing.yaml"),
            "--track", str(tmp_path / "missing.csv"),
        ]
    ) == 1
    assert capsys.readouterr().err.startswith("trackmatch match: ")
