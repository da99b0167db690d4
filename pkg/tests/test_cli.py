import csv
import io
import os
import subprocess
import sys

import pytest

from causalcover import analysis
from causalcover.cli import main
from causalcover.graph import atomic_write_text, is_locally_consistent, load_network, load_traces
from causalcover.mdl import load_dl_curve, reconstruct_mdl
from causalcover.setcover import load_plan, reconstruct_cover
from causalcover.synth import NoiseParams, SirParams, apply_noise, child_seed, generate_er, simulate_dataset


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def workdir(tmp_path):
    net = tmp_path / "net.txt"
    traces = tmp_path / "traces.txt"
    assert run("generate", "--nodes", 100, "--avg-degree", 2, "--seed", 7, "-o", net) == 0
    assert run("simulate", "--network", net, "--markers", 400, "--seed", 3, "-o", traces) == 0
    return tmp_path


def test_generate(workdir):
    net = workdir / "net.txt"
    assert net.read_text().splitlines()[0] == "N 100"
    again = workdir / "again.txt"
    run("generate", "--nodes", 100, "--avg-degree", 2, "--seed", 7, "-o", again)
    assert again.read_bytes() == net.read_bytes()
    assert load_network(net) == generate_er(100, 2 / 100, 7)


def test_generate_usage_errors(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run("generate", "--nodes", 0, "-o", tmp_path / "x.txt")
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        run("generate", "--bogus", "-o", tmp_path / "x.txt")
    assert exc.value.code == 2
    assert not (tmp_path / "x.txt").exists()


def test_simulate(workdir):
    ds = load_traces(workdir / "traces.txt")
    assert ds.node_count == 100 and len(ds) <= 400
    explicit = workdir / "t0.txt"
    run("simulate", "--network", workdir / "net.txt", "--markers", 400, "--seed", 3,
        "--p-loss", 0, "-o", explicit)
    assert explicit.read_bytes() == (workdir / "traces.txt").read_bytes()
    lost = workdir / "t1.txt"
    run("simulate", "--network", workdir / "net.txt", "--markers", 400, "--seed", 3,
        "--p-loss", 1, "-o", lost)
    assert lost.read_text() == "N 100\n"


def test_simulate_missing_network(tmp_path, capsys):
    assert run("simulate", "--network", tmp_path / "nope.txt", "-o", tmp_path / "t.txt") == 1
    assert "error" in capsys.readouterr().err
    assert not (tmp_path / "t.txt").exists()


def test_reconstruct_methods(workdir):
    traces = workdir / "traces.txt"
    ds = load_traces(traces)
    out = workdir / "cover.txt"
    plan = workdir / "plan.txt"
    assert run("reconstruct", "--traces", traces, "--method", "cover", "--emit-plan", plan, "-o", out) == 0
    net = load_network(out)
    assert all(is_locally_consistent(net, t) for t in ds)
    assert load_plan(plan) == reconstruct_cover(ds)[1]

    run("reconstruct", "--traces", traces, "--method", "naive2", "-o", workdir / "n2.txt")
    assert len(load_network(workdir / "n2.txt")) == analysis.tp_lower(ds)

    curve = workdir / "curve.csv"
    run("reconstruct", "--traces", traces, "--method", "mdl", "--emit-dl-curve", curve, "-o", workdir / "mdl.txt")
    rows = curve.read_text().splitlines()
    assert rows[0] == "edges,dl_nats"
    assert len(rows) - 1 == len(net) + 1
    assert load_dl_curve(curve) == reconstruct_mdl(ds)[1]


def test_reconstruct_usage_errors(workdir):
    with pytest.raises(SystemExit) as exc:
        run("reconstruct", "--traces", workdir / "traces.txt", "--method", "magic", "-o", workdir / "r.txt")
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        run("reconstruct", "--traces", workdir / "traces.txt", "--method", "naive1",
            "--emit-dl-curve", workdir / "c.csv", "-o", workdir / "r.txt")


def test_evaluate(workdir, capsys):
    net = workdir / "net.txt"
    assert run("evaluate", "--truth", net, "--recon", net) == 0
    out = capsys.readouterr().out.splitlines()
    assert "jd=0.0" in out
    assert not any(line.startswith("fp_upper") for line in out)

    run("reconstruct", "--traces", workdir / "traces.txt", "-o", workdir / "r.txt")
    report = workdir / "report.txt"
    assert run("evaluate", "--truth", net, "--recon", workdir / "r.txt",
               "--traces", workdir / "traces.txt", "-o", report) == 0
    rep = analysis.load_report(report)
    assert rep.bounds is not None and rep.bounds.fp_upper is not None
    assert rep.fp <= rep.bounds.fp_upper

    run("evaluate", "--truth", net, "--recon", net, "--format", "csv")
    header = capsys.readouterr().out.splitlines()[0]
    assert header == ",".join(analysis.CSV_FIELDS)


def test_evaluate_errors(workdir, tmp_path):
    net = workdir / "net.txt"
    assert run("evaluate", "--truth", net, "--recon", tmp_path / "missing.txt") == 1
    small = tmp_path / "small.txt"
    small.write_text("N 5\n0 1\n")
    assert run("evaluate", "--truth", net, "--recon", small) == 1


def test_file_pipeline_matches_in_process(workdir):
    run("reconstruct", "--traces", workdir / "traces.txt", "--method", "mdl", "-o", workdir / "m.txt")
    truth = generate_er(100, 0.02, 7)
    ds = simulate_dataset(truth, SirParams(), 400, child_seed(3, 0))
    assert load_traces(workdir / "traces.txt") == ds
    assert load_network(workdir / "m.txt") == reconstruct_mdl(ds)[0]

    run("simulate", "--network", workdir / "net.txt", "--markers", 400, "--seed", 3,
        "--p-loss", 0.2, "-o", workdir / "noisy.txt")
    noisy = apply_noise(ds, NoiseParams(0.2), child_seed(3, 1))
    assert load_traces(workdir / "noisy.txt") == noisy


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_experiment_fig1(tmp_path):
    out = tmp_path / "fig1.csv"
    assert run("experiment", "fig1", "--seeds", 2, "--markers", "50,100", "--nodes", 40, "-o", out) == 0
    header = out.read_text().splitlines()[0]
    assert header == "method,markers,seed,tpr,fpr,jd,tpr_lower,fpr_upper,jd_upper"
    rows = _read_csv(out)
    assert len(rows) == 2 * 2 * 3
    assert {r["method"] for r in rows} == {"cover", "naive1", "naive2"}
    again = tmp_path / "again.csv"
    run("experiment", "fig1", "--seeds", 2, "--markers", "50,100", "--nodes", 40, "-o", again)
    assert again.read_bytes() == out.read_bytes()


def test_experiment_fig3_and_grid_stability(tmp_path):
    out = tmp_path / "fig3.csv"
    run("experiment", "fig3", "--seeds", 2, "--markers", "60,120", "--nodes", 40,
        "--p-loss", "0,0.05,0.1", "-o", out)
    rows = _read_csv(out)
    assert list(rows[0]) == ["method", "markers", "seed", "p_loss", "tpr", "fpr", "jd"]
    assert {(r["method"], r["p_loss"]) for r in rows} == {
        (m, p) for m in ("mdl", "cover") for p in ("0.0", "0.05", "0.1")
    }
    fewer = tmp_path / "fewer.csv"
    run("experiment", "fig3", "--seeds", 2, "--markers", "60,120", "--nodes", 40,
        "--p-loss", "0,0.1", "-o", fewer)
    subset = [r for r in rows if r["p_loss"] != "0.05"]
    assert _read_csv(fewer) == subset


def test_experiment_fig2(tmp_path):
    out = tmp_path / "fig2.csv"
    run("experiment", "fig2", "--seeds", 1, "--markers", 150, "--nodes", 40, "--p-loss", "0.1", "-o", out)
    rows = _read_csv(out)
    assert [int(r["edges"]) for r in rows] == list(range(len(rows)))
    assert sum(int(r["mdl_stop"]) for r in rows) == 1
    stop = next(r for r in rows if r["mdl_stop"] == "1")
    assert float(stop["dl_nats"]) == min(float(r["dl_nats"]) for r in rows)


def test_experiment_usage_errors(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run("experiment", "fig1", "--markers", "100,50", "-o", tmp_path / "x.csv")
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        run("experiment", "fig3", "--methods", "cover,magic", "-o", tmp_path / "x.csv")
    with pytest.raises(SystemExit):
        run("experiment", "fig3", "--p-loss", "0,abc", "-o", tmp_path / "x.csv")
    assert not (tmp_path / "x.csv").exists()


def test_atomic_write_leaves_nothing_on_failure(tmp_path, monkeypatch):
    target = tmp_path / "out.txt"

    def boom(*args):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(OSError):
        atomic_write_text(target, "data")
    assert list(tmp_path.iterdir()) == []


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "causalcover", "generate", "--nodes", "0", "-o", str(tmp_path / "n.txt")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2
    proc = subprocess.run(
        [sys.executable, "-m", "causalcover", "generate", "--nodes", "20", "-o", str(tmp_path / "n.txt")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert (tmp_path / "n.txt").read_text().startswith("N 20\n")
