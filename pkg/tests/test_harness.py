import csv
import json
from dataclasses import replace

import numpy as np
import pytest

from airdemand import metrics
from airdemand.harness import config as config_mod
from airdemand.harness import grid as grid_mod
from airdemand.harness.cli import main
from airdemand.harness.grid import cell_seed, run_grid, select_champion, write_report
from airdemand.harness.plots import emit_plots

# training rows for ANN-GA: (neurons, pop, rmse, cc, si)
ANN_GA_ROWS = [
    (8, 50, 5.958, 0.581, 0.495), (12, 50, 5.835, 0.604, 0.490), (16, 50, 5.938, 0.609, 0.522),
    (8, 100, 6.146, 0.554, 0.480), (12, 100, 7.595, 0.466, 0.593), (16, 100, 6.250, 0.524, 0.525),
    (8, 150, 6.459, 0.485, 0.555), (12, 150, 5.898, 0.599, 0.486), (16, 150, 6.333, 0.511, 0.522),
]


def rows_of(table):
    return [{"neurons_or_mftype": str(h), "pop_size": p, "rmse": r, "cc": c, "si": s} for h, p, r, c, s in table]


def test_champion_from_published_rows():
    best = select_champion(rows_of(ANN_GA_ROWS))
    assert (best["neurons_or_mftype"], best["pop_size"], best["rmse"]) == ("12", 50, 5.835)


def test_champion_single_and_ties():
    one = rows_of(ANN_GA_ROWS[:1])
    assert select_champion(one) is one[0]
    tie = [{"rmse": 1.0, "cc": 0.5, "si": 0.1}, {"rmse": 1.0, "cc": 0.6, "si": 0.9}]
    assert select_champion(tie) is tie[1]
    tie_si = [{"rmse": 1.0, "cc": 0.6, "si": 0.3}, {"rmse": 1.0, "cc": 0.6, "si": 0.2}]
    assert select_champion(tie_si) is tie_si[1]
    same = [{"rmse": 1.0, "cc": 0.6, "si": 0.2}, {"rmse": 1.0, "cc": 0.6, "si": 0.2}]
    assert select_champion(same) is same[0]
    with_nan = [{"rmse": 1.0, "cc": None, "si": 0.2}, {"rmse": 1.0, "cc": 0.1, "si": 0.2}]
    assert select_champion(with_nan) is with_nan[1]
    with pytest.raises(ValueError):
        select_champion([])


def test_cell_seed_stable():
    assert cell_seed(0, "ANN-GA", 8, 50) == cell_seed(0, "ANN-GA", 8, 50)
    assert len({cell_seed(0, f, h, p) for f in ("ANN-GA", "ANN-PSO") for h in (8, 12) for p in (50, 100)}) == 8


def test_default_grid_cells():
    cells = config_mod.GridConfig().cells()
    assert len(cells) == 27
    for fam in ("ANN-GA", "ANN-PSO", "ANFIS-PSO"):
        assert sum(c[0] == fam for c in cells) == 9


def small_config(tmp_path, iters=8, **grid):
    g = config_mod.GridConfig(pop_sizes=(6, 8), hidden_neurons=(4, 8), **grid)
    cfg = config_mod.ExperimentConfig(data=config_mod.DataConfig(n=40, seed=2), grid=g,
                                      pso=replace(config_mod.PsoConfig(), max_iters=iters),
                                      ga=replace(config_mod.GaConfig(), max_iters=iters))
    return config_mod.override(cfg, "run", output=str(tmp_path))


@pytest.fixture(scope="module")
def small_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("grid")
    cfg = small_config(out)
    report, results = run_grid(cfg)
    write_report(report, out, results)
    emit_plots(report.predictions, out)
    return cfg, report, out


def test_grid_structure(small_run):
    cfg, report, out = small_run
    assert len(report.train_rows) == 2 * 2 * 2 + 3 * 2
    assert [r["family"] for r in report.test_rows] == ["ANN-GA", "ANN-PSO", "ANFIS-PSO"]
    with open(out / "report_train.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["family", "neurons_or_mftype", "pop_size", "rmse", "cc", "si"]
    assert len(rows) == len(report.train_rows)
    with open(out / "report_test.csv") as fh:
        assert fh.readline().strip() == "family,rmse,cc,si"
    cells = [(r["family"], r["neurons_or_mftype"], r["pop_size"]) for r in report.train_rows]
    assert len(set(cells)) == len(cells) == len(cfg.grid.cells())


def test_champions_are_optimal(small_run):
    _, report, _ = small_run
    for fam, i in report.champions.items():
        fam_rows = [r for r in report.train_rows if r["family"] == fam]
        assert all(r["rmse"] >= report.train_rows[i]["rmse"] for r in fam_rows)


def test_plot_files(small_run):
    _, report, out = small_run
    n_test = report.meta["dataset"]["n_test"]
    for fam in ("ANN-GA", "ANN-PSO", "ANFIS-PSO"):
        dev = (out / fam / "deviation.csv").read_text().splitlines()
        assert len(dev) == n_test + 1
        so, sp, r = metrics.taylor_stats(report.predictions[fam]["observed"], report.predictions[fam]["predicted"])
        row = (out / fam / "taylor.csv").read_text().splitlines()[1].split(",")
        assert [float(v) for v in row] == [so, sp, r]
        assert (out / f"scatter_{fam}.svg").read_text().startswith("<svg")
    assert "ANFIS-PSO" in (out / "taylor.svg").read_text()


def test_manifest_contents(small_run):
    _, report, out = small_run
    m = json.loads((out / "manifest.json").read_text())
    assert set(m) == {"meta", "train", "champions", "test", "predictions"}
    assert all("seed" in r and "initial_best_fitness" in r for r in m["train"])
    assert "output" not in m["meta"]["config"]["run"]


def test_perfect_champion_plots(tmp_path):
    o = [1.0, 3.0, 2.0, 5.0]
    emit_plots({"ANN-GA": {"observed": o, "predicted": o}}, tmp_path)
    pts = (tmp_path / "ANN-GA" / "scatter.csv").read_text().splitlines()[1:]
    assert all(a == b for a, b in (line.split(",") for line in pts))
    so, sp, r = map(float, (tmp_path / "ANN-GA" / "taylor.csv").read_text().splitlines()[1].split(","))
    assert so == sp and r == pytest.approx(1.0)


def test_failed_cell_does_not_abort(tmp_path, monkeypatch):
    real = grid_mod.train

    def flaky(family, hyper, pop, *a, **kw):
        if family == "ANN-PSO" and hyper == 8 and pop == 6:
            raise FloatingPointError("boom")
        return real(family, hyper, pop, *a, **kw)

    monkeypatch.setattr(grid_mod, "train", flaky)
    report, _ = run_grid(small_config(tmp_path, iters=3, families=("ANN-GA", "ANN-PSO")))
    failed = [r for r in report.train_rows if r["status"] == "error"]
    assert len(failed) == 1 and "boom" in failed[0]["error"]
    assert len(report.train_rows) == 8 and len(report.test_rows) == 2
    write_report(report, tmp_path)
    assert "ANN-PSO,8,6,nan,nan,nan" in (tmp_path / "report_train.csv").read_text()


def test_config_file_roundtrip(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text(config_mod.DEFAULT_TOML)
    cfg = config_mod.load(p)
    assert cfg.grid == config_mod.GridConfig()
    assert cfg.pso == config_mod.PsoConfig() and cfg.ga == config_mod.GaConfig()


@pytest.mark.parametrize("text, msg", [
    ("[bogus]\nx = 1\n", "unknown section"),
    ("[pso]\nspeed = 3\n", "unknown key"),
    ("[pso]\nw = 3.0\n", "inertia"),
    ("[grid]\nmf_types = ['trapezoid']\n", "membership"),
])
def test_config_errors(tmp_path, text, msg):
    p = tmp_path / "c.toml"
    p.write_text(text)
    with pytest.raises(ValueError, match=msg):
        config_mod.load(p)


def test_custom_dam_spec_in_config(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text('[data]\ndam = "lab"\nn = 20\n[data.dam_spec]\nq_min = 1.0\nq_max = 5.0\n'
                 'gate_height = 0.5\ngate_width = 0.4\nopening_min = 10\nopening_max = 100\n')
    d = config_mod.load(p).dataset()
    assert len(d) == 20 and d.source_tag.startswith("synth:lab:")


# ---------------------------------------------------------------- CLI

def test_cli_synth(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert main(["synth", "--dam", "safarood", "--n", "110", "--seed", "7", "-o", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "flow_m3s,opening_pct,air_velocity_ms" and len(lines) == 111
    a = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    assert 8.7 <= a[:, 0].min() and a[:, 0].max() <= 48.2
    assert 20 <= a[:, 1].min() and a[:, 1].max() <= 100
    assert main(["synth", "--n", "3"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 4


def test_cli_synth_spec_file(tmp_path):
    spec = tmp_path / "lab.toml"
    spec.write_text("[dam]\nq_min = 1.0\nq_max = 2.0\ngate_height = 0.3\ngate_width = 0.3\n"
                    "opening_min = 20\nopening_max = 80\n")
    out = tmp_path / "o.csv"
    assert main(["synth", "--spec", str(spec), "--n", "5", "-o", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 6


def test_cli_train_eval(tmp_path, capsys):
    data = tmp_path / "d.csv"
    main(["synth", "--n", "50", "--seed", "1", "-o", str(data)])
    assert main(["train", "--family", "ANFIS-PSO", "--mf-type", "gaussian", "--pop-size", "8",
                 "--max-iters", "5", "--data", str(data), "-o", str(tmp_path / "m")]) == 0
    model = tmp_path / "m" / "ANFIS-PSO_gaussian_8.json"
    assert model.exists() and (tmp_path / "m" / "ANFIS-PSO_gaussian_8_trace.csv").exists()
    capsys.readouterr()
    assert main(["eval", "--model", str(model), "--data", str(data), "-o", str(tmp_path / "e.csv")]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "family,rmse,mse,cc,si" and out[1].startswith("ANFIS-PSO,")


def test_cli_errors(tmp_path, capsys):
    assert main(["grid", "--data", str(tmp_path / "missing.csv"), "-o", str(tmp_path / "o")]) != 0
    assert "missing.csv" in capsys.readouterr().err
    assert main(["eval", "--model", str(tmp_path / "nope.json"), "--data", "x.csv"]) != 0
    assert "nope.json" in capsys.readouterr().err
    assert main(["synth", "--dam", "hoover"]) != 0
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code != 0
    with pytest.raises(SystemExit) as e:
        main(["grid", "--no-such-flag"])
    assert e.value.code != 0
    assert "usage" in capsys.readouterr().err


def test_cli_print_config(capsys):
    assert main(["grid", "--print-config"]) == 0
    assert "[pso]" in capsys.readouterr().out


def test_cli_grid_and_plot_deterministic(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text("[data]\nn = 30\n[grid]\nhidden_neurons = [4]\npop_sizes = [5]\n"
                   "mf_types = ['gbell']\n[pso]\nmax_iters = 4\n[ga]\nmax_iters = 4\n")
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["grid", "--config", str(cfg), "-o", str(a)]) == 0
    assert main(["grid", "--config", str(cfg), "-o", str(b)]) == 0
    files = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    assert files == sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
    for f in files:
        assert (a / f).read_bytes() == (b / f).read_bytes(), f
    c = tmp_path / "c"
    assert main(["plot", "--report", str(a), "-o", str(c)]) == 0
    for f in ("taylor.svg", "scatter_ANN-GA.svg", "ANFIS-PSO/taylor.csv", "ANN-PSO/deviation.csv"):
        assert (a / f).read_bytes() == (c / f).read_bytes()
    assert b"\r\n" not in (a / "report_train.csv").read_bytes()


def test_parallel_matches_serial(tmp_path):
    cfg = small_config(tmp_path, iters=3)
    serial, _ = run_grid(cfg)
    parallel, _ = run_grid(config_mod.override(cfg, "run", jobs=2))
    assert json.dumps(serial.manifest()) == json.dumps(parallel.manifest())
