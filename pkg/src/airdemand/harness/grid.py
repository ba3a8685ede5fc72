"""Training grid, champion selection, test-phase evaluation and report files."""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import metrics
from ..dataset import Dataset, fit_normalizer, split
from ..models import FAMILIES, TrainedModel, dumps, train
from ..optimize import write_trace_csv
from .config import ExperimentConfig

log = logging.getLogger(__name__)

TRAIN_COLUMNS = ("family", "neurons_or_mftype", "pop_size", "rmse", "cc", "si")
TEST_COLUMNS = ("family", "rmse", "cc", "si")


def cell_seed(master_seed: int, family: str, hyper, pop_size: int) -> int:
    key = f"{master_seed}|{family}|{hyper}|{pop_size}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:4], "big")


@dataclass
class GridReport:
    train_rows: list[dict]
    champions: dict[str, int]
    test_rows: list[dict]
    predictions: dict[str, dict]
    meta: dict
    models: dict[str, TrainedModel] = field(default_factory=dict, repr=False)

    def manifest(self) -> dict:
        return {
            "meta": self.meta,
            "train": self.train_rows,
            "champions": {f: self.train_rows[i] | {"index": i} for f, i in self.champions.items()},
            "test": self.test_rows,
            "predictions": self.predictions,
        }


def _nan_last(v) -> float:
    return math.inf if v is None or (isinstance(v, float) and math.isnan(v)) else v


def select_champion(rows: list[dict]) -> dict:
    """Lowest RMSE; ties go to higher CC, then lower SI, then earlier grid position."""
    if not rows:
        raise ValueError("no rows to select a champion from")
    order = sorted(
        range(len(rows)),
        key=lambda i: (
            _nan_last(rows[i]["rmse"]),
            _nan_last(None if rows[i]["cc"] is None else -rows[i]["cc"]),
            _nan_last(rows[i]["si"]),
            i,
        ),
    )
    return rows[order[0]]


def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _train_cell(args):
    family, hyper, pop, seed, train_set, norm, pso, ga = args
    row = {"family": family, "neurons_or_mftype": str(hyper), "pop_size": pop, "seed": seed}
    try:
        model, result = train(family, hyper, pop, train_set, norm, seed, pso=pso, ga=ga)
        m = metrics.evaluate(train_set.targets, model.predict(train_set))
        row.update(
            status="ok", error=None,
            rmse=m.rmse, mse=m.mse, cc=_clean(m.cc), si=_clean(m.si),
            initial_best_fitness=result.initial_best_fitness,
            final_fitness=result.best_fitness,
            evaluations=result.evaluations,
        )
        return row, model, result
    except Exception as exc:  # one failed cell must not abort its siblings
        log.warning("cell %s/%s/%s failed: %s", family, hyper, pop, exc)
        row.update(status="error", error=f"{type(exc).__name__}: {exc}", rmse=None, mse=None,
                   cc=None, si=None, initial_best_fitness=None, final_fitness=None, evaluations=None)
        return row, None, None


def run_grid(cfg: ExperimentConfig, progress=None) -> tuple[GridReport, dict]:
    """Train every grid cell, pick champions, score them on the test split.

    Returns the report and a mapping cell-key -> OptResult for trace export.
    """
    data = cfg.dataset()
    parts = split(data, cfg.split.fraction, cfg.split.seed)
    norm = fit_normalizer(parts.train)

    jobs = []
    for fam, hyper, pop in cfg.grid.cells():
        seed = cell_seed(cfg.run.seed, fam, hyper, pop)
        jobs.append((fam, hyper, pop, seed, parts.train, norm, cfg.pso, cfg.ga))

    if cfg.run.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.run.jobs) as ex:
            outcomes = list(ex.map(_train_cell, jobs))
    else:
        outcomes = []
        for j in jobs:
            outcomes.append(_train_cell(j))
            if progress:
                progress(outcomes[-1][0])

    rows = [o[0] for o in outcomes]
    results = {}
    champions, models, test_rows, predictions = {}, {}, [], {}
    for fam in FAMILIES:
        idx = [i for i, r in enumerate(rows) if r["family"] == fam and r["status"] == "ok"]
        for i in idx:
            results[(fam, rows[i]["neurons_or_mftype"], rows[i]["pop_size"])] = outcomes[i][2]
        if not idx:
            continue
        best = select_champion([rows[i] for i in idx])
        ci = next(i for i in idx if rows[i] is best)
        champions[fam] = ci
        model = outcomes[ci][1]
        models[fam] = model
        pred = model.predict(parts.test)
        m = metrics.evaluate(parts.test.targets, pred)
        test_rows.append({"family": fam, "neurons_or_mftype": best["neurons_or_mftype"],
                          "pop_size": best["pop_size"], "rmse": m.rmse, "mse": m.mse,
                          "cc": _clean(m.cc), "si": _clean(m.si)})
        predictions[fam] = {"observed": parts.test.targets.tolist(), "predicted": pred.tolist()}

    meta = {
        "config": cfg.to_dict(),
        "dataset": {
            "source_tag": data.source_tag,
            "n": len(data),
            "n_train": len(parts.train),
            "n_test": len(parts.test),
            "train_indices": list(parts.train_indices),
            "test_indices": list(parts.test_indices),
            "test_target_std": float(np.std(parts.test.targets)),
        },
        "normalizer": norm.to_dict(),
        "fitness": "mse on min-max normalized targets",
    }
    return GridReport(rows, champions, test_rows, predictions, meta, models), results


def _fmt(v) -> str:
    if v is None:
        return "nan"
    return repr(float(v)) if isinstance(v, float) else str(v)


def write_csv(path: Path, columns, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in columns])


def write_report(report: GridReport, out_dir, results: dict | None = None) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "report_train.csv", TRAIN_COLUMNS, report.train_rows)
    write_csv(out / "report_test.csv", TEST_COLUMNS, report.test_rows)
    (out / "manifest.json").write_text(dumps(report.manifest()), encoding="utf-8")
    if report.models:
        (out / "models").mkdir(exist_ok=True)
        for fam, model in report.models.items():
            model.save(out / "models" / f"{fam}.json")
    if results:
        (out / "traces").mkdir(exist_ok=True)
        for (fam, hyper, pop), res in results.items():
            write_trace_csv(res, out / "traces" / f"{fam}_{hyper}_{pop}.csv")
    return out


def load_manifest(path) -> dict:
    path = Path(path)
    if path.is_dir():
        path = path / "manifest.json"
    if not path.exists():
        raise FileNotFoundError(f"report manifest not found: {path}")
    return json.loads(path.read_text(encoding="utf-8"))


def eval_model(model: TrainedModel, d: Dataset) -> metrics.MetricRow:
    return metrics.evaluate(d.targets, model.predict(d), family=model.family)

