"""Command line entry point: synth, train, grid, eval, plot."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

from .. import synth
from ..dataset import fit_normalizer, load_csv, save_csv, split, to_csv_text
from ..models import FAMILIES, TrainedModel, hyper_label, parse_family, train
from ..optimize import write_trace_csv
from . import config as config_mod
from .grid import cell_seed, eval_model, load_manifest, run_grid, write_csv, write_report
from .plots import emit_plots

log = logging.getLogger("airdemand")

GRID_HELP = f"""\
Runs the full training grid and writes report_train.csv, report_test.csv,
manifest.json, models/, traces/ and plot files into the output directory.

Default configuration (use --print-config to save it as a starting point):

{config_mod.DEFAULT_TOML}"""


def _add_data_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("dataset (overrides [data] in --config)")
    g.add_argument("--data", metavar="CSV", help="dataset CSV (flow_m3s,opening_pct,air_velocity_ms)")
    g.add_argument("--dam", help=f"synthetic preset: {', '.join(synth.PRESETS)}")
    g.add_argument("--n", type=int, help="synthetic sample count")
    g.add_argument("--noise-rel", type=float, help="relative Gaussian noise on synthetic targets")
    g.add_argument("--data-seed", type=int, help="synthetic data seed")


def _load_config(args) -> config_mod.ExperimentConfig:
    cfg = config_mod.load(args.config) if args.config else config_mod.ExperimentConfig()
    if args.data:
        cfg = config_mod.override(cfg, "data", path=str(Path(args.data).resolve()))
    elif args.dam:
        cfg = replace(cfg, data=replace(cfg.data, path=None, dam=args.dam, dam_spec=None))
    cfg = config_mod.override(cfg, "data", n=args.n, noise_rel=args.noise_rel, seed=args.data_seed)
    if getattr(args, "max_iters", None):
        cfg = config_mod.override(cfg, "pso", max_iters=args.max_iters)
        cfg = config_mod.override(cfg, "ga", max_iters=args.max_iters)
    return config_mod.override(cfg, "run", seed=getattr(args, "seed", None),
                               output=getattr(args, "output", None), jobs=getattr(args, "jobs", None))


def cmd_synth(args) -> int:
    if args.spec:
        path = Path(args.spec)
        if not path.exists():
            raise FileNotFoundError(f"dam spec file not found: {path}")
        if path.suffix == ".json":
            raw = json.loads(path.read_text(encoding="utf-8"))
        else:
            with open(path, "rb") as fh:
                raw = config_mod.tomllib.load(fh)
            raw = raw.get("dam", raw)
        raw.setdefault("name", path.stem)
        spec = synth.DamSpec.from_dict(raw)
    else:
        spec = synth.get_preset(args.dam)
    d = synth.generate(spec, synth.SynthConfig(args.n, args.noise_rel, args.seed))
    if args.out == "-":
        sys.stdout.write(to_csv_text(d))
    else:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        save_csv(d, args.out)
        log.info("wrote %d samples to %s (%s)", len(d), args.out, d.source_tag)
    return 0


def cmd_train(args) -> int:
    cfg = _load_config(args)
    family = parse_family(args.family)
    if family == "ANFIS-PSO":
        hyper = args.mf_type or "triangular"
    else:
        hyper = args.neurons or 12
    data = cfg.dataset()
    parts = split(data, cfg.split.fraction, cfg.split.seed)
    norm = fit_normalizer(parts.train)
    seed = args.seed if args.seed is not None else cell_seed(cfg.run.seed, family, hyper, args.pop_size)
    model, result = train(family, hyper, args.pop_size, parts.train, norm, seed, pso=cfg.pso, ga=cfg.ga)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{family}_{hyper_label(model.config)}_{args.pop_size}"
    model.save(out / f"{stem}.json")
    write_trace_csv(result, out / f"{stem}_trace.csv")
    rows = []
    for phase, part in (("train", parts.train), ("test", parts.test)):
        m = eval_model(model, part)
        rows.append({"phase": phase, "rmse": m.rmse, "mse": m.mse, "cc": m.cc, "si": m.si})
    write_csv(out / f"{stem}_metrics.csv", ("phase", "rmse", "mse", "cc", "si"), rows)
    for r in rows:
        print(f"{r['phase']:5s} rmse={r['rmse']:.4f} cc={r['cc']:.4f} si={r['si']:.4f}")
    return 0


def cmd_grid(args) -> int:
    if args.print_config:
        sys.stdout.write(config_mod.DEFAULT_TOML)
        return 0
    cfg = _load_config(args)
    t0 = time.perf_counter()

    def progress(row):
        log.info("%-9s %-10s pop=%-3d rmse=%s", row["family"], row["neurons_or_mftype"], row["pop_size"],
                 "failed" if row["rmse"] is None else f"{row['rmse']:.4f}")

    report, results = run_grid(cfg, progress=progress)
    out = write_report(report, cfg.run.output, results)
    emit_plots(report.predictions, out)
    log.info("grid finished in %.1fs; report in %s", time.perf_counter() - t0, out)
    for r in report.test_rows:
        print(f"{r['family']:9s} test rmse={r['rmse']:.4f} cc={r['cc'] if r['cc'] is None else round(r['cc'], 4)} "
              f"si={r['si'] if r['si'] is None else round(r['si'], 4)}")
    return 0 if report.test_rows else 1


def cmd_eval(args) -> int:
    if not Path(args.model).exists():
        raise FileNotFoundError(f"model file not found: {args.model}")
    model = TrainedModel.load(args.model)
    d = load_csv(args.data)
    m = eval_model(model, d)
    row = {"family": model.family, "rmse": m.rmse, "mse": m.mse, "cc": m.cc, "si": m.si}
    if args.out:
        write_csv(Path(args.out), tuple(row), [row])
    print(",".join(row))
    print(",".join(v if isinstance(v, str) else repr(float(v)) for v in row.values()))
    return 0


def cmd_plot(args) -> int:
    manifest = load_manifest(args.report)
    out = Path(args.out) if args.out else (Path(args.report) if Path(args.report).is_dir() else Path(args.report).parent)
    written = emit_plots(manifest["predictions"], out)
    log.info("wrote %d plot files to %s", len(written), out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="airdemand", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset from a dam preset or spec file")
    p.add_argument("--dam", default="safarood", help=f"preset: {', '.join(synth.PRESETS)}")
    p.add_argument("--spec", help="TOML/JSON file with DamSpec fields (overrides --dam)")
    p.add_argument("--n", type=int, default=110)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-rel", type=float, default=0.0)
    p.add_argument("-o", "--out", default="-", help="output CSV path ('-' for stdout)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train a single model")
    p.add_argument("--config")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--neurons", type=int, help="hidden neurons (ANN families)")
    p.add_argument("--mf-type", help="triangular, gbell or gaussian (ANFIS-PSO)")
    p.add_argument("--pop-size", type=int, default=50)
    p.add_argument("--seed", type=int, help="optimizer seed (default: derived from run seed)")
    p.add_argument("--max-iters", type=int)
    p.add_argument("-o", "--out", default="model")
    _add_data_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("grid", help="run the full training grid",
                       description=GRID_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--config")
    p.add_argument("--print-config", action="store_true", help="print the default config and exit")
    p.add_argument("--seed", type=int, help="master seed for per-cell seeds")
    p.add_argument("--max-iters", type=int, help="iterations for both GA and PSO")
    p.add_argument("--jobs", type=int)
    p.add_argument("-o", "--output")
    _add_data_flags(p)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("eval", help="evaluate a stored model on a dataset CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("-o", "--out", help="write the metric row to this CSV")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("plot", help="re-emit plot files from a stored report")
    p.add_argument("--report", required=True, help="report directory or manifest.json")
    p.add_argument("-o", "--out", help="output directory (default: the report directory)")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError, config_mod.ConfigError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"airdemand {args.command}: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
