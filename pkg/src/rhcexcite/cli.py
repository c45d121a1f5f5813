"""Command line entry point: ``rhcexcite design|evaluate|compare``.

Exit codes: 0 success, 1 unexpected error, 2 configuration error,
3 design infeasible or aborted, 4 I/O or CSV parse error.
"""

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .baselines import KINDS as BASELINES
from .baselines import generate_baseline
from .config import ExperimentConfig, load_config
from .core import ConfigError, RunConfig, seeded_rng
from .criterion import DistanceDataset, assign_weights, build_psi
from .metrics import coverage
from .optimizer import DesignError, design_signal
from .plant import PlantDivergenceError, PlantModel, process_distribution

log = logging.getLogger("rhcexcite")

EXIT_OK, EXIT_ERROR, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_IO = 0, 1, 2, 3, 4

_BASELINE_STREAM = 2


# -- shared building blocks ----------------------------------------------------

def reference_set(cfg, weighting=None):
    P = build_psi(cfg.constraints, cfg.psi_resolution, cfg.psi_cap)
    q = assign_weights(P, cfg.weighting if weighting is None else weighting)
    return DistanceDataset(P, q)


def true_distribution(cfg, u):
    plant = cfg.make_plant()
    return process_distribution(plant, u, u0=cfg.surrogate.initial_state[0])


def report_for(cfg, X, variant, runtime_s):
    P = build_psi(cfg.constraints, cfg.psi_resolution, cfg.psi_cap)
    return coverage(X, P, cfg.constraints, cfg.weighting.boosts, cfg.run.normalization,
                    cfg.metric, variant, runtime_s, cfg.run.seed)


def write_reference(cfg, out, psi):
    io.write_psi(out / "psi.csv", psi.points, psi.weights)
    io.write_regions(out / "regions.csv", cfg.weighting.boosts, cfg.constraints.dim)


def _summary(path, lines):
    Path(path).write_text("\n".join(lines) + "\n")


def _report_lines(r):
    return [
        f"variant:          {r.variant}",
        f"seed:             {r.seed}",
        f"J_true (uniform): {r.J_true:.6g}",
        f"fill distance:    {r.fill_distance:.6g}",
        f"region fraction:  {r.region_fraction:.6g}",
        f"runtime [s]:      {r.runtime_s:.3f}",
    ]


def run_design(cfg, out_dir, weighting=None, mode=None, variant="design",
               timing=False, plots=True):
    """Design one signal and write its artifacts into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    psi = reference_set(cfg, weighting)
    write_reference(cfg, out, psi)
    mode = mode or cfg.mode
    plant = cfg.make_plant() if mode == "active-learning" else None
    t0 = time.perf_counter()

    def progress(k, rec):
        if k % 50 == 0 or k == cfg.run.N:
            log.info("%s: k=%d J=%.5g", variant, k, rec.J_after)

    try:
        res = design_signal(cfg.run, cfg.constraints, cfg.surrogate, psi, cfg.sa,
                            mode, plant, cfg.metric, progress)
    except DesignError as e:
        if e.signal is not None:
            io.write_signal(out / "signal.csv", e.signal.samples)
        io.write_trace(out / "trace.csv", e.trace)
        _summary(out / "summary.txt", [
            "status: PARTIAL (design aborted; artifacts are incomplete)",
            f"reason: {e}", f"diagnostics: {e.diagnostics}",
        ])
        raise
    X = true_distribution(cfg, res.signal)
    runtime = time.perf_counter() - t0

    io.write_signal(out / "signal.csv", res.signal.samples)
    io.write_points(out / "surrogate_distribution.csv", res.distribution)
    io.write_points(out / "process_distribution.csv", X)
    io.write_trace(out / "trace.csv", res.trace)
    rep = report_for(cfg, X, variant, runtime)
    io.write_reports(out / "report.csv", [rep], timing)
    _summary(out / "summary.txt", ["status: OK", f"mode: {mode}",
                                   f"initial temperature: {res.temperature:.6g}",
                                   f"final theta: a={res.surrogate.a:.6g} b={res.surrogate.b:.6g}",
                                   *_report_lines(rep)])
    if plots:
        from .plotting import plot_run
        plot_run(out)
    return rep


def run_baseline(cfg, kind, out_dir, timing=False, plots=True):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_reference(cfg, out, reference_set(cfg))
    t0 = time.perf_counter()
    rng = seeded_rng(cfg.run.seed, _BASELINE_STREAM, BASELINES.index(kind))
    sig = generate_baseline(kind, cfg.constraints, cfg.run.N, rng, cfg.aprbs_hold)
    X = true_distribution(cfg, sig)
    rep = report_for(cfg, X, kind, time.perf_counter() - t0)
    io.write_signal(out / "signal.csv", sig.samples)
    io.write_points(out / "process_distribution.csv", X)
    io.write_reports(out / "report.csv", [rep], timing)
    _summary(out / "summary.txt", ["status: OK", *_report_lines(rep)])
    if plots:
        from .plotting import plot_run
        plot_run(out)
    return rep


def resolve_variant(name, cfg):
    """Map a variant token to ``(kind, weighting, mode)``; kind is 'rhc' or a baseline."""
    if name in BASELINES:
        return name, None, None
    if name == "uniform":
        return "rhc", cfg.weighting.uniform(), cfg.mode
    if name == "configured":
        return "rhc", cfg.weighting, cfg.mode
    if name in ("active-learning", "fixed-surrogate"):
        return "rhc", cfg.weighting, name
    if name.startswith("rho"):
        text = name[3:].lstrip("=")
        try:
            rho = float(text)
        except ValueError:
            raise ConfigError(f"bad variant {name!r}: expected rho=<number>") from None
        if not cfg.weighting.boosts:
            raise ConfigError(f"variant {name!r} needs boost rectangles in [weighting]")
        return "rhc", cfg.weighting.with_rho(rho), cfg.mode
    raise ConfigError(
        f"unknown variant {name!r}; use uniform, configured, rho=<x>, active-learning, "
        f"fixed-surrogate, {', '.join(BASELINES)}"
    )


def _slug(name):
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in name.replace("=", ""))


# -- commands ------------------------------------------------------------------

def cmd_design(args):
    cfg = _load(args)
    out = Path(cfg.output_dir)
    rep = run_design(cfg, out, timing=args.timing, plots=cfg.plots and not args.no_plots)
    log.info("design written to %s (J_true=%.5g, fill=%.4g)", out, rep.J_true, rep.fill_distance)
    return rep


def parse_plant_spec(spec, cfg):
    """``hammerstein``, ``lti`` or ``kind:key=value,...``; a .yaml path reads its [plant]."""
    if spec is None:
        return cfg.plant
    if spec.endswith((".yaml", ".yml")):
        return load_config(spec).plant
    kind, _, rest = spec.partition(":")
    kw = {"kind": kind.strip()}
    names = {"a": "a_p", "b": "b_p", "gain": "gain", "y0": "y0",
             "noise_std": "noise_std", "nonlinearity": "nonlinearity"}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq or key not in names:
            raise ConfigError(f"bad plant spec item {item!r} (keys: {', '.join(names)})")
        kw[names[key]] = val if key == "nonlinearity" else _to_float(val, item)
    PlantModel(**kw)
    return kw


def _to_float(text, where):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"bad number in {where!r}") from None


def parse_psi_spec(spec, cfg):
    if spec is None:
        return cfg.psi_resolution
    if spec.endswith((".yaml", ".yml")):
        return load_config(spec).psi_resolution
    try:
        res = tuple(int(s) for s in spec.lower().replace(",", "x").split("x"))
    except ValueError:
        raise ConfigError(f"bad psi spec {spec!r}; expected e.g. 15x15") from None
    return res


def cmd_evaluate(args):
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    _apply_globals(cfg, args)
    cfg.plant = parse_plant_spec(args.plant, cfg)
    cfg.psi_resolution = parse_psi_spec(args.psi, cfg)
    build_psi(cfg.constraints, cfg.psi_resolution, cfg.psi_cap)
    u = io.read_signal(args.signal)
    if not cfg.constraints.input_ok(u):
        bad = int(np.flatnonzero((u < cfg.constraints.u_min) | (u > cfg.constraints.u_max))[0])
        raise ConfigError(f"{args.signal}: row {bad + 2}: u={u[bad]} outside input box "
                          f"{cfg.constraints.input_box}")
    cfg.run = RunConfig(max(len(u), 1), 1, cfg.run.seed, cfg.run.normalization)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    X = true_distribution(cfg, u)
    rep = report_for(cfg, X, Path(args.signal).stem, time.perf_counter() - t0)
    io.write_signal(out / "signal.csv", u)
    write_reference(cfg, out, reference_set(cfg))
    io.write_points(out / "process_distribution.csv", X)
    io.write_reports(out / "report.csv", [rep], args.timing)
    lines = _report_lines(rep)
    _summary(out / "summary.txt", ["status: OK", f"plant: {cfg.plant}", *lines])
    if cfg.plots and not args.no_plots:
        from .plotting import plot_run
        plot_run(out, out / "evaluation.svg")
    if not args.quiet:
        print("\n".join(lines))
    return rep


def cmd_compare(args):
    cfg = _load(args)
    names = [s.strip() for s in args.variants.split(",")] if args.variants else list(cfg.variants)
    names = [n for n in names if n]
    if not names:
        raise ConfigError("no variants given")
    plan = [(n, resolve_variant(n, cfg)) for n in names]
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    plots = cfg.plots and not args.no_plots

    reports, dirs, labels, failures = [], [], [], []
    for name, (kind, weighting, mode) in plan:
        d = out / "variants" / _slug(name)
        log.info("variant %s", name)
        try:
            if kind == "rhc":
                rep = run_design(cfg, d, weighting, mode, name, args.timing, plots)
            else:
                rep = run_baseline(cfg, kind, d, args.timing, plots)
            rep.variant = name
            dirs.append(d)
            labels.append(name)
        except (DesignError, PlantDivergenceError) as e:
            log.warning("variant %s failed: %s", name, e)
            failures.append((name, str(e)))
            rep = None
        reports.append((name, rep))

    rows = []
    for name, rep in reports:
        if rep is None:
            rows.append((name, None, None, None, None, cfg.run.seed))
        else:
            rows.append((name, rep.J_true, rep.fill_distance, rep.region_fraction,
                         rep.runtime_s if args.timing else None, rep.seed))
    io.write_rows(out / "comparison.csv", io.REPORT_HEADER, rows)
    lines = [f"{'variant':<18}{'J_true':>12}{'fill':>10}{'region':>10}"]
    for name, rep in reports:
        if rep is None:
            lines.append(f"{name:<18}{'FAILED':>12}")
        else:
            lines.append(f"{name:<18}{rep.J_true:>12.5g}{rep.fill_distance:>10.4g}"
                         f"{rep.region_fraction:>10.4g}")
    lines += [f"failed: {n}: {msg}" for n, msg in failures]
    _summary(out / "summary.txt", lines)
    if plots and dirs:
        from .plotting import plot_compare
        plot_compare(dirs, labels, out / "compare.svg")
    if not args.quiet:
        print("\n".join(lines))
    if failures:
        raise _PartialFailure(f"{len(failures)} variant(s) failed")
    return [r for _, r in reports]


class _PartialFailure(Exception):
    pass


# -- argument handling ---------------------------------------------------------

def _apply_globals(cfg, args):
    if args.seed is not None:
        cfg.run = RunConfig(cfg.run.N, cfg.run.L, args.seed, cfg.run.normalization)
    if args.out_dir is not None:
        cfg.output_dir = args.out_dir


def _load(args):
    cfg = load_config(args.config)
    _apply_globals(cfg, args)
    return cfg


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="override the master seed")
    common.add_argument("--out-dir", default=argparse.SUPPRESS, help="output directory")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS,
                        help="only print warnings and errors")
    common.add_argument("--no-plots", action="store_true", default=argparse.SUPPRESS,
                        help="skip SVG output")
    common.add_argument("--timing", action="store_true", default=argparse.SUPPRESS,
                        help="write measured runtimes into CSVs (breaks byte-reproducibility)")

    p = argparse.ArgumentParser(
        prog="rhcexcite", parents=[common],
        description="Receding-horizon excitation signal design and evaluation.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("design", parents=[common], help="design a signal from a config")
    d.add_argument("config")
    d.set_defaults(func=cmd_design)

    e = sub.add_parser("evaluate", parents=[common], help="coverage report of a signal CSV")
    e.add_argument("signal")
    e.add_argument("--plant", help="plant spec, e.g. hammerstein:a=0.8,b=0.2,gain=3")
    e.add_argument("--psi", help="reference grid resolution, e.g. 15x15")
    e.add_argument("--config", help="config file supplying boxes, boosts and defaults")
    e.set_defaults(func=cmd_evaluate)

    c = sub.add_parser("compare", parents=[common], help="run several variants")
    c.add_argument("config")
    c.add_argument("--variants", help="comma list, e.g. uniform,rho=4,rho=16,uniform-random")
    c.set_defaults(func=cmd_compare)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    for name, default in (("seed", None), ("out_dir", None), ("quiet", False),
                          ("no_plots", False), ("timing", False)):
        if not hasattr(args, name):
            setattr(args, name, default)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except ConfigError as e:
        log.error("configuration error: %s", e)
        return EXIT_CONFIG
    except (DesignError, PlantDivergenceError, _PartialFailure) as e:
        log.error("design failed: %s", e)
        return EXIT_INFEASIBLE
    except (io.CsvParseError, OSError) as e:
        log.error("I/O error: %s", e)
        return EXIT_IO
    except Exception:
        log.exception("unexpected error")
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
