"""Command-line entry point ``fnnbench``.

Exit codes: 0 success, 1 verdict or assertion failure, 2 usage or
configuration error.

Without ``--format`` each command prints a human-readable summary. With
``--format csv|json`` and no ``--out``, the machine-readable table goes to
stdout instead. With ``--out DIR`` the tables are written there (CSV unless
``--format json``) together with ``run_report.json``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .born import compute_distribution
from .config import ConfigError, WorkbenchConfig, load_config
from .inflation import inflation_identities
from .models import ModelError, model_from_dict, model_to_dict, random_model, validate_model
from .seesaw import maximize_witness, witness_of
from .spacetime import SpacetimeConfigError, audit_all
from .stats import EmptyContextError, estimate_witnesses, sample_counts
from .witness import BOUND, angle_grid, evaluate_scenario

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
SOUNDNESS_TOL = 1e-7
IDENTITY_TOL = 1e-12
DECOMPOSITION_TOL = 1e-10

SWEEP_COLUMNS = ("alpha1", "alpha2", "r_cns", "r_nsc", "violated_cns", "violated_nsc", "fnn_certified")
THEORY_COLUMNS = ("v1", "v2", "v_h", "alpha1", "alpha2") + SWEEP_COLUMNS[2:]
COUNT_COLUMNS = ("x", "z", "a", "b", "c", "count")
AUDIT_COLUMNS = ("event1", "event2", "d_m", "sigma_d_m", "dt_ns", "sigma_dt_ns",
                 "ds2_m2", "sigma_ds2_m2", "spacelike")


@dataclass
class RunReport:
    command: str
    config_hash: str
    outputs: list = field(default_factory=list)
    wall_time: float = 0.0
    exit_code: int = 0


# ---------------------------------------------------------------- formatting

def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.8e}"
    return str(v)


def to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row[c]) for c in columns])
    return buf.getvalue()


def _plain(v):
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


def to_json(obj) -> str:
    return json.dumps(_plain(obj), indent=2) + "\n"


class Output:
    """Collects named tables/reports and routes them to stdout or files."""

    def __init__(self, args, report: RunReport):
        self.fmt = args.format
        self.out = Path(args.out) if args.out else None
        self.report = report
        self.machine_stdout = self.fmt is not None and self.out is None
        if self.out:
            self.out.mkdir(parents=True, exist_ok=True)

    def table(self, name, columns, rows):
        text = to_json(rows) if self.fmt == "json" else to_csv(columns, rows)
        self._emit(f"{name}.{'json' if self.fmt == 'json' else 'csv'}", text)

    def document(self, name, obj):
        self._emit(f"{name}.json", to_json(obj))

    def _emit(self, filename, text):
        if self.out:
            path = self.out / filename
            path.write_text(text, encoding="utf-8")
            self.report.outputs.append(str(path))
        elif self.machine_stdout:
            sys.stdout.write(text)

    def say(self, text=""):
        if not self.machine_stdout:
            print(text)


# ------------------------------------------------------------------ commands

def _report_row(rep, **extra):
    return {**extra, "r_cns": rep.r_cns, "r_nsc": rep.r_nsc, "violated_cns": rep.violated_cns,
            "violated_nsc": rep.violated_nsc, "fnn_certified": rep.fnn_certified}


def cmd_theory(cfg: WorkbenchConfig, args, out: Output) -> int:
    s = cfg.scenario
    rep = evaluate_scenario(s.to_scenario())
    row = _report_row(rep, v1=s.v1, v2=s.v2, v_h=s.v_h, alpha1=s.alpha1, alpha2=s.alpha2)
    out.say(f"R_C-NS = {rep.r_cns:.6f}  ({'violated' if rep.violated_cns else 'not violated'})")
    out.say(f"R_NS-C = {rep.r_nsc:.6f}  ({'violated' if rep.violated_nsc else 'not violated'})")
    out.say(f"fnn = {fmt(rep.fnn_certified)}")
    out.table("theory", THEORY_COLUMNS, [row])
    return EXIT_OK


def cmd_sweep(cfg: WorkbenchConfig, args, out: Output) -> int:
    sw = cfg.sweep
    try:
        grid = angle_grid(sw.start, sw.stop, sw.steps)
    except ValueError as exc:
        raise ConfigError(f"sweep: {exc}") from exc
    rows = []
    for a in grid:
        scen = cfg.scenario.to_scenario(**{sw.vary: a})
        rep = evaluate_scenario(scen)
        rows.append(_report_row(rep, alpha1=scen.source1.alpha, alpha2=scen.source2.alpha))
    out.say(f"{'alpha1/pi':>10} {'alpha2/pi':>10} {'R_C-NS':>10} {'R_NS-C':>10}  fnn")
    for r in rows:
        out.say(f"{r['alpha1'] / math.pi:10.4f} {r['alpha2'] / math.pi:10.4f} "
                f"{r['r_cns']:10.6f} {r['r_nsc']:10.6f}  {fmt(r['fnn_certified'])}")
    out.say(f"{sum(r['fnn_certified'] for r in rows)} of {len(rows)} points violate both bounds")
    out.table("sweep", SWEEP_COLUMNS, rows)
    return EXIT_OK


def _empty_context_risk(total: int) -> float:
    # union bound on P(some of the 4 equiprobable input pairs gets no events)
    return min(1.0, 4 * 0.75 ** total)


def cmd_sample(cfg: WorkbenchConfig, args, out: Output) -> int:
    st = cfg.statistics
    warnings = []
    risk = _empty_context_risk(st.total)
    if risk > 1e-6:
        msg = f"total={st.total} is small: empty input contexts possible (probability <= {risk:.3g})"
        print(f"warning: {msg}", file=sys.stderr)
        warnings.append(msg)
    d = compute_distribution(cfg.scenario.to_scenario())
    counts = sample_counts(d, st.total, st.seed)
    rows = [
        {"x": x, "z": z, "a": a, "b": b, "c": c, "count": int(counts.n[x, z, a, b, c])}
        for x, z, a, b, c in np.ndindex(counts.n.shape)
    ]
    out.table("counts", COUNT_COLUMNS, rows)
    try:
        est = estimate_witnesses(counts, st.bootstrap_resamples, st.seed)
    except EmptyContextError as exc:
        print(f"error: {exc}", file=sys.stderr)
        out.document("estimate", {"error": str(exc), "total": st.total, "seed": st.seed,
                                  "warnings": warnings})
        return EXIT_FAIL
    doc = {**est.to_dict(), "seed": st.seed, "warnings": warnings}
    out.say(f"R_C-NS = {est.r_cns_hat:.4f} +- {est.se_cns:.4f}  ({est.sigma_cns:.2f} sigma above {BOUND:g})")
    out.say(f"R_NS-C = {est.r_nsc_hat:.4f} +- {est.se_nsc:.4f}  ({est.sigma_nsc:.2f} sigma above {BOUND:g})")
    out.say(f"events = {est.total}, bootstrap resamples = {est.resamples}, seed = {st.seed}")
    out.document("estimate", doc)
    return EXIT_OK


def _batch_models(op, kind: str, count: int):
    return [random_model(op.n_lambda, [op.seed, i], kind) for i in range(count)]


def cmd_verify_bound(cfg: WorkbenchConfig, args, out: Output) -> int:
    op = cfg.optimization
    if args.random_models is not None:
        if args.random_models < 0:
            raise ConfigError("optimization.random_models must be >= 0")
        op = replace(op, random_models=args.random_models)
    doc = {"bound": BOUND, "tolerance": SOUNDNESS_TOL}
    worst = -math.inf
    for kind in ("cns", "nsc"):
        res = maximize_witness(kind, op.n_lambda, op.restarts, op.iters, op.seed)
        rand = [witness_of(m) for m in _batch_models(op, kind, op.random_models)]
        best = max([res.value] + rand)
        worst = max(worst, best)
        doc[kind] = {
            "seesaw_max": res.value,
            "seesaw_converged": res.converged,
            "restart_values": res.restart_values,
            "random_models": len(rand),
            "random_max": max(rand) if rand else None,
            "max": best,
            "model": model_to_dict(res.model),
        }
        out.say(f"{kind}: seesaw max = {res.value:.12f} over {op.restarts} restarts; "
                f"random max = {max(rand) if rand else float('nan'):.6f} over {len(rand)} models")
    if args.model:
        try:
            m = model_from_dict(json.loads(Path(args.model).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError, ModelError) as exc:
            raise ConfigError(f"--model: {exc}") from exc
        check = validate_model(m)
        if not check.passed:
            raise ConfigError(f"--model: invalid model ({', '.join(check.failed)})")
        val = witness_of(m)
        worst = max(worst, val)
        doc["fixture"] = {"path": str(args.model), "kind": m.kind, "value": val}
        out.say(f"fixture {args.model}: {m.kind} witness = {val!r}")
    passed = worst <= BOUND + SOUNDNESS_TOL
    doc["passed"] = passed
    out.say(f"bound {'holds' if passed else 'EXCEEDED'}: largest value {worst!r}")
    out.document("verify_bound", doc)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_inflate_check(cfg: WorkbenchConfig, args, out: Output) -> int:
    op = cfg.optimization
    if args.models < 1:
        raise ConfigError("--models must be >= 1")
    rows = []
    for kind in ("cns", "nsc"):
        for i, m in enumerate(_batch_models(op, kind, args.models)):
            r = inflation_identities(m)
            rows.append({
                "kind": kind, "model": i,
                "identity_residual": r.copy_identity_residual,
                "factorization_residual": r.factorization_residual,
                "decomposition_residual": r.decomposition_residual,
                "bound_excess": r.bound_excess,
                "witness": r.witness,
            })
    cols = tuple(rows[0])
    summary = {}
    ok = True
    for kind in ("cns", "nsc"):
        sub = [r for r in rows if r["kind"] == kind]
        s = {k: max(r[k] for r in sub) for k in cols[2:]}
        s["models"] = len(sub)
        s["passed"] = (s["identity_residual"] <= IDENTITY_TOL
                       and s["factorization_residual"] <= IDENTITY_TOL
                       and s["decomposition_residual"] <= DECOMPOSITION_TOL
                       and s["bound_excess"] <= DECOMPOSITION_TOL
                       and s["witness"] <= BOUND + SOUNDNESS_TOL)
        ok &= s["passed"]
        summary[kind] = s
        out.say(f"{kind}: {len(sub)} models, identity {s['identity_residual']:.2e}, "
                f"factorization {s['factorization_residual']:.2e}, "
                f"decomposition {s['decomposition_residual']:.2e}, "
                f"per-outcome excess {s['bound_excess']:.2e}, max witness {s['witness']:.6f}")
    summary["passed"] = ok
    out.say("inflation checks " + ("passed" if ok else "FAILED"))
    out.table("inflation", cols, rows)
    out.document("inflation_summary", summary)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_spacetime(cfg: WorkbenchConfig, args, out: Output) -> int:
    sp = cfg.spacetime
    delays = sp.delay_table()
    for spec in args.shift_delay or []:
        name, _, amount = spec.partition("=")
        try:
            delays = delays.with_delay(name, float(amount))
        except (ValueError, SpacetimeConfigError) as exc:
            raise ConfigError(f"--shift-delay {spec!r}: {exc}") from exc
    try:
        rep = audit_all(sp.geometry(), delays, sp.pairs, sp.layout(),
                        sp.fiber_speed, sp.light_speed, sp.k_sigma)
    except SpacetimeConfigError as exc:
        raise ConfigError(f"spacetime: {exc}") from exc
    rows = [{
        "event1": r.pair[0], "event2": r.pair[1], "d_m": r.distance, "sigma_d_m": r.sigma_distance,
        "dt_ns": r.dt, "sigma_dt_ns": r.sigma_dt, "ds2_m2": r.ds2, "sigma_ds2_m2": r.sigma_ds2,
        "spacelike": r.margin(sp.k_sigma) > 0,
    } for r in rep.results]
    out.say(f"{'pair':<18} {'d (m)':>8} {'dt (ns)':>16} {'ds2 (m^2)':>20}  spacelike")
    for r in rep.results:
        out.say(f"{r.pair[0] + '-' + r.pair[1]:<18} {r.distance:8.1f} "
                f"{r.dt:8.2f} +- {r.sigma_dt:5.2f} {r.ds2:11.0f} +- {r.sigma_ds2:5.0f}  "
                f"{fmt(r.margin(sp.k_sigma) > 0)}")
    out.say(f"verdict (k = {sp.k_sigma:g}): "
            + ("all pairs space-like" if rep.verdict else "NOT all pairs space-like"))
    out.table("spacetime", AUDIT_COLUMNS, rows)
    return EXIT_OK if rep.verdict else EXIT_FAIL


COMMANDS = {
    "theory": cmd_theory,
    "sweep": cmd_sweep,
    "sample": cmd_sample,
    "verify-bound": cmd_verify_bound,
    "inflate-check": cmd_inflate_check,
    "spacetime": cmd_spacetime,
}


# ------------------------------------------------------------------- parsing

def _global_options(p: argparse.ArgumentParser, default):
    p.add_argument("--config", metavar="PATH", default=default, help="JSON configuration file")
    p.add_argument("--seed", type=int, default=default, help="override statistics and optimization seeds")
    p.add_argument("--out", metavar="DIR", default=default, help="write tables and run_report.json here")
    p.add_argument("--format", choices=("csv", "json"), default=default, help="machine-readable output format")
    p.add_argument("-v", "--verbose", action="store_true", default=default or False)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fnnbench", description=__doc__.splitlines()[0])
    _global_options(parser, None)
    # flags repeated after the subcommand without clobbering ones given before it
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("theory", parents=[common], help="witness values for the configured scenario")
    for name in ("v1", "v2", "v_h"):
        p.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float)
    p.add_argument("--alpha1")
    p.add_argument("--alpha2")

    p = sub.add_parser("sweep", parents=[common], help="theory curve over one source angle")
    p.add_argument("--vary", choices=("alpha1", "alpha2"))
    p.add_argument("--start")
    p.add_argument("--stop")
    p.add_argument("--steps", type=int)

    p = sub.add_parser("sample", parents=[common], help="simulate counts and bootstrap the witnesses")
    p.add_argument("--total", type=int)
    p.add_argument("--resamples", type=int)

    p = sub.add_parser("verify-bound", parents=[common], help="search hybrid models for values above 3")
    p.add_argument("--restarts", type=int)
    p.add_argument("--random-models", type=int)
    p.add_argument("--model", metavar="PATH", help="also evaluate a model fixture (JSON)")

    p = sub.add_parser("inflate-check", parents=[common], help="inflation identities on random models")
    p.add_argument("--models", type=int, default=100)

    p = sub.add_parser("spacetime", parents=[common], help="space-like separation audit")
    p.add_argument("--shift-delay", action="append", metavar="NAME=NS",
                   help="add NS nanoseconds to a named delay (repeatable)")
    p.add_argument("--k-sigma", type=float)
    return parser


def _apply_overrides(cfg: WorkbenchConfig, args) -> WorkbenchConfig:
    from .config import parse_config

    raw = cfg.to_dict()
    if args.seed is not None:
        raw["statistics"]["seed"] = args.seed
        raw["optimization"]["seed"] = args.seed
    blocks = {
        "scenario": ("v1", "v2", "v_h", "alpha1", "alpha2"),
        "sweep": ("vary", "start", "stop", "steps"),
        "statistics": ("total",),
        "optimization": ("restarts",),
        "spacetime": ("k_sigma",),
    }
    for block, keys in blocks.items():
        for key in keys:
            val = getattr(args, key, None)
            if val is not None:
                raw[block][key] = val
    if getattr(args, "resamples", None) is not None:
        raw["statistics"]["bootstrap_resamples"] = args.resamples
    return parse_config(raw)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    start = time.perf_counter()
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        report = RunReport(args.command, cfg.digest())
        out = Output(args, report)
        code = COMMANDS[args.command](cfg, args, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report.wall_time = time.perf_counter() - start
    report.exit_code = code
    if out.out:
        path = out.out / "run_report.json"
        report.outputs.append(str(path))
        path.write_text(to_json(asdict(report)), encoding="utf-8")
    return code


if __name__ == "__main__":
    sys.exit(main())
