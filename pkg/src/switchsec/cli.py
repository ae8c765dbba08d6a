"""Command-line front end.

Subcommands: ``analyze`` (pairwise distinguishability report with rank
table, CSV and figures), ``simulate`` (attacked trace generation),
``estimate`` (brute-force mode identification from a trace), ``witness``
(construct and replay an equal-output attack for a pair), ``discretize``
(continuous-to-discrete model conversion).

Exit codes: 0 on success (analyze: all pairs securely distinguishable),
2 for a negative verdict (not distinguishable / ambiguous estimate),
1 on errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from .disting import BudgetError, pairwise_report, sigma_secure_autonomous
from .estimate import EstimationError, estimate_mode
from .exactla import EXACT, FLOAT, DimensionMismatch
from .model import ModelError, build_augmented, discretize, load_model, system_to_dict
from .simulate import gen_attack, read_trace, replay_witness, simulate, write_trace

DEFAULT_SEED = 0


def _add_common(parser):
    parser.add_argument("--model", required=True,
                        help="path to a model JSON file, or the name of a bundled "
                             "model (boost, demo_actuated)")
    parser.add_argument("--backend", choices=(EXACT, FLOAT),
                        default=os.environ.get("SWITCHSEC_BACKEND", None),
                        help="override the model's scalar backend "
                             "(env SWITCHSEC_BACKEND)")
    parser.add_argument("--sigma", type=int, default=None,
                        help="sensor attack budget override")
    parser.add_argument("--rho", type=int, default=None,
                        help="actuator attack budget override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="switchsec",
        description="secure mode distinguishability analysis for switching systems")
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="pairwise distinguishability report")
    _add_common(pa)
    pa.add_argument("--autonomous", action="store_true",
                    help="analyze the autonomous (input-free) reading of the model")
    pa.add_argument("--exhaustive", action="store_true",
                    help="enumerate every admissible support tuple, not just the frontier")
    pa.add_argument("--out", help="directory for report.json, rank_table.csv and figures")
    pa.add_argument("--seed", type=int, default=DEFAULT_SEED, help="recorded in the report")

    ps = sub.add_parser("simulate", help="generate an attacked trace (JSON lines)")
    _add_common(ps)
    ps.add_argument("--mode", required=True, help="id of the mode to simulate")
    ps.add_argument("--tau", type=int, default=None,
                    help="horizon (default 2n)")
    ps.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ps.add_argument("--magnitude", default="1000", help="attack magnitude bound")
    ps.add_argument("--x0", default="random",
                    help="comma-separated initial state, or 'random'/'zero'")
    ps.add_argument("--input", dest="input_kind", choices=("zero", "random"),
                    default="random", help="honest input sequence")
    ps.add_argument("--out", help="trace file (default stdout)")
    ps.add_argument("--plot", help="optional output figure of the sensor readings")

    pe = sub.add_parser("estimate", help="identify the active mode from a trace")
    _add_common(pe)
    pe.add_argument("--trace", required=True, help="trace JSON-lines file")
    pe.add_argument("--tol", type=float, default=None,
                    help="relative residual tolerance (float backend)")

    pw = sub.add_parser("witness", help="construct and verify an equal-output attack")
    _add_common(pw)
    pw.add_argument("--pair", nargs=2, required=True, metavar=("I", "J"),
                    help="mode ids of the pair")
    pw.add_argument("--exhaustive", action="store_true")
    pw.add_argument("--out", help="directory for the witness traces and figure")

    pd = sub.add_parser("discretize", help="discretize a continuous-time model")
    pd.add_argument("--model", required=True)
    pd.add_argument("--h", required=True, help="sampling step (number or fraction)")
    pd.add_argument("--method", choices=("euler", "zoh"), default="euler")
    pd.add_argument("--out", help="write the discretized model JSON here")
    return parser


def _resolve_model_path(name: str):
    if not Path(name).exists():
        from .model import bundled_model_path

        bundled = bundled_model_path(name)
        if bundled.exists():
            return bundled
    return name


def _load(args, *, need_discrete=True):
    sys_model = load_model(_resolve_model_path(args.model),
                           discretize_continuous=need_discrete)
    backend = getattr(args, "backend", None)
    if backend:
        sys_model = sys_model.to_backend(backend)
    return sys_model


def _budgets(args, sys_model):
    sigma = sys_model.sigma if args.sigma is None else args.sigma
    rho = sys_model.rho if args.rho is None else args.rho
    return sigma, rho


def cmd_analyze(args) -> int:
    from . import report as reportmod

    sys_model = _load(args)
    sigma, rho = _budgets(args, sys_model)
    rep = pairwise_report(sys_model, sigma=sigma, rho=rho,
                          autonomous=args.autonomous or None,
                          exhaustive=args.exhaustive)
    print(reportmod.format_text(rep, sys_model, seed=args.seed))
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        rep_dict = reportmod.report_to_dict(
            rep, sys_model, backend=sys_model.backend, seed=args.seed,
            model_path=str(args.model))
        reportmod.save_report(rep_dict, outdir / "report.json")
        reportmod.write_rank_csv(rep, outdir / "rank_table.csv")
        reportmod.render_rank_figure(rep, sys_model, outdir / "rank_table.png")
        reportmod.render_verdict_figure(rep, outdir / "verdicts.png")
        print(f"\nwrote {outdir / 'report.json'}, rank_table.csv and figures")
    return 0 if rep.reconstructable else 2


def _parse_x0(raw: str, n: int, backend: str, rng_seed: int):
    import random

    if raw == "zero":
        return [0] * n
    if raw == "random":
        rng = random.Random(rng_seed ^ 0x5EED)
        return [Fraction(rng.randint(-10, 10)) for _ in range(n)]
    return [Fraction(tok.replace("−", "-")) for tok in raw.split(",")]


def cmd_simulate(args) -> int:
    import random

    sys_model = _load(args)
    sigma, rho = _budgets(args, sys_model)
    mode = sys_model.mode(args.mode)
    tau = args.tau if args.tau else 2 * sys_model.n
    attack = gen_attack(sys_model.p, sys_model.m, sigma, rho, tau,
                        magnitude=Fraction(args.magnitude), seed=args.seed,
                        backend=sys_model.backend)
    x0 = _parse_x0(args.x0, sys_model.n, sys_model.backend, args.seed)
    if args.input_kind == "random" and sys_model.m:
        rng = random.Random(args.seed ^ 0x1217)
        u = [[Fraction(rng.randint(-10, 10)) for _ in range(sys_model.m)]
             for _ in range(tau)]
    else:
        u = None
    trace = simulate(mode, x0, u, attack, tau)
    if args.out:
        write_trace(trace, args.out)
        print(f"wrote {args.out} ({tau} samples, sensor support "
              f"{set(attack.sensor_support) or '{}'}, seed {args.seed})")
    else:
        from .simulate import _vals_to_json

        for t in range(tau):
            print(json.dumps({"t": t, "x": _vals_to_json(trace.x[t]),
                              "u": _vals_to_json(trace.u[t]),
                              "y": _vals_to_json(trace.y[t]),
                              "w": _vals_to_json(trace.w[t]),
                              "v": _vals_to_json(trace.v[t])}))
    if args.plot:
        from . import report as reportmod

        reportmod.render_trace_figure([trace], args.plot)
    return 0


def cmd_estimate(args) -> int:
    sys_model = _load(args)
    sigma, rho = _budgets(args, sys_model)
    data = read_trace(args.trace)
    to_scalar = (lambda row: row) if sys_model.backend == EXACT \
        else (lambda row: tuple(float(x) for x in row))
    Y = [to_scalar(row) for row in data["y"]]
    U = [to_scalar(row) for row in data["u"]]
    try:
        result = estimate_mode(sys_model, Y, U, sigma, rho, tol=args.tol)
    except EstimationError as exc:
        print(json.dumps({"unique": False, "mode": None, "error": str(exc)}))
        return 1
    payload = {
        "unique": result.unique,
        "mode": result.mode,
        "consistent": [
            {"mode": r.mode, "consistent": r.consistent,
             "support": {"gamma": list(r.best_support[0]),
                         "delta": list(r.best_support[1])} if r.best_support else None,
             "caveat": r.caveat}
            for r in result.results
        ],
    }
    print(json.dumps(payload, indent=2))
    return 0 if result.unique else 2


def cmd_witness(args) -> int:
    sys_model = _load(args)
    sigma, _ = _budgets(args, sys_model)
    Si = sys_model.mode(args.pair[0])
    Sj = sys_model.mode(args.pair[1])
    verdict = sigma_secure_autonomous(Si, Sj, sigma, exhaustive=args.exhaustive)
    if verdict.result:
        print(f"pair ({Si.id},{Sj.id}) is securely distinguishable at sigma={sigma}; "
              "no equal-output witness exists")
        return 2
    witness = verdict.witness
    pair = build_augmented(Si, Sj)
    trace_i, trace_j = replay_witness(pair, witness)
    if sys_model.backend == EXACT:
        equal = trace_i.y == trace_j.y
    else:
        gap = max((abs(a - b) for ra, rb in zip(trace_i.y, trace_j.y)
                   for a, b in zip(ra, rb)), default=0.0)
        scale = max((abs(v) for row in trace_i.y for v in row), default=1.0)
        equal = gap <= 1e-9 * max(1.0, scale)
    print(f"failing sensor support: {set(verdict.failing_pattern.gamma) or '{}'}")
    print(f"attacked sensors: mode {Si.id} -> {set(witness.gamma_i) or '{}'}, "
          f"mode {Sj.id} -> {set(witness.gamma_j) or '{}'}")
    print(f"replayed outputs identical: {equal}")
    if args.out:
        from . import report as reportmod

        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        write_trace(trace_i, outdir / f"witness_mode_{Si.id}.jsonl")
        write_trace(trace_j, outdir / f"witness_mode_{Sj.id}.jsonl")
        summary = {
            "pair": [str(Si.id), str(Sj.id)],
            "sigma": sigma,
            "gamma": list(verdict.failing_pattern.gamma),
            "witness": reportmod._witness_to_dict(witness),
            "outputs_identical": equal,
        }
        (outdir / "witness.json").write_text(json.dumps(summary, indent=2) + "\n")
        reportmod.render_trace_figure(
            [trace_i, trace_j], outdir / "witness_outputs.png",
            labels=[f"mode {Si.id}", f"mode {Sj.id}"])
        print(f"wrote witness traces and figure to {outdir}")
    if not equal:
        print("error: witness replay did not reproduce equal outputs", file=sys.stderr)
        return 1
    return 0


def cmd_discretize(args) -> int:
    from .model import LinearMode, SwitchingSystem

    sys_model = load_model(_resolve_model_path(args.model), discretize_continuous=False)
    modes = []
    for mode in sys_model.modes:
        Ad, Bd = discretize(mode.A, mode.B, args.h, args.method)
        modes.append(LinearMode(mode.id, Ad, Bd, mode.C))
        print(f"mode {mode.id}:")
        for i in range(Ad.rows):
            a_row = "  ".join(str(x) for x in Ad.row(i))
            b_row = "  ".join(str(x) for x in Bd.row(i)) if Bd.cols else "(no inputs)"
            print(f"  A| {a_row:<30}  B| {b_row}")
    discrete = SwitchingSystem(tuple(modes), sys_model.sigma, sys_model.rho,
                               sys_model.dwell, sys_model.name, sys_model.note)
    if args.out:
        Path(args.out).write_text(json.dumps(system_to_dict(discrete), indent=2) + "\n")
        print(f"wrote {args.out}")
    return 0


_COMMANDS = {
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "witness": cmd_witness,
    "discretize": cmd_discretize,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ModelError, BudgetError, DimensionMismatch, EstimationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
