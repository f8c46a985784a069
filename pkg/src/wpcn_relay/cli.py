"""Command line front end.

Subcommands: simulate, analyze, sweep, compare, validate.  Exit codes:
0 success, 1 a validation check failed, 2 bad configuration or file IO.
Power flags take dBW (10 dBW = 10 W).
"""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .core import (ConfigError, ConfigValidationError, Policy, SystemConfig,
                   config_from_mapping, parse_config_text)
from .harness import (ANALYTICS_CSV_HEADER, SIM_CSV_HEADER, SWEEP_AXES,
                      FixtureError, SweepSpec, analytics_rows, metadata_lines,
                      run_compare, run_sweep, simulate_point, validate_checks)
from .simulator import SimulationInvariantError, run

_POLICY_NAMES = tuple(p.value for p in Policy)


def _add_config_flags(sub: argparse.ArgumentParser) -> None:
    g = sub.add_argument_group("system configuration",
                               "defaults < --config file < explicit flags")
    g.add_argument("--config", metavar="FILE", help="config file (key = value lines)")
    g.add_argument("--policy", choices=_POLICY_NAMES)
    g.add_argument("--n-relays", "--N", dest="n_relays", type=int, metavar="N")
    g.add_argument("--m-decode", "--M", dest="m_decode", type=int, metavar="M")
    g.add_argument("--eta", type=float)
    g.add_argument("--p-source-dbw", "--Ps", dest="p_source_dbw", type=float,
                   metavar="DBW")
    g.add_argument("--p-relay-dbw", "--Pr", dest="p_relay_dbw", type=float,
                   metavar="DBW")
    g.add_argument("--rate-target", "--R", dest="rate_target", type=float,
                   metavar="R")
    g.add_argument("--noise-var", "--sigma2", dest="noise_var", type=float)
    g.add_argument("--lambda-rate", dest="lambda_rate", type=float)
    g.add_argument("--slot-duration", "--T", dest="slot_duration", type=float)
    g.add_argument("--horizon-slots", "--slots", dest="horizon_slots", type=int)
    g.add_argument("--warmup-slots", "--warmup", dest="warmup_slots", type=int)
    g.add_argument("--rng-seed", "--seed", dest="rng_seed", type=int)
    g.add_argument("--path-loss-d-si", dest="path_loss_d_si", type=float)
    g.add_argument("--path-loss-d-id", dest="path_loss_d_id", type=float)
    g.add_argument("--path-loss-alpha", dest="path_loss_alpha", type=float)


_FLAG_KEYS = ("policy", "n_relays", "m_decode", "eta", "p_source_dbw",
              "p_relay_dbw", "rate_target", "noise_var", "lambda_rate",
              "slot_duration", "horizon_slots", "warmup_slots", "rng_seed",
              "path_loss_d_si", "path_loss_d_id", "path_loss_alpha")


def _build_config(args, require_policy: bool = True) -> SystemConfig:
    raw: dict = {}
    if args.config is not None:
        with open(args.config, "r", encoding="utf-8") as fh:
            raw = parse_config_text(fh.read())
    for key in _FLAG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            raw[key] = value
    if "policy" not in raw:
        if not require_policy:
            raw["policy"] = Policy.SRS_NCSI
        else:
            raise ConfigValidationError("policy is required (--policy or config file)")
    return config_from_mapping(raw)


def _floats(text: str):
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise ConfigValidationError(f"bad numeric list: {text!r}") from exc


def _ints(text: str):
    vals = _floats(text)
    if any(v != int(v) for v in vals):
        raise ConfigValidationError(f"expected integers: {text!r}")
    return tuple(int(v) for v in vals)


def _write_lines(path, lines) -> None:
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _cmd_simulate(args) -> int:
    config = _build_config(args)
    if args.trace is not None:
        sink: list = []
        stats = run(config, trace_sink=sink)
        trace_lines = ["slot,stage,relay,members,power_w,outcome,cause"]
        for ev in sink:
            members = "|".join(str(m) for m in ev.members)
            trace_lines.append(f"{ev.slot},{ev.stage},{ev.relay},{members},"
                               f"{ev.power_w!r},{ev.outcome},{ev.cause}")
        _write_lines(args.trace, trace_lines)
        from .harness import row_from_stats
        row = row_from_stats(config, stats, config.rng_seed)
    else:
        row, _ = simulate_point(config)
    lines = metadata_lines(config.rng_seed) + [SIM_CSV_HEADER, row.to_csv()]
    _write_lines(args.out, lines)
    return 0


def _cmd_analyze(args) -> int:
    rows = analytics_rows(args.quantity, _ints(args.k), _ints(args.n),
                          _floats(args.r), lambda_rate=args.lambda_rate,
                          eta=args.eta, ps_dbw=args.p_source_dbw,
                          pr_dbw=args.p_relay_dbw, sigma2=args.noise_var,
                          route=args.route)
    lines = [f"# wpcn-relay {__version__}", ANALYTICS_CSV_HEADER] + rows
    _write_lines(args.out, lines)
    return 0


def _cmd_sweep(args) -> int:
    base = _build_config(args)
    values = _ints(args.values) if args.axis in ("N", "M") else _floats(args.values)
    spec = SweepSpec(axis=args.axis, values=values, base=base,
                     repetitions=args.reps)
    rows, summary = run_sweep(spec)
    lines = metadata_lines(base.rng_seed) + [SIM_CSV_HEADER]
    lines += [r.to_csv() for r in rows]
    if "m_star" in summary:
        lines.append(f"# m_star = {summary['m_star']}")
        lines.append(f"# m_star_rate_target = {summary['m_star_rate_target']!r}")
        lines.append("# m_star_separated_from_adjacent = "
                     f"{summary['m_star_separated_from_adjacent']}")
        print(f"best M = {summary['m_star']} at rate target "
              f"{summary['m_star_rate_target']}", file=sys.stderr)
    _write_lines(args.out, lines)
    return 0


def _cmd_compare(args) -> int:
    names = [tok.strip() for tok in args.policies.split(",") if tok.strip()]
    try:
        policies = [Policy(name) for name in names]
    except ValueError as exc:
        raise ConfigValidationError(f"unknown policy in --policies: {exc}") from exc
    if len(set(policies)) != len(policies):
        raise ConfigValidationError("duplicate policy in --policies")
    base = _build_config(args, require_policy=False)
    rows, _, verdicts = run_compare(policies, base, _floats(args.r), args.reps)
    lines = metadata_lines(base.rng_seed) + [SIM_CSV_HEADER]
    lines += [r.to_csv() for r in rows]
    lines += [f"# verdict: {v}" for v in verdicts]
    for v in verdicts:
        print(v, file=sys.stderr)
    _write_lines(args.out, lines)
    return 0


def _cmd_validate(args) -> int:
    report = validate_checks(mc_samples=args.samples, sim_slots=args.sim_slots,
                             tolerance_scale=args.tolerance_scale,
                             seed=args.seed)
    for check in report["checks"]:
        mark = "ok  " if check["ok"] else "FAIL"
        print(f"{mark} {check['name']}: {check['detail']}")
    print("validation " + ("passed" if report["ok"] else "failed"))
    if args.report is not None:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=1)
            fh.write("\n")
    return 0 if report["ok"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wpcn-relay",
        description="Relay-selection simulator and outage analytics for "
                    "wireless-powered cooperative networks.")
    parser.add_argument("--version", action="version",
                        version=f"wpcn-relay {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("simulate", help="run one simulation, emit a CSV row")
    _add_config_flags(p)
    p.add_argument("--out", metavar="FILE", help="CSV destination (default stdout)")
    p.add_argument("--trace", metavar="FILE",
                   help="also dump per-slot decisions to FILE")
    p.set_defaults(func=_cmd_simulate)

    p = subs.add_parser("analyze", help="evaluate closed-form quantities on a grid")
    p.add_argument("--quantity", required=True,
                   choices=("selection-probability", "outage-fixed-power",
                            "outage-allocated-power", "forward-feasibility",
                            "outage-grid-powered"))
    p.add_argument("--k", required=True, metavar="LIST",
                   help="relay counts, comma separated")
    p.add_argument("--n", default="0", metavar="LIST",
                   help="reserved-decoder counts (default 0)")
    p.add_argument("--r", "--R", dest="r", default="1.0", metavar="LIST",
                   help="rate targets (default 1.0)")
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--p-source-dbw", "--Ps", dest="p_source_dbw", type=float,
                   default=10.0)
    p.add_argument("--p-relay-dbw", "--Pr", dest="p_relay_dbw", type=float,
                   default=10.0)
    p.add_argument("--noise-var", "--sigma2", dest="noise_var", type=float,
                   default=1.0)
    p.add_argument("--lambda-rate", dest="lambda_rate", type=float, default=1.0)
    p.add_argument("--route", choices=("quadrature", "bessel"),
                   default="quadrature")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=_cmd_analyze)

    p = subs.add_parser("sweep", help="sweep one axis with repetitions")
    _add_config_flags(p)
    p.add_argument("--axis", required=True, choices=SWEEP_AXES)
    p.add_argument("--values", required=True, metavar="LIST")
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=_cmd_sweep)

    p = subs.add_parser("compare", help="rank policies at each rate target")
    _add_config_flags(p)
    p.add_argument("--policies", required=True, metavar="LIST",
                   help="comma-separated policy names")
    p.add_argument("--r", "--R-values", dest="r", default="1.0", metavar="LIST",
                   help="rate targets (default 1.0)")
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=_cmd_compare)

    p = subs.add_parser("validate", help="cross-validation suite")
    p.add_argument("--samples", type=int, default=200_000,
                   help="Monte Carlo sample count per check")
    p.add_argument("--sim-slots", type=int, default=200_000)
    p.add_argument("--tolerance-scale", type=float, default=1.0,
                   help="multiply every tolerance (0.01 demonstrates failure)")
    p.add_argument("--seed", type=int, default=1234)
    p.add_argument("--report", metavar="FILE", help="write JSON report")
    p.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError, FixtureError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SimulationInvariantError as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
