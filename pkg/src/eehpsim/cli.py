"""Command-line front end.

Subcommands: ``sweep`` and ``planning`` execute a JSON config and write CSV
plus a JSON run manifest; ``cnas`` / ``ueno`` evaluate the closed-form
planners from flags; ``selftest`` runs a quick invariant battery.

Exit codes: 0 success, 1 validation error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

import numpy as np

from . import __version__
from .channel import most_square_geometry, sample_mmwave_channel
from .eehp import eehp_a
from .harness import (
    ConfigError,
    load_config,
    run_planning,
    run_sweep,
    write_manifest,
    write_planning_csv,
    write_result_csv,
)
from .mrfc import eehp_mrfc
from .params import SystemParams
from .planning import PlanningParams, cnas, g_function, ueno


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage errors exit with code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(1)


def _add_run_flags(sub):
    sub.add_argument("--config", required=True, help="JSON sweep config")
    sub.add_argument("--seed", type=int, default=None, help="override master seed")
    sub.add_argument("--out", default=None, help="override output CSV path")
    sub.add_argument("--trials", type=int, default=None, help="override trial count")


def _add_planning_flags(sub):
    sub.add_argument("--n-tx", type=int, default=200)
    sub.add_argument("--p-out-w", type=float, default=PlanningParams().p_out_w)
    sub.add_argument("--p-bb-w", type=float, default=0.0)
    sub.add_argument("--p-c-prime-w", type=float, default=20.0)
    sub.add_argument("--alpha", type=float, default=0.38)
    sub.add_argument("--p-rf-w", type=float, default=0.048)
    sub.add_argument("--variant", choices=("paper", "corrected"), default="paper")


def _build_parser() -> _Parser:
    parser = _Parser(prog="eehpsim", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)
    _add_run_flags(subs.add_parser("sweep", help="run a Monte-Carlo sweep"))
    _add_run_flags(subs.add_parser("planning", help="run the closed-form planning table"))
    _add_planning_flags(subs.add_parser("cnas", help="critical antenna count"))
    _add_planning_flags(subs.add_parser("ueno", help="EE-optimal UE count"))
    subs.add_parser("selftest", help="run the built-in invariant battery")
    return parser


def _resolved_config(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.trials is not None:
        if args.trials < 1:
            raise ConfigError("trials must be >= 1")
        cfg = dataclasses.replace(cfg, trials=args.trials)
    if args.out is not None:
        cfg = dataclasses.replace(cfg, output_path=args.out)
    return cfg


def _planning_params(args) -> PlanningParams:
    return PlanningParams(
        p_out_w=args.p_out_w,
        p_rf_w=args.p_rf_w,
        p_bb_w=args.p_bb_w,
        p_c_prime_w=args.p_c_prime_w,
        alpha=args.alpha,
        n_tx=args.n_tx,
        ee_variant="paper_literal" if args.variant == "paper" else "oracle_corrected",
    )


def _cmd_sweep(args) -> int:
    cfg = _resolved_config(args)
    rows, diagnostics = run_sweep(cfg)
    write_result_csv(rows, cfg.output_path)
    write_manifest(cfg, cfg.output_path, diagnostics)
    print(f"wrote {len(rows)} rows to {cfg.output_path}")
    return 0


def _cmd_planning(args) -> int:
    cfg = _resolved_config(args)
    rows = run_planning(cfg)
    write_planning_csv(rows, cfg.output_path)
    write_manifest(cfg, cfg.output_path)
    print(f"wrote {len(rows)} rows to {cfg.output_path}")
    return 0


def _cmd_cnas(args) -> int:
    result = cnas(_planning_params(args))
    if result is None:
        print("critical_n_tx=none (multi-UE optimum at every antenna count)")
    else:
        print(f"critical_n_tx={result}")
    return 0


def _cmd_ueno(args) -> int:
    print(f"k_opt={ueno(args.n_tx, _planning_params(args))}")
    return 0


def _cmd_selftest() -> int:
    """Fast invariant battery; prints one line per check."""
    failures = 0

    def check(name, ok):
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        failures += 0 if ok else 1

    p = SystemParams(n_tx=16, k_ues=3, n_ray=8, sigma_n2_w=1.0, p_max_w=2.0)
    geom = most_square_geometry(p.n_tx)
    rng = np.random.default_rng(7)
    ch = sample_mmwave_channel(p, geom, rng.uniform(10, 200, p.k_ues), rng,
                               shadow_sigma_db=0.0)
    target = 1.0 / np.sqrt(p.n_tx)
    check("steering columns constant modulus",
          float(np.max(np.abs(np.abs(ch.u) - target))) < 1e-12)

    rng2 = np.random.default_rng(7)
    ch2 = sample_mmwave_channel(p, geom, rng2.uniform(10, 200, p.k_ues), rng2,
                                shadow_sigma_db=0.0)
    check("channel draw deterministic", np.array_equal(ch.h, ch2.h))

    _, rep = eehp_a(ch, p.k_ues, p)
    trace = np.array(rep.ee_trace)
    check("digital ascent trace non-decreasing",
          bool(np.all(np.diff(trace) >= -1e-9 * np.abs(trace[:-1]))))

    _, mrep = eehp_mrfc(ch, p)
    mtrace = np.array(mrep.ee_trace)
    check("minimum-RF ascent trace non-decreasing",
          bool(np.all(np.diff(mtrace) >= -1e-9 * np.abs(mtrace[:-1]))))
    check("transmit power within budget",
          mrep.tx_power <= p.p_max_w * (1 + 1e-9))

    pp = PlanningParams(p_bb_w=1.0)
    k_opt = ueno(150, pp)
    signs = [g_function(k, 150, pp) for k in (max(1, k_opt - 1), k_opt + 1)]
    check("planner pick brackets the sign change", signs[0] < 0 <= signs[1]
          or k_opt == 1)

    print("selftest:", "ok" if failures == 0 else f"{failures} failure(s)")
    return 0 if failures == 0 else 2


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "planning":
            return _cmd_planning(args)
        if args.command == "cnas":
            return _cmd_cnas(args)
        if args.command == "ueno":
            return _cmd_ueno(args)
        if args.command == "selftest":
            return _cmd_selftest()
        return 1
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
