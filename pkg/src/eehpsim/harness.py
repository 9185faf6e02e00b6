"""Sweep orchestration: config loading, seeded Monte-Carlo trials, CSV/JSON
result emission.

Every (sweep value, trial) cell draws exactly one channel realization from
a seed derived as SeedSequence([master, value_index, trial_index]), and all
requested algorithms run on that same draw.  Output rows are canonically
sorted, so the CSV is a pure function of (config, seed).
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .channel import most_square_geometry, sample_mmwave_channel
from .eehp import eedp_evaluate, eehp
from .metrics import report_digital
from .mrfc import eehp_mrfc
from .params import SystemParams, dbm_to_watt, noise_power_w
from .planning import PlanningParams, cnas, ee_upper_bound, ueno, zf_digital_precoder

log = logging.getLogger(__name__)

SWEEP_KINDS = ("power", "antennas", "rf_chains", "ues", "mrfc_convergence", "planning")
ALGORITHMS = ("eedp", "eehp", "eehp_mrfc", "zf")

RESULT_HEADER = (
    "sweep_kind",
    "sweep_value",
    "algorithm",
    "trial",
    "seed",
    "n_rf",
    "ee",
    "sum_se",
    "tx_power",
    "total_power",
    "feasible",
    "iterations",
)

PLANNING_HEADER = (
    "n_tx",
    "k",
    "ee_upper",
    "k_opt_ueno",
    "n_tx_critical",
    "ee_variant",
    "p_bb_w",
)


class ConfigError(ValueError):
    """Raised for malformed or inconsistent sweep configuration."""


@dataclass(frozen=True)
class SystemConfig:
    """The ``system`` block of a sweep config; defaults follow the standard
    simulation constants (33 dBm budget, 200 antennas, 10 UEs, 30 rays,
    20 MHz at 28 GHz, -174 dBm/Hz noise PSD)."""

    n_tx: int = 200
    k_ues: int = 10
    n_ray: int = 30
    p_max_dbm: float = 33.0
    gamma_min_se: float = 3.0
    p_rf_w: float = 0.048
    p_c_w: float = 20.0
    alpha: float = 0.38
    carrier_ghz: float = 28.0
    bandwidth_hz: float = 20e6
    noise_psd_dbm_hz: float | None = -174.0
    pathloss_exp: float = 4.6
    shadow_sigma_db: float = 9.2
    cell_radius_m: float = 200.0
    min_distance_m: float = 10.0
    mu_grid_step: float = 0.01
    tol_ee: float = 1e-6
    max_iters: int = 200
    ee_variant: str = "paper_literal"
    p_bb_w: float = 0.0
    p_c_prime_w: float = 20.0

    def sigma_n2_w(self) -> float:
        """Noise power in watts; a null PSD selects the normalized unit-noise
        convention."""
        if self.noise_psd_dbm_hz is None:
            return 1.0
        return noise_power_w(self.noise_psd_dbm_hz, self.bandwidth_hz)

    def system_params(
        self,
        n_tx: int | None = None,
        k_ues: int | None = None,
        p_max_w: float | None = None,
    ) -> SystemParams:
        return SystemParams(
            n_tx=self.n_tx if n_tx is None else n_tx,
            k_ues=self.k_ues if k_ues is None else k_ues,
            n_ray=self.n_ray,
            bandwidth_hz=self.bandwidth_hz,
            p_max_w=dbm_to_watt(self.p_max_dbm) if p_max_w is None else p_max_w,
            gamma_min_se=self.gamma_min_se,
            p_rf_w=self.p_rf_w,
            p_c_w=self.p_c_w,
            alpha=self.alpha,
            sigma_n2_w=self.sigma_n2_w(),
            mu_grid_step=self.mu_grid_step,
            tol_ee=self.tol_ee,
            max_iters=self.max_iters,
        )

    def planning_params(self, n_tx: int | None = None) -> PlanningParams:
        return PlanningParams(
            p_out_w=dbm_to_watt(self.p_max_dbm),
            p_rf_w=self.p_rf_w,
            p_bb_w=self.p_bb_w,
            p_c_prime_w=self.p_c_prime_w,
            alpha=self.alpha,
            n_tx=self.n_tx if n_tx is None else n_tx,
            k_ues=1,
            ee_variant=self.ee_variant,
        )


@dataclass(frozen=True)
class SweepConfig:
    sweep_kind: str
    sweep_values: tuple
    algorithms: tuple = ("eedp", "eehp", "eehp_mrfc", "zf")
    trials: int = 20
    seed: int = 0
    output_path: str = "results.csv"
    system: SystemConfig = field(default_factory=SystemConfig)


@dataclass(frozen=True)
class ResultRow:
    sweep_kind: str
    sweep_value: float
    algorithm: str
    trial: int
    seed: int
    n_rf: int
    ee: float
    sum_se: float
    tx_power: float
    total_power: float
    feasible: bool
    iterations: int


def _check_keys(obj: dict, allowed, where: str) -> None:
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown {where} key(s): {', '.join(sorted(unknown))}")


def config_from_dict(raw: dict) -> SweepConfig:
    """Build a fully defaulted SweepConfig from a parsed JSON document."""
    top_keys = (
        "sweep_kind",
        "sweep_values",
        "algorithms",
        "trials",
        "seed",
        "output_path",
        "system",
    )
    _check_keys(raw, top_keys, "config")
    system_raw = raw.get("system", {})
    if not isinstance(system_raw, dict):
        raise ConfigError("system must be an object")
    _check_keys(system_raw, SystemConfig.__dataclass_fields__, "system")
    try:
        system = SystemConfig(**system_raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad system block: {exc}") from exc

    kind = raw.get("sweep_kind")
    if kind not in SWEEP_KINDS:
        raise ConfigError(f"sweep_kind must be one of {SWEEP_KINDS}, got {kind!r}")
    values = tuple(float(v) for v in raw.get("sweep_values", ()))
    if not values:
        raise ConfigError("sweep_values must be non-empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError("sweep_values must be strictly increasing")
    algorithms = tuple(raw.get("algorithms", ALGORITHMS))
    bad = set(algorithms) - set(ALGORITHMS)
    if bad or not algorithms:
        raise ConfigError(f"algorithms must be a non-empty subset of {ALGORITHMS}")
    trials = int(raw.get("trials", 20))
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    seed = int(raw.get("seed", 0))
    cfg = SweepConfig(
        sweep_kind=kind,
        sweep_values=values,
        algorithms=algorithms,
        trials=trials,
        seed=seed,
        output_path=str(raw.get("output_path", "results.csv")),
        system=system,
    )
    _validate_sweep(cfg)
    return cfg


def load_config(path: str | Path) -> SweepConfig:
    """Parse and validate a JSON sweep config; defaults fill gaps."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} col {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    return config_from_dict(raw)


def _validate_sweep(cfg: SweepConfig) -> None:
    sc = cfg.system
    if cfg.sweep_kind == "mrfc_convergence" and tuple(cfg.algorithms) != ("eehp_mrfc",):
        raise ConfigError('mrfc_convergence sweeps require algorithms=["eehp_mrfc"]')
    if cfg.sweep_kind in ("antennas", "rf_chains", "ues", "mrfc_convergence"):
        for v in cfg.sweep_values:
            if v != int(v) or v < 1:
                raise ConfigError(f"{cfg.sweep_kind} sweep values must be positive integers")
    if cfg.sweep_kind == "power" and min(cfg.sweep_values) <= 0:
        raise ConfigError("power sweep values are transmit powers in watts and must be positive")
    if cfg.sweep_kind == "rf_chains":
        lo, hi = sc.k_ues, min(sc.n_tx, sc.n_ray)
        if min(cfg.sweep_values) < lo or max(cfg.sweep_values) > hi:
            raise ConfigError(f"rf_chains values must lie in [{lo}, {hi}]")
    if cfg.sweep_kind in ("ues", "mrfc_convergence"):
        if max(cfg.sweep_values) > min(sc.n_tx, sc.n_ray):
            raise ConfigError("UE counts must not exceed min(n_tx, n_ray)")
    if cfg.sweep_kind == "antennas" and min(cfg.sweep_values) < sc.k_ues:
        raise ConfigError("antenna counts must be at least k_ues")


def _failure_row(cfg, value, trial, seed, alg) -> ResultRow:
    return ResultRow(
        sweep_kind=cfg.sweep_kind,
        sweep_value=value,
        algorithm=alg,
        trial=trial,
        seed=seed,
        n_rf=0,
        ee=float("nan"),
        sum_se=float("nan"),
        tx_power=float("nan"),
        total_power=float("nan"),
        feasible=False,
        iterations=0,
    )


def run_sweep(cfg: SweepConfig) -> tuple[list[ResultRow], list[str]]:
    """Execute the sweep; returns (rows, diagnostics).

    Per-cell failures become rows with feasible=false and NaN metrics plus a
    diagnostic string; they never abort the sweep.
    """
    if cfg.sweep_kind == "planning":
        raise ConfigError("planning configs run through run_planning")
    sc = cfg.system
    rows: list[ResultRow] = []
    diagnostics: list[str] = []
    for vi, value in enumerate(cfg.sweep_values):
        n_tx = int(value) if cfg.sweep_kind == "antennas" else sc.n_tx
        k_ues = int(value) if cfg.sweep_kind in ("ues", "mrfc_convergence") else sc.k_ues
        p_max = value if cfg.sweep_kind == "power" else None
        n_rf_fixed = int(value) if cfg.sweep_kind == "rf_chains" else None
        params = sc.system_params(n_tx=n_tx, k_ues=k_ues, p_max_w=p_max)
        geom = most_square_geometry(n_tx)
        for trial in range(cfg.trials):
            ss = np.random.SeedSequence([cfg.seed, vi, trial])
            seed_repr = int(ss.generate_state(1, np.uint64)[0])
            rng = np.random.default_rng(ss)
            distances = rng.uniform(sc.min_distance_m, sc.cell_radius_m, k_ues)
            ch = sample_mmwave_channel(
                params,
                geom,
                distances,
                rng,
                pathloss_exp=sc.pathloss_exp,
                shadow_sigma_db=sc.shadow_sigma_db,
            )
            # eehp runs first so a co-requested eedp row can report the
            # digital upper bound at the same RF chain count.
            cell: dict = {}
            order = [a for a in ("eehp", "eedp", "eehp_mrfc", "zf") if a in cfg.algorithms]
            for alg in order:
                try:
                    rows.append(
                        _run_algorithm(
                            cfg, alg, ch, params, n_rf_fixed, value, trial, seed_repr, cell
                        )
                    )
                except (ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
                    msg = f"value={value} trial={trial} {alg}: {exc}"
                    log.warning("sweep cell failed: %s", msg)
                    diagnostics.append(msg)
                    rows.append(_failure_row(cfg, value, trial, seed_repr, alg))
    rows.sort(key=lambda r: (r.sweep_value, r.trial, r.algorithm))
    return rows, diagnostics


def _run_algorithm(
    cfg, alg, ch, params, n_rf_fixed, value, trial, seed_repr, cell
) -> ResultRow:
    if alg == "eedp":
        if "eehp" in cell:
            # digital upper bound of the same cell's hybrid search
            sol = cell["eehp"]
            rep, n_rf = sol.upper_report, sol.n_rf_opt
        else:
            n_rf = n_rf_fixed if n_rf_fixed is not None else params.k_ues
            rep = eedp_evaluate(ch, n_rf, params)
    elif alg == "eehp":
        rng_range = [n_rf_fixed] if n_rf_fixed is not None else None
        sol = eehp(ch, params, rng_range)
        cell["eehp"] = sol
        rep, n_rf = sol.report, sol.n_rf_opt
    elif alg == "eehp_mrfc":
        _, rep = eehp_mrfc(ch, params)
        n_rf = params.k_ues
    elif alg == "zf":
        dp = zf_digital_precoder(ch.h, params.p_max_w)
        rep = report_digital(ch, dp, params, n_rf=params.n_tx)
        n_rf = params.n_tx
    else:  # pragma: no cover - guarded by config validation
        raise ConfigError(f"unknown algorithm {alg!r}")
    return ResultRow(
        sweep_kind=cfg.sweep_kind,
        sweep_value=value,
        algorithm=alg,
        trial=trial,
        seed=seed_repr,
        n_rf=int(n_rf),
        ee=rep.ee,
        sum_se=rep.sum_se,
        tx_power=rep.tx_power,
        total_power=rep.total_power,
        feasible=rep.feasible,
        iterations=rep.iterations,
    )


def run_planning(cfg: SweepConfig) -> list[dict]:
    """Closed-form EE-vs-K table per antenna count, with the planners' picks."""
    if cfg.sweep_kind != "planning":
        raise ConfigError("run_planning requires sweep_kind=planning")
    sc = cfg.system
    n_cri = cnas(sc.planning_params())
    out: list[dict] = []
    for value in cfg.sweep_values:
        n_tx = int(value)
        pp = sc.planning_params(n_tx=n_tx)
        k_opt = ueno(n_tx, pp)
        k_max = max(200, int(1.5 * k_opt) + 1)
        for k in range(1, k_max + 1):
            out.append(
                {
                    "n_tx": n_tx,
                    "k": k,
                    "ee_upper": ee_upper_bound(replace(pp, k_ues=k)),
                    "k_opt_ueno": k_opt,
                    "n_tx_critical": -1 if n_cri is None else n_cri,
                    "ee_variant": pp.ee_variant,
                    "p_bb_w": pp.p_bb_w,
                }
            )
    return out


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def write_result_csv(rows: list[ResultRow], path: str | Path) -> None:
    lines = [",".join(RESULT_HEADER)]
    for r in rows:
        d = asdict(r)
        lines.append(",".join(_fmt(d[name]) for name in RESULT_HEADER))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_planning_csv(rows: list[dict], path: str | Path) -> None:
    lines = [",".join(PLANNING_HEADER)]
    for r in rows:
        lines.append(",".join(_fmt(r[name]) for name in PLANNING_HEADER))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def manifest_path(csv_path: str | Path) -> Path:
    return Path(csv_path).with_suffix(".manifest.json")


def write_manifest(cfg: SweepConfig, csv_path: str | Path, diagnostics=()) -> Path:
    """Sidecar run manifest: resolved config, tool version, diagnostics."""
    doc = {
        "tool": "eehpsim",
        "version": __version__,
        "config": {
            "sweep_kind": cfg.sweep_kind,
            "sweep_values": list(cfg.sweep_values),
            "algorithms": list(cfg.algorithms),
            "trials": cfg.trials,
            "seed": cfg.seed,
            "output_path": cfg.output_path,
            "system": asdict(cfg.system),
        },
        "diagnostics": list(diagnostics),
    }
    path = manifest_path(csv_path)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
