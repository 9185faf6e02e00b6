"""Per-link spectrum efficiency, BS power and energy efficiency evaluation.

Everything here is a pure function of a channel realization and a precoder;
all solvers report through :func:`build_report` so the identity
``ee == bandwidth * sum_se / total_power`` holds by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelRealization
from .params import FEAS_RTOL, SystemParams

RF_MODULUS_TOL = 1e-9


@dataclass(frozen=True)
class DigitalPrecoder:
    """Unconstrained n_tx x K precoding matrix, column k serving UE k."""

    b: np.ndarray

    def __post_init__(self):
        if self.b.ndim != 2:
            raise ValueError("precoding matrix must be 2-D")
        if not np.all(np.isfinite(self.b)):
            raise ValueError("precoding matrix contains non-finite entries")

    @property
    def tx_power(self) -> float:
        return float(np.sum(np.abs(self.b) ** 2))


@dataclass(frozen=True)
class HybridPrecoder:
    """Constant-modulus RF stage (n_tx x n_rf) plus baseband stage (n_rf x K)."""

    b_rf: np.ndarray
    b_bb: np.ndarray

    def __post_init__(self):
        n_tx, n_rf = self.b_rf.shape
        if self.b_bb.shape[0] != n_rf:
            raise ValueError("b_rf and b_bb have incompatible shapes")
        target = 1.0 / np.sqrt(n_tx)
        if np.max(np.abs(np.abs(self.b_rf) - target)) > RF_MODULUS_TOL:
            raise ValueError("RF precoder entries must have modulus 1/sqrt(n_tx)")

    @property
    def n_rf(self) -> int:
        return self.b_rf.shape[1]

    @property
    def effective(self) -> np.ndarray:
        """The equivalent digital matrix b_rf @ b_bb."""
        return self.b_rf @ self.b_bb


def per_ue_tx_power(hp: HybridPrecoder, k: int) -> float:
    """Transmit power spent on UE k: squared norm of the k-th effective column."""
    n_ues = hp.b_bb.shape[1]
    if not 0 <= k < n_ues:
        raise IndexError(f"UE index {k} out of range [0, {n_ues})")
    return float(np.sum(np.abs(hp.b_rf @ hp.b_bb[:, k]) ** 2))


def _se_from_gains(g: np.ndarray, sigma_n2: float) -> np.ndarray:
    """Per-UE SE from the K x K effective-gain matrix g[i, j] = h_i^H b_j."""
    p = np.abs(g) ** 2
    signal = np.diag(p)
    interference = p.sum(axis=1) - signal
    return np.log2(1.0 + signal / (interference + sigma_n2))


def se_digital(
    ch: ChannelRealization, dp: DigitalPrecoder, p: SystemParams
) -> np.ndarray:
    """Per-UE SE of an unconstrained digital precoder."""
    if dp.b.shape != (ch.n_tx, ch.k_ues):
        raise ValueError("precoder shape does not match channel")
    return _se_from_gains(ch.h @ dp.b, p.sigma_n2_w)


def se_hybrid(
    ch: ChannelRealization, hp: HybridPrecoder, p: SystemParams
) -> np.ndarray:
    """Per-UE SE of a hybrid pair; equals se_digital of b_rf @ b_bb."""
    if hp.b_rf.shape[0] != ch.n_tx or hp.b_bb.shape[1] != ch.k_ues:
        raise ValueError("precoder shape does not match channel")
    return _se_from_gains(ch.h @ hp.b_rf @ hp.b_bb, p.sigma_n2_w)


def total_power(tx_power_w: float, n_rf: int, p: SystemParams) -> float:
    """BS power model: amplifier draw plus per-chain and static terms."""
    if tx_power_w < 0:
        raise ValueError("transmit power must be non-negative")
    return tx_power_w / p.alpha + n_rf * p.p_rf_w + p.p_c_w


@dataclass(frozen=True)
class EEReport:
    """Energy-efficiency record for one precoder on one channel."""

    per_ue_se: np.ndarray
    sum_se: float
    tx_power: float
    total_power: float
    ee: float
    feasible: bool
    iterations: int = 0
    ee_trace: tuple = field(default_factory=tuple)


def build_report(
    per_ue_se: np.ndarray,
    tx_power_w: float,
    n_rf: int,
    p: SystemParams,
    iterations: int = 0,
    ee_trace: tuple = (),
) -> EEReport:
    """Assemble an EEReport; evaluates feasibility of rate and power limits."""
    per_ue_se = np.asarray(per_ue_se, dtype=float)
    sum_se = float(per_ue_se.sum())
    ptot = total_power(tx_power_w, n_rf, p)
    ee = p.bandwidth_hz * sum_se / ptot
    feasible = bool(
        np.all(per_ue_se >= p.gamma - 1e-9)
        and tx_power_w <= p.p_max_w * (1.0 + FEAS_RTOL)
    )
    return EEReport(
        per_ue_se=per_ue_se,
        sum_se=sum_se,
        tx_power=float(tx_power_w),
        total_power=ptot,
        ee=ee,
        feasible=feasible,
        iterations=iterations,
        ee_trace=tuple(ee_trace),
    )


def report_hybrid(
    ch: ChannelRealization,
    hp: HybridPrecoder,
    p: SystemParams,
    iterations: int = 0,
    ee_trace: tuple = (),
) -> EEReport:
    se = se_hybrid(ch, hp, p)
    tx = float(np.sum(np.abs(hp.b_rf @ hp.b_bb) ** 2))
    return build_report(se, tx, hp.n_rf, p, iterations, ee_trace)


def report_digital(
    ch: ChannelRealization,
    dp: DigitalPrecoder,
    p: SystemParams,
    n_rf: int,
    iterations: int = 0,
    ee_trace: tuple = (),
) -> EEReport:
    se = se_digital(ch, dp, p)
    return build_report(se, dp.tx_power, n_rf, p, iterations, ee_trace)
