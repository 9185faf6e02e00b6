"""System-level constants and unit conversions.

All internal computations use SI units (watts, Hz, meters); dBm values are
converted once, at construction / config-load time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np


def dbm_to_watt(p_dbm: float) -> float:
    return 10.0 ** (p_dbm / 10.0) / 1000.0


def watt_to_dbm(p_w: float) -> float:
    if p_w <= 0:
        raise ValueError("power must be positive to express in dBm")
    return 10.0 * math.log10(p_w * 1000.0)


def noise_power_w(psd_dbm_hz: float, bandwidth_hz: float) -> float:
    """Thermal noise power over a bandwidth from a PSD in dBm/Hz."""
    return 10.0 ** ((psd_dbm_hz + 10.0 * math.log10(bandwidth_hz)) / 10.0 - 3.0)


# Default simulation constants (downlink, single cell): 33 dBm transmit
# budget, 3 bit/s/Hz minimum SE per UE, 48 mW per RF chain, 20 W static BS
# power, amplifier efficiency 0.38, 20 MHz bandwidth at 28 GHz, -174 dBm/Hz
# noise PSD, pathloss exponent 4.6, 30 multipath rays.
DEFAULT_P_MAX_DBM = 33.0
DEFAULT_BANDWIDTH_HZ = 20e6
DEFAULT_NOISE_PSD_DBM_HZ = -174.0
DEFAULT_PATHLOSS_EXP = 4.6
DEFAULT_SHADOW_SIGMA_DB = 9.2
DEFAULT_CELL_RADIUS_M = 200.0
DEFAULT_MIN_DISTANCE_M = 10.0
DEFAULT_CARRIER_GHZ = 28.0


@dataclass(frozen=True)
class SystemParams:
    """Scalar constants shared by the channel, metric and solver layers.

    ``sigma_n2_w=None`` selects the thermal-noise default (-174 dBm/Hz over
    ``bandwidth_hz``); pass ``sigma_n2_w=1.0`` for the normalized-noise
    convention.
    """

    n_tx: int = 200
    k_ues: int = 10
    n_ray: int = 30
    bandwidth_hz: float = DEFAULT_BANDWIDTH_HZ
    p_max_w: float = dbm_to_watt(DEFAULT_P_MAX_DBM)
    gamma_min_se: float | tuple = 3.0
    p_rf_w: float = 0.048
    p_c_w: float = 20.0
    alpha: float = 0.38
    sigma_n2_w: float | None = None
    mu_grid_step: float = 0.01
    tol_ee: float = 1e-6
    max_iters: int = 200

    def __post_init__(self):
        if self.sigma_n2_w is None:
            object.__setattr__(
                self,
                "sigma_n2_w",
                noise_power_w(DEFAULT_NOISE_PSD_DBM_HZ, self.bandwidth_hz),
            )
        if self.n_tx < 1 or self.k_ues < 1 or self.n_ray < 1:
            raise ValueError("n_tx, k_ues and n_ray must be positive")
        if self.k_ues > self.n_tx:
            raise ValueError("need k_ues <= n_tx")
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError("alpha must lie in (0, 1]")
        if self.bandwidth_hz <= 0 or self.sigma_n2_w <= 0:
            raise ValueError("bandwidth and noise power must be positive")
        if min(self.p_max_w, self.p_rf_w, self.p_c_w) < 0:
            raise ValueError("powers must be non-negative")
        if np.any(self.gamma < 0):
            raise ValueError("per-UE minimum SE must be non-negative")
        if self.mu_grid_step <= 0 or self.mu_grid_step > 1:
            raise ValueError("mu_grid_step must lie in (0, 1]")
        if self.tol_ee <= 0 or self.max_iters < 1:
            raise ValueError("bad solver tolerances")

    @property
    def gamma(self) -> np.ndarray:
        """Per-UE minimum spectrum efficiency as a length-K vector."""
        g = np.asarray(self.gamma_min_se, dtype=float)
        if g.ndim == 0:
            return np.full(self.k_ues, float(g))
        if g.shape != (self.k_ues,):
            raise ValueError("gamma_min_se must be scalar or length k_ues")
        return g


# Relative slack used by every feasibility check.
FEAS_RTOL = 1e-9
