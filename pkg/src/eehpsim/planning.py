"""ZF baseline precoding and closed-form antenna/UE planning analytics.

The analytics track models a minimum-RF-chain ZF system over Rayleigh
fading: an upper bound on its ergodic EE as a function of the UE count K
and antenna count n_tx, the sign function G whose root in K locates the EE
optimum, and integer bisection searches built on G.

Two variants of the array-gain moment are carried: ``paper_literal`` uses
(n_tx*pi^2 - pi + 4)/4 and ``oracle_corrected`` uses (n_tx*pi - pi + 4)/4,
which is the second moment the Monte-Carlo statistics actually verify.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .metrics import DigitalPrecoder
from .params import dbm_to_watt

LN2 = math.log(2.0)
VARIANTS = ("paper_literal", "oracle_corrected")
ZF_COND_LIMIT = 1e12
_BRACKET_CAP = 2**40


@dataclass(frozen=True)
class PlanningParams:
    """Power model and scenario constants for the planning analytics."""

    p_out_w: float = dbm_to_watt(33.0)
    p_rf_w: float = 0.048
    p_bb_w: float = 0.0
    p_c_prime_w: float = 20.0
    alpha: float = 0.38
    n_tx: int = 100
    k_ues: int = 1
    ee_variant: str = "paper_literal"

    def __post_init__(self):
        if min(self.p_out_w, self.p_rf_w, self.p_bb_w, self.p_c_prime_w) < 0:
            raise ValueError("powers must be non-negative")
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError("alpha must lie in (0, 1]")
        if self.n_tx < 1 or self.k_ues < 1:
            raise ValueError("n_tx and k_ues must be positive")
        if self.ee_variant not in VARIANTS:
            raise ValueError(f"ee_variant must be one of {VARIANTS}")


def array_gain_factor(n_tx: float, variant: str) -> float:
    """Mean squared diagonal gain of the phase-aligned equivalent channel."""
    if variant == "paper_literal":
        return (n_tx * math.pi**2 - math.pi + 4.0) / 4.0
    if variant == "oracle_corrected":
        return (n_tx * math.pi - math.pi + 4.0) / 4.0
    raise ValueError(f"ee_variant must be one of {VARIANTS}")


@dataclass(frozen=True)
class GFunctionCoeffs:
    """Substitution variables of the planning sign function."""

    a: float  # p_out * array gain factor
    b: float  # p_out / alpha + p_c_prime
    c: float  # p_rf + p_bb
    z: float  # 1 / K

    @classmethod
    def from_params(
        cls, pp: PlanningParams, k: float | None = None, n_tx: float | None = None
    ) -> "GFunctionCoeffs":
        k = pp.k_ues if k is None else k
        n_tx = pp.n_tx if n_tx is None else n_tx
        return cls(
            a=pp.p_out_w * array_gain_factor(n_tx, pp.ee_variant),
            b=pp.p_out_w / pp.alpha + pp.p_c_prime_w,
            c=pp.p_rf_w + pp.p_bb_w,
            z=1.0 / k,
        )


def ee_upper_bound(pp: PlanningParams, bandwidth_hz: float | None = None) -> float:
    """Upper bound on the ZF energy efficiency (bits/s/Hz per watt).

    Multiplied by the bandwidth only when one is given, yielding bits per
    joule comparable to the simulation-track EE.
    """
    k = pp.k_ues
    gain = array_gain_factor(pp.n_tx, pp.ee_variant)
    num = k * math.log2(1.0 + (pp.p_out_w / k) * gain)
    den = pp.p_out_w / pp.alpha + k * (pp.p_rf_w + pp.p_bb_w) + pp.p_c_prime_w
    value = num / den
    return value * bandwidth_hz if bandwidth_hz is not None else value


def f_za(z: float, a: float, pp: PlanningParams) -> float:
    """Numerator of d(EE bound)/dz after the z = 1/K substitution."""
    co = GFunctionCoeffs.from_params(pp)
    az = a * z
    return a * co.c / (co.b * LN2) + az / LN2 - (1.0 + az) * math.log2(1.0 + az)


def df_dz(z: float, a: float, pp: PlanningParams) -> float:
    """Analytic z-derivative of f: strictly negative for a, z > 0."""
    return -a * math.log2(1.0 + a * z)


def g_function(k: float, n_tx: float, pp: PlanningParams) -> float:
    """Planning sign function, written out in the K / n_tx variables.

    Positive values mean the EE bound still rises toward larger K (smaller
    z); the root in K is the EE-optimal UE count.  Algebraically equals
    f(1/K, a), which the tests cross-check.
    """
    x = 4.0 * array_gain_factor(n_tx, pp.ee_variant)  # = n_tx*pi^2 - pi + 4
    term1 = (pp.p_out_w * (pp.p_rf_w + pp.p_bb_w) * x) / (
        (4.0 * pp.p_out_w / pp.alpha + 4.0 * pp.p_c_prime_w) * LN2
    )
    term2 = pp.p_out_w * x / (4.0 * k * LN2)
    load = 1.0 + pp.p_out_w * x / (4.0 * k)
    return term1 + term2 - load * math.log2(load)


def _expand_bracket(g, lo: float, hi: float, want_nonpositive: bool) -> float:
    """Double hi until g(hi) crosses into the wanted sign."""
    while (g(hi) > 0.0) if want_nonpositive else (g(hi) < 0.0):
        hi *= 2.0
        if hi > _BRACKET_CAP:
            raise RuntimeError("no sign change found while expanding the bracket")
    return hi


def cnas(pp: PlanningParams) -> int | None:
    """Critical antenna count: smallest n_tx at which the EE bound stops
    being maximized by a single UE.

    Returns None when even 100 antennas already favor multiple UEs (the
    sign function is negative at (1, 100)).
    """
    g = lambda n: g_function(1.0, n, pp)
    if g(100.0) < 0.0:
        return None
    lo, hi = 100.0, _expand_bracket(g, 100.0, 1000.0, want_nonpositive=True)
    while hi - lo > 1e-7:
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    cand = math.ceil(0.5 * (lo + hi))
    while cand > 100 and g(float(cand - 1)) <= 0.0:
        cand -= 1
    while g(float(cand)) > 0.0:
        cand += 1
    return cand


def ueno(n_tx: int, pp: PlanningParams) -> int:
    """EE-optimal UE count at a given antenna count.

    When the sign function is non-negative at K=1 the bound decreases with
    K and a single UE is optimal; otherwise the root of the sign function
    in K is bracketed by doubling from 40 and bisected, and the closest
    integer is returned.
    """
    g = lambda k: g_function(k, float(n_tx), pp)
    if g(1.0) >= 0.0:
        return 1
    lo, hi = 1.0, _expand_bracket(g, 1.0, 40.0, want_nonpositive=False)
    while hi - lo > 1e-7:
        mid = 0.5 * (lo + hi)
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    return max(1, math.ceil(root - 0.5))


def zf_baseband(h_eq: np.ndarray, p_out_w: float) -> np.ndarray:
    """ZF baseband matrix for the K x K equivalent channel with equal
    per-UE transmit power p_out / K.

    The product h_eq @ b_bb is diagonal (no inter-UE interference) and each
    column's transmit power is exactly p_out / K.  Raises LinAlgError for a
    singular equivalent channel; the caller resamples.
    """
    h_eq = np.asarray(h_eq)
    k = h_eq.shape[0]
    if h_eq.shape != (k, k):
        raise ValueError("equivalent channel must be square")
    if np.linalg.cond(h_eq) > ZF_COND_LIMIT:
        raise np.linalg.LinAlgError("equivalent channel is singular")
    inv = np.linalg.solve(h_eq, np.eye(k, dtype=complex))
    col_power = np.sum(np.abs(inv) ** 2, axis=0)
    d = np.sqrt(p_out_w / k / col_power)
    return inv * d


def zf_rate(h_eq: np.ndarray, p_out_w: float, k_ues: int) -> np.ndarray:
    """Per-UE SE of equal-power ZF on the equivalent channel (unit noise)."""
    h_eq = np.asarray(h_eq)
    if np.linalg.cond(h_eq) > ZF_COND_LIMIT:
        raise np.linalg.LinAlgError("equivalent channel is singular")
    m = h_eq @ h_eq.conj().T
    inv_diag = np.real(np.diagonal(np.linalg.solve(m, np.eye(len(m), dtype=complex))))
    return np.log2(1.0 + p_out_w / (k_ues * inv_diag))


def zf_digital_precoder(h: np.ndarray, p_out_w: float) -> DigitalPrecoder:
    """Fully digital ZF precoder on a wide K x n_tx channel, equal per-UE
    power p_out / K.  One RF chain per antenna in the power accounting."""
    h = np.asarray(h)
    m = h @ h.conj().T
    if np.linalg.cond(m) > ZF_COND_LIMIT:
        raise np.linalg.LinAlgError("channel Gram matrix is singular")
    w = h.conj().T @ np.linalg.solve(m, np.eye(len(m), dtype=complex))
    col_power = np.sum(np.abs(w) ** 2, axis=0)
    d = np.sqrt(p_out_w / h.shape[0] / col_power)
    return DigitalPrecoder(w * d)


def scan_k_opt(pp: PlanningParams, k_max: int) -> int:
    """Brute-force argmax of the EE bound over integer K (oracle helper)."""
    best_k, best = 1, -math.inf
    for k in range(1, k_max + 1):
        val = ee_upper_bound(replace(pp, k_ues=k))
        if val > best:
            best_k, best = k, val
    return best_k
