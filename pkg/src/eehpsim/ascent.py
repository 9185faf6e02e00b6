"""Shared energy-efficiency ascent engine.

Both the digital-precoder optimizer and the fixed-RF baseband optimizer are
the same per-UE fixed-point iteration: move column k toward Xi_k^-1 Omega_k
b_k with a constrained grid line search on the step length.  The engine is
parameterized by the effective per-UE channel rows (full channel, or the
channel seen through a fixed RF stage) and by the quadratic power metric
(identity, or B_RF^H B_RF).

The EE trace it returns is non-decreasing by construction: step length 0 is
always a candidate and the chosen step maximizes the objective among
feasible candidates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import FEAS_RTOL, SystemParams

LN2 = float(np.log(2.0))
COND_LIMIT = 1e12
RIDGE_SCALE = 1e-10


@dataclass
class AscentState:
    """Snapshot of the scalar pieces the EE gradient is assembled from."""

    rates: np.ndarray      # per-UE SE, bits/s/Hz
    full: np.ndarray       # per-UE signal + interference + noise power
    delta: np.ndarray      # per-UE interference + noise power
    rank1: np.ndarray      # per-UE rank-one Xi coefficients
    id_coeff: float        # coefficient of the power-metric term in Xi
    p_bar: float           # bandwidth-normalized total BS power


def gradient_state(
    gains: np.ndarray, tx_power: float, n_rf: int, p: SystemParams
) -> AscentState:
    """Gradient building blocks at the current point.

    ``gains[i, j]`` is the effective complex gain e_i^H c_j of UE j's column
    at UE i's channel; ``tx_power`` the metric-weighted transmit power.
    """
    pabs = np.abs(gains) ** 2
    sig = np.diagonal(pabs).copy()
    rowsum = pabs.sum(axis=1)
    delta = rowsum - sig + p.sigma_n2_w
    full = rowsum + p.sigma_n2_w
    rates = np.log2(1.0 + sig / delta)
    p_bar = (tx_power / p.alpha + n_rf * p.p_rf_w + p.p_c_w) / p.bandwidth_hz
    rank1 = sig / (delta**2 + delta * sig)
    # Exact coefficient of the metric term: ln2 * sum(rates) / (W * alpha).
    id_coeff = LN2 * float(rates.sum()) / (p.bandwidth_hz * p.alpha)
    return AscentState(rates, full, delta, rank1, id_coeff, p_bar)


def build_xi(
    e_rows: np.ndarray,
    state: AscentState,
    k: int,
    metric: np.ndarray | None,
) -> np.ndarray:
    """Xi_k = id_coeff * metric + p_bar * sum_{i != k} rank1_i e_i e_i^H."""
    w = state.rank1.copy()
    w[k] = 0.0
    xi = state.p_bar * ((e_rows.conj().T * w) @ e_rows)
    if metric is None:
        xi[np.diag_indices_from(xi)] += state.id_coeff
    else:
        xi = xi + state.id_coeff * metric
    return xi


def build_omega(e_rows: np.ndarray, state: AscentState, k: int) -> np.ndarray:
    """Omega_k = p_bar * e_k e_k^H / (sum_j |e_k^H c_j|^2 + sigma^2)."""
    e_k = e_rows[k].conj()
    return (state.p_bar / state.full[k]) * np.outer(e_k, e_k.conj())


def _solve_direction(xi: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve Xi x = rhs with a ridge fallback for ill-conditioned Xi."""
    cond = np.linalg.cond(xi)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        ridge = RIDGE_SCALE * np.trace(xi).real / xi.shape[0] + 1e-30
        xi = xi + ridge * np.eye(xi.shape[0])
    try:
        return np.linalg.solve(xi, rhs)
    except np.linalg.LinAlgError:
        # Degenerate zero-rate state: fall back to the raw ascent direction.
        return rhs.copy()


@dataclass
class AscentResult:
    coeffs: np.ndarray
    ee_trace: list
    iterations: int


def maximize_ee(
    e_rows: np.ndarray,
    metric: np.ndarray | None,
    init: np.ndarray,
    n_rf: int,
    p: SystemParams,
) -> AscentResult:
    """Run the per-UE fixed-point ascent from a power-feasible start.

    e_rows: K x D effective channel (row i = e_i^H); metric: D x D Hermitian
    power weight or None for the identity; init: D x K starting columns.
    """
    k_ues = e_rows.shape[0]
    coeffs = np.array(init, dtype=complex)
    gains = e_rows @ coeffs
    if metric is None:
        pw = np.sum(np.abs(coeffs) ** 2, axis=0)
    else:
        pw = np.real(np.einsum("dk,de,ek->k", coeffs.conj(), metric, coeffs))
    p_limit = p.p_max_w * (1.0 + FEAS_RTOL)
    if pw.sum() > p_limit:
        raise ValueError("initial precoder violates the transmit power budget")

    n_mu = int(round(1.0 / p.mu_grid_step)) + 1
    mu = np.linspace(0.0, 1.0, n_mu)
    gamma = p.gamma
    fixed_power = n_rf * p.p_rf_w + p.p_c_w

    def ee_value(rate_sum: float, tx: float) -> float:
        return p.bandwidth_hz * rate_sum / (tx / p.alpha + fixed_power)

    state = gradient_state(gains, float(pw.sum()), n_rf, p)
    trace = [ee_value(float(state.rates.sum()), float(pw.sum()))]

    for _ in range(p.max_iters):
        moved = False
        for k in range(k_ues):
            state = gradient_state(gains, float(pw.sum()), n_rf, p)
            e_k = e_rows[k].conj()
            rhs = e_k * (state.p_bar * gains[k, k] / state.full[k])
            xi = build_xi(e_rows, state, k, metric)
            x = _solve_direction(xi, rhs)

            # Candidate columns c(mu) = (1-mu) c_k + mu x, evaluated in bulk.
            gx = e_rows @ x
            gcol = np.outer(1.0 - mu, gains[:, k]) + np.outer(mu, gx)
            mx = x if metric is None else metric @ x
            a0 = pw[k]
            a1 = np.vdot(coeffs[:, k], mx).real
            a2 = np.vdot(x, mx).real
            pk_mu = (1.0 - mu) ** 2 * a0 + 2.0 * mu * (1.0 - mu) * a1 + mu**2 * a2
            tx_mu = pw.sum() - pw[k] + pk_mu

            pg = np.abs(gcol) ** 2
            sig = np.abs(np.diagonal(gains)) ** 2
            base = state.delta - np.abs(gains[:, k]) ** 2
            base[k] = state.delta[k]  # row k is replaced below
            sinr = sig[None, :] / (base[None, :] + pg)
            sinr[:, k] = pg[:, k] / state.delta[k]
            r_mu = np.log2(1.0 + sinr)
            eta_mu = p.bandwidth_hz * r_mu.sum(axis=1) / (tx_mu / p.alpha + fixed_power)

            power_ok = tx_mu <= p_limit
            power_ok[0] = True
            rate_ok = power_ok & (r_mu[:, k] >= gamma[k] - 1e-9)
            # Feasible steps must meet UE k's rate floor and the power
            # budget; with no feasible step the UE does not move.  A step
            # is also never taken below the current EE, keeping the trace
            # non-decreasing even from a rate-infeasible start.
            if rate_ok.any():
                idx = int(np.argmax(np.where(rate_ok, eta_mu, -np.inf)))
                if eta_mu[idx] < eta_mu[0]:
                    idx = 0
            else:
                idx = 0
            if idx != 0:
                step = mu[idx]
                coeffs[:, k] = (1.0 - step) * coeffs[:, k] + step * x
                gains[:, k] = gcol[idx]
                pw[k] = pk_mu[idx]
                moved = True

        state = gradient_state(gains, float(pw.sum()), n_rf, p)
        trace.append(ee_value(float(state.rates.sum()), float(pw.sum())))
        prev = trace[-2]
        if not moved or abs(trace[-1] - prev) <= p.tol_ee * abs(prev):
            break

    return AscentResult(coeffs=coeffs, ee_trace=trace, iterations=len(trace) - 1)
