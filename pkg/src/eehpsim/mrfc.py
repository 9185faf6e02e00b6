"""Minimum-RF-chain hybrid precoding.

The RF stage is fixed by extracting the phases of the conjugate-transposed
channel (one chain per UE), the channel collapses to an equivalent K x K
matrix, and only the baseband matrix is optimized: the same ascent engine
as the digital case, with the power metric B_RF^H B_RF replacing the
identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ascent import LN2, build_omega, build_xi, gradient_state, maximize_ee
from .channel import ChannelRealization
from .eehp import GradientTerms
from .metrics import EEReport, HybridPrecoder, RF_MODULUS_TOL, report_hybrid
from .params import SystemParams

EQ_DIAG_TOL = 1e-9


def _channel_rows(ch: ChannelRealization | np.ndarray) -> np.ndarray:
    return ch.h if isinstance(ch, ChannelRealization) else np.asarray(ch)


def build_rf_from_channel(ch: ChannelRealization | np.ndarray) -> np.ndarray:
    """Phase-only RF stage: entry (i, j) is exp(j*angle) / sqrt(n_tx) with
    the angle taken from the (i, j) entry of the conjugate-transposed
    channel matrix.  Zero entries get phase 0."""
    h = _channel_rows(ch)
    hct = h.conj().T  # n_tx x K
    n_tx = hct.shape[0]
    return np.exp(1j * np.angle(hct)) / np.sqrt(n_tx)


@dataclass(frozen=True)
class EquivalentChannel:
    """K x K channel seen through the fixed RF stage (row k = h_k,eq^H)."""

    h_eq: np.ndarray
    b_rf: np.ndarray

    def __post_init__(self):
        n_tx = self.b_rf.shape[0]
        if np.max(np.abs(np.abs(self.b_rf) - 1.0 / np.sqrt(n_tx))) > RF_MODULUS_TOL:
            raise ValueError("RF stage entries must have modulus 1/sqrt(n_tx)")
        diag = np.diagonal(self.h_eq)
        scale = max(1.0, float(np.max(np.abs(diag))))
        if np.max(np.abs(diag.imag)) > EQ_DIAG_TOL * scale or np.any(
            diag.real < -EQ_DIAG_TOL * scale
        ):
            raise ValueError("equivalent-channel diagonal must be real non-negative")


def equivalent_channel(
    ch: ChannelRealization | np.ndarray,
    b_rf: np.ndarray | None = None,
) -> EquivalentChannel:
    """Combine the channel with the phase-extracted RF stage.

    The diagonal equals sum_i |H_{i,k}| / sqrt(n_tx) exactly (phase-aligned
    sum), which the validator relies on.
    """
    h = _channel_rows(ch)
    if b_rf is None:
        b_rf = build_rf_from_channel(h)
    h_eq = h @ b_rf
    # Phase alignment makes the diagonal real; clear rounding residue.
    idx = np.diag_indices(min(h_eq.shape))
    h_eq[idx] = h_eq[idx].real
    return EquivalentChannel(h_eq=h_eq, b_rf=b_rf)


def mrfc_gradient_terms(
    b_bb: np.ndarray,
    k: int,
    eq: EquivalentChannel,
    p: SystemParams,
) -> GradientTerms:
    """Gradient building blocks of the baseband-only EE at column k."""
    metric = _power_metric(eq.b_rf)
    tx = float(np.real(np.einsum("dk,de,ek->", b_bb.conj(), metric, b_bb)))
    state = gradient_state(eq.h_eq @ b_bb, tx, eq.b_rf.shape[1], p)
    return GradientTerms(
        omega=build_omega(eq.h_eq, state, k),
        xi=build_xi(eq.h_eq, state, k, metric),
        p_bar=state.p_bar,
        delta=state.delta.copy(),
    )


def mrfc_ee_gradient(
    b_bb: np.ndarray,
    k: int,
    eq: EquivalentChannel,
    p: SystemParams,
) -> np.ndarray:
    terms = mrfc_gradient_terms(b_bb, k, eq, p)
    return (2.0 / (terms.p_bar**2 * LN2)) * ((terms.omega - terms.xi) @ b_bb[:, k])


def _power_metric(b_rf: np.ndarray) -> np.ndarray:
    m = b_rf.conj().T @ b_rf
    return 0.5 * (m + m.conj().T)


def equal_entry_init(eq: EquivalentChannel, p: SystemParams) -> np.ndarray:
    """All-ones baseband start, scaled onto the transmit power budget.

    The raw equal-entry matrix overshoots the budget through the RF stage
    for K > 1, so the scale is set from ||B_RF @ ones||_F directly.
    """
    k = eq.h_eq.shape[0]
    ones = np.ones((k, k), dtype=complex)
    base = np.linalg.norm(eq.b_rf @ ones)
    if base <= 0:
        raise ValueError("degenerate RF stage: zero effective power")
    return ones * (np.sqrt(p.p_max_w) / base)


def eehp_mrfc(
    ch: ChannelRealization, p: SystemParams
) -> tuple[HybridPrecoder, EEReport]:
    """Baseband EE ascent behind the phase-extracted RF stage (n_rf = K)."""
    eq = equivalent_channel(ch)
    res = maximize_ee(
        eq.h_eq, _power_metric(eq.b_rf), equal_entry_init(eq, p), ch.k_ues, p
    )
    hp = HybridPrecoder(b_rf=eq.b_rf, b_bb=res.coeffs)
    rep = report_hybrid(ch, hp, p, iterations=res.iterations, ee_trace=res.ee_trace)
    return hp, rep
