"""Steering vectors and stochastic mmWave / Rayleigh channel generation.

The mmWave model is a finite-ray geometric one: each UE's channel is a sum
of uniform-planar-array response vectors with i.i.d. complex Gaussian ray
gains, scaled by a lognormal-shadowed power-law pathloss.  All randomness
comes from an explicitly passed ``numpy.random.Generator``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import (
    DEFAULT_PATHLOSS_EXP,
    DEFAULT_SHADOW_SIGMA_DB,
    SystemParams,
)

STEERING_MODULUS_TOL = 1e-12


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform planar array: ``rows x cols`` elements, spacing in wavelengths."""

    rows: int
    cols: int
    spacing_wl: float = 0.5

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("array dimensions must be positive")
        if self.spacing_wl <= 0:
            raise ValueError("element spacing must be positive")

    @property
    def n_tx(self) -> int:
        return self.rows * self.cols


def most_square_geometry(n_tx: int, spacing_wl: float = 0.5) -> ArrayGeometry:
    """Factor n_tx into the most-square (rows, cols) pair with rows <= cols."""
    if n_tx < 1:
        raise ValueError("n_tx must be positive")
    m = int(np.sqrt(n_tx))
    while n_tx % m != 0:
        m -= 1
    return ArrayGeometry(rows=m, cols=n_tx // m, spacing_wl=spacing_wl)


def steering_vector(psi: float, theta: float, geom: ArrayGeometry) -> np.ndarray:
    """Planar-array response for azimuth ``psi`` and elevation ``theta``.

    Entry (m, n), stored row-major, is
    exp(j*2*pi*spacing*(m*sin(psi)*sin(theta) + n*cos(theta))) / sqrt(n_tx).
    """
    m = np.arange(geom.rows)[:, None]
    n = np.arange(geom.cols)[None, :]
    phase = 2.0 * np.pi * geom.spacing_wl * (
        m * np.sin(psi) * np.sin(theta) + n * np.cos(theta)
    )
    return np.exp(1j * phase).ravel() / np.sqrt(geom.n_tx)


def steering_matrix(psis: np.ndarray, thetas: np.ndarray, geom: ArrayGeometry) -> np.ndarray:
    """Stack steering vectors for ray angle pairs into an (n_tx, n_ray) matrix."""
    psis = np.asarray(psis, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    if psis.shape != thetas.shape or psis.ndim != 1:
        raise ValueError("psis and thetas must be 1-D arrays of equal length")
    return np.column_stack([steering_vector(p, t, geom) for p, t in zip(psis, thetas)])


@dataclass(frozen=True)
class ChannelRealization:
    """One downlink channel draw.

    ``h`` is K x n_tx with row k the conjugate-transposed channel of UE k;
    ``u`` is the n_tx x n_ray steering matrix shared by all UEs; ``beta`` the
    per-UE large-scale gains (linear).
    """

    h: np.ndarray
    u: np.ndarray
    beta: np.ndarray
    geometry: ArrayGeometry
    n_ray: int

    def __post_init__(self):
        if not np.all(np.isfinite(self.h)):
            raise ValueError("channel matrix contains non-finite entries")
        if np.any(self.beta <= 0):
            raise ValueError("large-scale gains must be positive")
        target = 1.0 / np.sqrt(self.geometry.n_tx)
        if np.max(np.abs(np.abs(self.u) - target)) > STEERING_MODULUS_TOL:
            raise ValueError("steering matrix entries must have constant modulus")
        if self.u.shape != (self.geometry.n_tx, self.n_ray):
            raise ValueError("steering matrix shape mismatch")
        if self.h.shape[1] != self.geometry.n_tx:
            raise ValueError("channel matrix width must equal n_tx")

    @property
    def k_ues(self) -> int:
        return self.h.shape[0]

    @property
    def n_tx(self) -> int:
        return self.geometry.n_tx


def sample_large_scale(
    distance_m: float,
    pathloss_exp: float,
    shadow_sigma_db: float,
    rng: np.random.Generator,
) -> float:
    """Lognormal-shadowed power-law gain zeta / d^gamma (linear scale)."""
    if distance_m <= 0:
        raise ValueError("UE distance must be positive")
    shadow_db = rng.normal(0.0, shadow_sigma_db) if shadow_sigma_db > 0 else 0.0
    zeta = 10.0 ** (shadow_db / 10.0)
    return zeta / distance_m**pathloss_exp


def channel_from_paths(
    geom: ArrayGeometry,
    psis: np.ndarray,
    thetas: np.ndarray,
    gains: np.ndarray,
    beta: np.ndarray,
) -> ChannelRealization:
    """Deterministic channel assembly from explicit ray angles and gains.

    ``gains`` is K x n_ray (one complex gain per UE per ray); all UEs share
    the same ray directions, so a single steering matrix serves every UE.
    """
    gains = np.asarray(gains, dtype=complex)
    beta = np.asarray(beta, dtype=float)
    if gains.ndim != 2:
        raise ValueError("gains must be K x n_ray")
    k_ues, n_ray = gains.shape
    if beta.shape != (k_ues,):
        raise ValueError("beta must have one entry per UE")
    u = steering_matrix(psis, thetas, geom)
    scale = np.sqrt(geom.n_tx * beta / n_ray)
    # h_k = scale_k * sum_i gains_{ki} u_i; rows of h are h_k^H.
    h = (scale[:, None] * (u @ gains.T).T).conj()
    return ChannelRealization(h=h, u=u, beta=beta, geometry=geom, n_ray=n_ray)


def sample_mmwave_channel(
    params: SystemParams,
    geom: ArrayGeometry,
    ue_distances: np.ndarray,
    rng: np.random.Generator,
    pathloss_exp: float = DEFAULT_PATHLOSS_EXP,
    shadow_sigma_db: float = DEFAULT_SHADOW_SIGMA_DB,
) -> ChannelRealization:
    """Draw one finite-ray channel realization for all K UEs.

    Ray azimuth/elevation pairs are uniform on [0, 2*pi) and shared across
    UEs; ray gains are i.i.d. CN(0, 1) per (UE, ray).  Draw order is fixed
    (angles, gains, shadowing) so a seeded generator reproduces the
    realization bit-for-bit.
    """
    ue_distances = np.asarray(ue_distances, dtype=float)
    k_ues = ue_distances.shape[0]
    if k_ues != params.k_ues:
        raise ValueError("ue_distances length must equal k_ues")
    if geom.n_tx != params.n_tx:
        raise ValueError("geometry must match params.n_tx")
    n_ray = params.n_ray
    psis = rng.uniform(0.0, 2.0 * np.pi, n_ray)
    thetas = rng.uniform(0.0, 2.0 * np.pi, n_ray)
    gains = (
        rng.standard_normal((k_ues, n_ray)) + 1j * rng.standard_normal((k_ues, n_ray))
    ) / np.sqrt(2.0)
    beta = np.array(
        [
            sample_large_scale(d, pathloss_exp, shadow_sigma_db, rng)
            for d in ue_distances
        ]
    )
    return channel_from_paths(geom, psis, thetas, gains, beta)


def sample_rayleigh_channel(
    k_ues: int, n_tx: int, rng: np.random.Generator
) -> np.ndarray:
    """K x n_tx matrix of i.i.d. CN(0, 1) entries."""
    if k_ues < 1 or n_tx < 1:
        raise ValueError("matrix dimensions must be positive")
    return (
        rng.standard_normal((k_ues, n_tx)) + 1j * rng.standard_normal((k_ues, n_tx))
    ) / np.sqrt(2.0)
