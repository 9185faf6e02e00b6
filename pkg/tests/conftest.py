"""Shared instance factories for the test suite.

Desk-scale instances default to the normalized convention (unit noise
power, unit large-scale gains) so SINRs sit in the regime where the
qualitative EE trends are visible; the thermal-noise path is exercised
separately.
"""

import numpy as np
import pytest

from eehpsim import SystemParams, most_square_geometry, sample_mmwave_channel


def desk_params(n_tx=16, k_ues=4, n_ray=8, p_max_w=2.0, gamma=0.0, sigma_n2=1.0, **kw):
    return SystemParams(
        n_tx=n_tx,
        k_ues=k_ues,
        n_ray=n_ray,
        p_max_w=p_max_w,
        gamma_min_se=gamma,
        sigma_n2_w=sigma_n2,
        **kw,
    )


def unit_channel(p, seed):
    """Channel draw with beta = 1 for every UE (distance 1 m, no shadowing)."""
    rng = np.random.default_rng(seed)
    geom = most_square_geometry(p.n_tx)
    return sample_mmwave_channel(p, geom, np.ones(p.k_ues), rng, shadow_sigma_db=0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
