"""SE / power / EE evaluators against hand-rolled scalar oracles."""

import numpy as np
import pytest

from eehpsim import (
    DigitalPrecoder,
    HybridPrecoder,
    build_report,
    per_ue_tx_power,
    report_hybrid,
    se_digital,
    se_hybrid,
    total_power,
)
from conftest import desk_params, unit_channel


def random_hybrid(rng, n_tx=4, n_rf=3, k=2):
    b_rf = np.exp(1j * rng.uniform(0, 2 * np.pi, (n_tx, n_rf))) / np.sqrt(n_tx)
    b_bb = rng.standard_normal((n_rf, k)) + 1j * rng.standard_normal((n_rf, k))
    return HybridPrecoder(b_rf=b_rf, b_bb=b_bb)


def se_scalar_oracle(h, b, sigma2):
    """Entry-by-entry SINR evaluation with explicit python loops."""
    k_ues = h.shape[0]
    out = []
    for k in range(k_ues):
        sig = abs(np.dot(h[k], b[:, k])) ** 2
        interf = 0.0
        for i in range(k_ues):
            if i != k:
                interf += abs(np.dot(h[k], b[:, i])) ** 2
        out.append(np.log2(1 + sig / (interf + sigma2)))
    return np.array(out)


def test_tx_power_zero_column(rng):
    hp = random_hybrid(rng)
    hp.b_bb[:, 1] = 0
    assert per_ue_tx_power(hp, 1) == 0.0


def test_tx_power_unit_norm_rf_column():
    # a constant-modulus RF column has unit norm, so power is just p
    n_tx = 8
    b_rf = np.ones((n_tx, 2), dtype=complex) / np.sqrt(n_tx)
    b_rf[:, 1] = np.exp(1j * np.linspace(0, 3, n_tx)) / np.sqrt(n_tx)
    p = 2.7
    b_bb = np.array([[np.sqrt(p)], [0.0]], dtype=complex)
    hp = HybridPrecoder(b_rf=b_rf, b_bb=b_bb)
    assert per_ue_tx_power(hp, 0) == pytest.approx(p, rel=1e-12)


def test_tx_power_matches_double_loop(rng):
    hp = random_hybrid(rng, n_tx=4, n_rf=2, k=2)
    eff = hp.b_rf @ hp.b_bb
    for k in range(2):
        want = sum(abs(eff[i, k]) ** 2 for i in range(4))
        assert per_ue_tx_power(hp, k) == pytest.approx(want, rel=1e-12)
    with pytest.raises(IndexError):
        per_ue_tx_power(hp, 2)


def test_se_hybrid_unit_sinr():
    # single UE with |effective gain|^2 = sigma^2 gives exactly 1 bit/s/Hz
    p = desk_params(n_tx=4, k_ues=1, n_ray=4, sigma_n2=0.49)
    ch = unit_channel(p, 0)
    b_rf = ch.u[:, :1]
    g = ch.h[0] @ b_rf[:, 0]
    b_bb = np.array([[np.sqrt(0.49) / abs(g)]], dtype=complex)
    hp = HybridPrecoder(b_rf=b_rf, b_bb=b_bb)
    assert se_hybrid(ch, hp, p)[0] == pytest.approx(1.0, rel=1e-12)


def test_se_hybrid_zero_baseband(rng):
    p = desk_params(n_tx=16, k_ues=3)
    ch = unit_channel(p, 1)
    hp = HybridPrecoder(b_rf=ch.u[:, :3], b_bb=np.zeros((3, 3), dtype=complex))
    assert np.all(se_hybrid(ch, hp, p) == 0)


def test_se_hybrid_matches_scalar_oracle(rng):
    p = desk_params(n_tx=16, k_ues=3)
    ch = unit_channel(p, 2)
    hp = HybridPrecoder(
        b_rf=ch.u[:, :5],
        b_bb=rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3)),
    )
    want = se_scalar_oracle(ch.h, hp.b_rf @ hp.b_bb, p.sigma_n2_w)
    np.testing.assert_allclose(se_hybrid(ch, hp, p), want, rtol=1e-12)


def test_se_digital_consistent_with_hybrid(rng):
    p = desk_params(n_tx=16, k_ues=2)
    ch = unit_channel(p, 3)
    hp = HybridPrecoder(
        b_rf=ch.u[:, :4],
        b_bb=rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2)),
    )
    dp = DigitalPrecoder(hp.b_rf @ hp.b_bb)
    np.testing.assert_allclose(
        se_hybrid(ch, hp, p), se_digital(ch, dp, p), rtol=0, atol=1e-12
    )


def test_se_digital_matched_filter_closed_form():
    p = desk_params(n_tx=8, k_ues=1, sigma_n2=1.0)
    ch = unit_channel(p, 4)
    h = ch.h[0].conj()
    pw = 1.7
    dp = DigitalPrecoder((h * np.sqrt(pw) / np.linalg.norm(h))[:, None])
    want = np.log2(1 + pw * np.linalg.norm(h) ** 2)
    assert se_digital(ch, dp, p)[0] == pytest.approx(want, rel=1e-12)


def test_se_digital_oracle(rng):
    p = desk_params(n_tx=8, k_ues=2)
    ch = unit_channel(p, 5)
    b = rng.standard_normal((8, 2)) + 1j * rng.standard_normal((8, 2))
    np.testing.assert_allclose(
        se_digital(ch, DigitalPrecoder(b), p),
        se_scalar_oracle(ch.h, b, p.sigma_n2_w),
        rtol=1e-12,
    )


def test_total_power_values():
    p = desk_params(n_tx=16, k_ues=4)  # p_rf=48 mW, p_c=20 W, alpha=0.38
    assert total_power(0.0, 10, p) == pytest.approx(20.48)
    assert total_power(2.0, 10, p) == pytest.approx(2 / 0.38 + 0.48 + 20)
    p1 = desk_params(alpha=1.0, p_rf_w=0.0, p_c_w=0.0)
    assert total_power(2.0, 0, p1) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        total_power(-1.0, 2, p)


def test_report_arithmetic():
    p = desk_params(
        k_ues=2, bandwidth_hz=20e6, alpha=1.0, p_rf_w=0.0, p_c_w=20.0, p_max_w=5.0
    )
    rep = build_report(np.array([4.0, 6.0]), 5.0, 0, p)
    assert rep.sum_se == 10.0
    assert rep.total_power == 25.0
    assert rep.ee == pytest.approx(8e6)
    rep0 = build_report(np.zeros(2), 0.0, 0, p)
    assert rep0.ee == 0.0


def test_report_recomposition_oracle(rng):
    # EE from report equals W * sum(se_hybrid) / total_power recomputed
    p = desk_params(n_tx=16, k_ues=3)
    ch = unit_channel(p, 6)
    hp = HybridPrecoder(
        b_rf=ch.u[:, :4],
        b_bb=0.3 * (rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))),
    )
    rep = report_hybrid(ch, hp, p)
    se = se_hybrid(ch, hp, p)
    tx = sum(per_ue_tx_power(hp, k) for k in range(3))
    assert rep.ee == pytest.approx(
        p.bandwidth_hz * se.sum() / total_power(tx, hp.n_rf, p), rel=1e-12
    )
    assert rep.ee == pytest.approx(p.bandwidth_hz * rep.sum_se / rep.total_power, rel=1e-15)


def test_sinr_scaling_identity(rng):
    # R_k(c*B) computed by formula equals log2(1 + c^2 S / (c^2 I + sigma^2))
    p = desk_params(n_tx=8, k_ues=3)
    ch = unit_channel(p, 7)
    b = 0.4 * (rng.standard_normal((8, 3)) + 1j * rng.standard_normal((8, 3)))
    c = 1.9
    g = ch.h @ b
    sig = np.abs(np.diag(g)) ** 2
    interf = np.sum(np.abs(g) ** 2, axis=1) - sig
    want = np.log2(1 + c**2 * sig / (c**2 * interf + p.sigma_n2_w))
    np.testing.assert_allclose(
        se_digital(ch, DigitalPrecoder(c * b), p), want, rtol=1e-12
    )


def test_feasibility_flags():
    p = desk_params(p_max_w=1.0, gamma=2.0, alpha=1.0)
    ok = build_report(np.array([2.5] * p.k_ues), 0.5, 2, p)
    assert ok.feasible
    bad_rate = build_report(np.array([1.0] * p.k_ues), 0.5, 2, p)
    assert not bad_rate.feasible
    bad_power = build_report(np.array([2.5] * p.k_ues), 1.5, 2, p)
    assert not bad_power.feasible


def test_hybrid_modulus_validation(rng):
    b_rf = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    with pytest.raises(ValueError):
        HybridPrecoder(b_rf=b_rf, b_bb=np.zeros((2, 1), dtype=complex))
