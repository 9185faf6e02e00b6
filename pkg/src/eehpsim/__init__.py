"""Energy-efficient hybrid precoding simulator for mmWave massive-MIMO
downlinks: channel generation, EE-maximizing precoder solvers, ZF planning
analytics and a reproducible sweep harness."""

__version__ = "0.1.0"

from .channel import (
    ArrayGeometry,
    ChannelRealization,
    channel_from_paths,
    most_square_geometry,
    sample_large_scale,
    sample_mmwave_channel,
    sample_rayleigh_channel,
    steering_matrix,
    steering_vector,
)
from .eehp import (
    EEHPSolution,
    GradientTerms,
    eedp_evaluate,
    eehp,
    eehp_a,
    eehp_b,
    ee_gradient,
    gradient_terms,
    matched_filter_init,
)
from .metrics import (
    DigitalPrecoder,
    EEReport,
    HybridPrecoder,
    build_report,
    per_ue_tx_power,
    report_digital,
    report_hybrid,
    se_digital,
    se_hybrid,
    total_power,
)
from .mrfc import (
    EquivalentChannel,
    build_rf_from_channel,
    eehp_mrfc,
    equivalent_channel,
    mrfc_ee_gradient,
    mrfc_gradient_terms,
)
from .params import SystemParams, dbm_to_watt, noise_power_w, watt_to_dbm
from .planning import (
    GFunctionCoeffs,
    PlanningParams,
    array_gain_factor,
    cnas,
    df_dz,
    ee_upper_bound,
    f_za,
    g_function,
    ueno,
    zf_baseband,
    zf_digital_precoder,
    zf_rate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
