"""Two-way amplify-and-forward relay simulator.

Phase-aligned relay beamforming with baselines, Monte-Carlo outage
estimation, and the closed-form outage upper bound with its high-SNR
asymptote.
"""

__version__ = "0.1.0"

from .analysis import (BoundParams, BoundValue, asymptotic_bound, bound_mc,
                       bound_printed, bound_semi_analytic, diversity_slope,
                       gamma_th_from_rate, reconcile_printed)
from .beamform import (Beamformer, SnrPair, build_antenna_selection,
                       build_direct_af, build_proposed, snr_pair_general,
                       snr_pair_proposed, w_statistic)
from .channel import (ChannelPair, RngStream, sample_channel_block,
                      sample_channel_pair, substream)
from .engine import (CdfEstimate, OutageCurve, OutagePoint, SweepConfig,
                     WMomentReport, estimate_outage, estimate_w_cdf,
                     required_snr_at, w_moment_check)
from .specfun import (IntegralResult, QuadratureSpec, bessel_k_int, binomial,
                      gamma_int, integrate_adaptive, lower_incomplete_gamma,
                      reciprocal_gamma_int, upper_incomplete_gamma)

__all__ = [
    "__version__",
    "BoundParams", "BoundValue", "asymptotic_bound", "bound_mc",
    "bound_printed", "bound_semi_analytic", "diversity_slope",
    "gamma_th_from_rate", "reconcile_printed",
    "Beamformer", "SnrPair", "build_antenna_selection", "build_direct_af",
    "build_proposed", "snr_pair_general", "snr_pair_proposed", "w_statistic",
    "ChannelPair", "RngStream", "sample_channel_block", "sample_channel_pair",
    "substream",
    "CdfEstimate", "OutageCurve", "OutagePoint", "SweepConfig",
    "WMomentReport", "estimate_outage", "estimate_w_cdf", "required_snr_at",
    "w_moment_check",
    "IntegralResult", "QuadratureSpec", "bessel_k_int", "binomial",
    "gamma_int", "integrate_adaptive", "lower_incomplete_gamma",
    "reciprocal_gamma_int", "upper_incomplete_gamma",
]
