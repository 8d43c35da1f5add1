"""Sliding Reed-Solomon network coding over packet-erasure channels:
exact reliability/latency analysis, retransmission schemes, and Monte Carlo
simulation with an algebraic-decoder cross-check."""

__version__ = "0.1.0"

from .analytic import (
    LatencyDistribution,
    WindowSuccessTerms,
    avg_packet_latency,
    bc_latency_dist,
    binom_cdf,
    binom_pmf,
    comparable_long_bc_success,
    snc_latency_dist,
    snc_success_exact,
    snc_success_lower_bound,
)
from .codec import (
    CodeParams,
    ErasurePattern,
    GeneratorSet,
    MdpResult,
    build_generators,
    decodable_by_count,
    encode_block,
    is_mdp,
    window_decode,
)
from .gf import GF, Matrix, vandermonde
from .modes import (
    ModeConfig,
    mode3_success_closed_form,
    mode_avg_code_length,
    mode_avg_latency,
    mode_latency_dist,
    mode_success,
)
from .sim import (
    SimReport,
    TrialOutcome,
    erase,
    replay_trial_with_decoder,
    seed_schedule,
    sim_mode,
    sim_snc_first_block,
    sim_snc_latency,
)

__all__ = [
    "GF",
    "Matrix",
    "vandermonde",
    "CodeParams",
    "GeneratorSet",
    "ErasurePattern",
    "MdpResult",
    "build_generators",
    "encode_block",
    "decodable_by_count",
    "window_decode",
    "is_mdp",
    "LatencyDistribution",
    "WindowSuccessTerms",
    "binom_pmf",
    "binom_cdf",
    "snc_success_exact",
    "snc_success_lower_bound",
    "comparable_long_bc_success",
    "snc_latency_dist",
    "bc_latency_dist",
    "avg_packet_latency",
    "ModeConfig",
    "mode_success",
    "mode3_success_closed_form",
    "mode_avg_code_length",
    "mode_latency_dist",
    "mode_avg_latency",
    "SimReport",
    "TrialOutcome",
    "erase",
    "seed_schedule",
    "replay_trial_with_decoder",
    "sim_snc_first_block",
    "sim_snc_latency",
    "sim_mode",
    "__version__",
]
