"""Exact recovery of binary node labels from noisy censored edge parities."""
from .decoders import (
    DecodeResult,
    SdpConfig,
    certificate_check,
    local_failure_witnesses,
    ml_bruteforce,
    ml_cost,
    sdp_decode,
    spectral_decode,
    two_path_vote,
)
from .experiments import GraphSpec, SweepResult, TrialConfig, figure_preset, run_sweep, run_trial
from .graph import (
    Graph,
    GraphFormatError,
    cheeger_constant,
    gen_erdos_renyi,
    gen_random_regular,
    load_graph,
    save_graph,
    spectral_lambdas,
)
from .measurement import CensoredMeasurements, certificate_matrix, load_measurements, save_measurements, synthesize
from .numerics import CapExceeded, ConvergenceError, RandomStream, extremal_eig, psd_with_known_null, split_stream
from .thresholds import (
    ThresholdReport,
    cheeger_sufficient_check,
    er_sufficient_check,
    kl_half,
    necessary_bound,
    path_vote_check,
    sdp_er_bound,
    sdp_regular_bound,
)

__version__ = "0.1.0"
