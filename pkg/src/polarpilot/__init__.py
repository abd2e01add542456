"""Pilot selection from coded symbols for systematic polar codes over fading channels."""

from .channel import FadingScenario, gen_rayleigh_block, jakes_autocorr, noise_density, transmit
from .codec import (
    LLR_MAX,
    SCDecoder,
    encode_nonsystematic,
    encode_systematic,
    encode_with_pilots,
    init_llrs,
    polar_transform,
    sc_decode,
)
from .construction import CodeSpec, construct_info_set, validate_code_spec
from .estimation import Estimator, EstimatorConfig, channel_llrs, interpolate_linear, ls_estimate, mmse_estimate
from .gf2 import BitMatrix, IndexSet, is_domination_contiguous, is_involution, kron_power
from .pilots import (
    PilotPlan,
    Scheme,
    compute_D,
    compute_S,
    select_eps,
    select_pilots,
    select_ueps,
    throughput,
    validate_plan,
)
from .simulation import ExperimentConfig, ResultRow, load_config, run_fer, run_mse, write_csv

__version__ = "0.1.0"
