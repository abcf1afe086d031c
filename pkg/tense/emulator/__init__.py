from tense.emulator.adjust import (
    AdjustedEmulator,
    Prediction,
    PriorSpec,
    TrainingSet,
    adjusted_moments,
    build_emulator,
    joint_adjusted_cov,
    predict,
)
from tense.emulator.sampling import sample_realizations
from tense.emulator.diagnostics import loo_diagnostics
from tense.emulator.likelihood import MleResult, estimate_theta_mle, mle_search, profile_loglik
from tense.emulator.quantiles import quantile_emulate, quantile_targets
