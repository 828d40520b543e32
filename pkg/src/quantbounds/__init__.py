"""Uniform, quantization-aware generalization bounds for models learned from
beta-mixing time series."""

from .bounds import BoundReport, bound_fast, bound_iid, bound_rademacher, bound_slow, decompose
from .exceptions import (
    DivergenceError,
    InfeasibleError,
    InputError,
    MissingDataError,
    QuantBoundsError,
    UnderdeterminedError,
)
from .identify import (
    ClippedLinearRegression,
    FitReport,
    SwitchedLinearRegression,
    fit_ols,
    fit_switched,
)
from .mixing import Feasibility, MixingEnvelope, adjusted_confidences, beta, min_feasible_spacing
from .model_class import (
    ClipSpec,
    LinearModel,
    QuantizedModelClass,
    SwitchedModel,
    UniformGrid,
    class_complexity_nats,
    clip,
    predict_linear,
    predict_switched,
    quantize,
    switched_complexity_lambda,
)
from .resampling import (
    BlockPlan,
    LabeledSeries,
    SpacedPlan,
    block_average_losses,
    empirical_risk,
    make_block_plan,
    make_spaced_plan,
    spaced_empirical_risk,
    switching_loss,
)
from .simulate import Ar1Config, SwitchedConfig, calibrate_noise_from_snr, simulate_ar1, simulate_switched

__version__ = "0.1.0"
