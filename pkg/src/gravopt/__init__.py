"""Bounded-step gradient optimization with a reproducible training harness.

The core update bounds every parameter step by learning_rate * m / 2,
where m adapts to the largest gradient entry of each tensor, and blends
steps through a moving average whose coefficient ramps from 0.5 toward
beta as training progresses.  Reference optimizers (gd, momentum,
rmsprop, adam), a small manually-differentiated MLP, IDX/synthetic data
loading, and a deterministic train/compare harness round out the
package; the ``gravopt`` command exposes it all from the shell.
"""

from .data import (
    BatchPlan,
    Dataset,
    batches,
    idx_header,
    load_idx,
    subset,
    synthetic_blobs,
    write_idx_images,
    write_idx_labels,
)
from .errors import ConfigError, FormatError, NumericError
from .harness import (
    MetricsLog,
    RunConfig,
    compare,
    config_hash,
    evaluate,
    load_run_config,
    parse_run_config,
    train,
    write_metrics_csv,
)
from .nn import (
    LayerSpec,
    Model,
    accuracy,
    forward,
    gradient_check,
    loss_and_grads,
    model_init,
)
from .objectives import Objective, logistic_synthetic, quadratic, rosenbrock
from .optim import (
    BaselineState,
    GravityConfig,
    GravityState,
    baseline_init,
    baseline_step,
    beta_hat,
    bias_corrected_velocity,
    gradient_term,
    gravity_init,
    gravity_step,
    init_optimizer,
    max_step_grad,
    optimizer_step,
    response_curve,
)
from .seeding import derive_subseed, rng_for_epoch, rng_from

__version__ = "0.1.0"

__all__ = [
    "BatchPlan", "Dataset", "batches", "idx_header", "load_idx",
    "subset", "synthetic_blobs", "write_idx_images", "write_idx_labels",
    "ConfigError", "FormatError", "NumericError",
    "MetricsLog", "RunConfig", "compare", "config_hash", "evaluate",
    "load_run_config", "parse_run_config", "train", "write_metrics_csv",
    "LayerSpec", "Model", "accuracy", "forward", "gradient_check",
    "loss_and_grads", "model_init",
    "Objective", "logistic_synthetic", "quadratic", "rosenbrock",
    "BaselineState", "GravityConfig", "GravityState", "baseline_init",
    "baseline_step", "beta_hat", "bias_corrected_velocity",
    "gradient_term", "gravity_init", "gravity_step", "init_optimizer",
    "max_step_grad", "optimizer_step", "response_curve",
    "derive_subseed", "rng_for_epoch", "rng_from",
]
