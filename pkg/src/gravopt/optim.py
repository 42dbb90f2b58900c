"""Gravity optimizer and reference baselines behind one stepping interface.

The Gravity update treats each parameter tensor W with gradient G as

    m    = 1 / max(abs(G))                 (max-step grad, scalar per tensor)
    zeta = G / (1 + (G / m)^2)             (saturating gradient term)
    bhat = (beta * s + 1) / (s + 2)        (averaging window at step s)
    V   <- bhat * V + (1 - bhat) * zeta
    W   <- W - learning_rate * V

where s counts completed updates, so the very first update averages with
bhat = 0.5 regardless of beta.  |zeta| never exceeds m/2, which caps the
gradient-driven part of any single step at learning_rate * m / 2.

Velocities start as seeded normal draws with standard deviation
alpha / learning_rate, so alpha bounds typical first-step magnitudes.

Baselines (gd, momentum, rmsprop, adam) implement the standard rules with
the hyper-parameter defaults used throughout the benchmark harness.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericError
from .seeding import rng_from

OPTIMIZER_NAMES = ("gravity", "gd", "momentum", "rmsprop", "adam")

#: Sentinel returned by max_step_grad for an all-zero gradient tensor.
ZERO_GRADIENT = math.inf


@dataclass
class GravityConfig:
    """Hyper-parameters of the Gravity optimizer (recommended defaults)."""

    learning_rate: float = 0.1
    alpha: float = 0.01
    beta: float = 0.9

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if not self.alpha > 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")
        if not 0.0 <= self.beta <= 1.0:
            raise ConfigError(f"beta must be in [0, 1], got {self.beta}")


@dataclass
class GravityState:
    """Per-run mutable state: one velocity tensor per parameter tensor."""

    velocities: list
    step_count: int
    config: GravityConfig
    rng_seed: int


def gravity_init(param_shapes, config, seed):
    """Create Gravity state for the given parameter shapes.

    Velocities are i.i.d. normal draws with mean 0 and standard deviation
    alpha / learning_rate from a PCG64 generator seeded with ``seed``
    (numpy's ziggurat normal; identical across platforms for a fixed
    numpy version).  Identical (seed, shapes, config) give bit-identical
    state.
    """
    if isinstance(config, dict):
        config = GravityConfig(**config)
    shapes = [tuple(int(d) for d in shape) for shape in param_shapes]
    if not shapes:
        raise ValueError("param_shapes must not be empty")
    for shape in shapes:
        if len(shape) == 0 or any(d <= 0 for d in shape):
            raise ValueError(f"invalid parameter shape {shape}")
    sigma = config.alpha / config.learning_rate
    rng = rng_from(seed)
    velocities = [rng.normal(0.0, sigma, size=shape) for shape in shapes]
    return GravityState(velocities=velocities, step_count=0, config=config,
                        rng_seed=int(seed))


def beta_hat(beta, s):
    """Step-dependent averaging coefficient (beta * s + 1) / (s + 2).

    Equals 0.5 at s=0 for every beta and tends to beta as s grows; for
    beta >= 0.5 the value stays in [0.5, 1) and is non-decreasing in s.
    """
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must be in [0, 1], got {beta}")
    if s < 0:
        raise ValueError(f"step count must be non-negative, got {s}")
    return (beta * s + 1.0) / (s + 2.0)


def max_step_grad(G):
    """Scalar m = 1 / max(abs(G)) for one gradient tensor.

    Returns the ZERO_GRADIENT sentinel (+inf) when the tensor is all
    zeros; gradient_term turns that into a zero update.
    """
    G = np.asarray(G, dtype=np.float64)
    if G.size == 0:
        raise ValueError("gradient tensor must be non-empty")
    if not np.isfinite(G).all():
        raise NumericError("non-finite value in gradient tensor")
    peak = np.max(np.abs(G))
    if peak == 0.0:
        return ZERO_GRADIENT
    return 1.0 / peak


def gradient_term(G, m):
    """Saturating transform zeta = G / (1 + (G/m)^2), elementwise.

    max(abs(zeta)) <= m/2, with the peak attained at |g| = m.  The
    ZERO_GRADIENT sentinel yields an all-zeros tensor.
    """
    G = np.asarray(G, dtype=np.float64)
    if not math.isfinite(m):
        return np.zeros_like(G)
    if m <= 0:
        raise ValueError(f"max-step grad must be positive, got {m}")
    return G / (1.0 + (G / m) ** 2)


def gravity_step(state, params, grads):
    """Apply one Gravity update to every parameter tensor, in place.

    m is one scalar per tensor (bias vectors count as their own tensor);
    the averaging coefficient uses the number of completed updates, so
    the first call mixes V0 and zeta equally.  Any non-finite result
    aborts with a NumericError naming the offending tensor.
    """
    _check_aligned(params, grads, state.velocities)
    cfg = state.config
    bhat = beta_hat(cfg.beta, state.step_count)
    for i, (W, G) in enumerate(zip(params, grads)):
        try:
            m = max_step_grad(G)
        except NumericError as e:
            raise NumericError(f"{e} (tensor {i})") from None
        zeta = gradient_term(G, m)
        V = state.velocities[i]
        V *= bhat
        V += (1.0 - bhat) * zeta
        W -= cfg.learning_rate * V
        if not np.isfinite(V).all() or not np.isfinite(W).all():
            raise NumericError(f"non-finite value after update (tensor {i})")
    state.step_count += 1


def bias_corrected_velocity(V_prev, zeta, beta, t):
    """Moving average divided by (1 - beta^t), the classic bias correction.

    Provided for comparison only; the default update uses beta_hat
    instead.  beta = 1 would divide by zero and is rejected.  For large
    t the power is taken in log space so the denominator stays exact.
    """
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"beta must be in [0, 1) for bias correction, got {beta}")
    if t < 1:
        raise ValueError(f"t must be a positive integer, got {t}")
    V_prev = np.asarray(V_prev, dtype=np.float64)
    zeta = np.asarray(zeta, dtype=np.float64)
    if beta == 0.0:
        beta_t = 0.0
    elif t > 1000:
        beta_t = math.exp(t * math.log(beta))
    else:
        beta_t = beta ** t
    return (beta * V_prev + (1.0 - beta) * zeta) / (1.0 - beta_t)


def response_curve(l, m, g_values):
    """Single-step response dW(g) = -l * g / (1 + (g/m)^2) per sample.

    Odd in g, peaks in magnitude at |g| = m with value l*m/2, and matches
    plain gradient descent (-l*g) in the small-|g/m| limit.
    """
    if not l > 0:
        raise ValueError(f"learning rate must be positive, got {l}")
    if not m > 0:
        raise ValueError(f"max-step grad must be positive, got {m}")
    return [(float(g), -l * g / (1.0 + (g / m) ** 2)) for g in np.asarray(g_values, dtype=np.float64)]


@dataclass
class BaselineState:
    """State of one reference optimizer (gd, momentum, rmsprop, adam).

    Only the accumulators the kind needs are populated; all start at
    zero.  Defaults follow the benchmark configuration: momentum
    gamma=0.9; rmsprop rho=0.9, eps=1e-7, momentum off; adam beta1=0.9,
    beta2=0.999, eps=1e-7, decay off.
    """

    kind: str
    learning_rate: float
    gamma: float = 0.9
    rho: float = 0.9
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-7
    velocity: list = field(default_factory=list)   # momentum buffer
    sq_avg: list = field(default_factory=list)     # rmsprop running E[G^2]
    moment1: list = field(default_factory=list)    # adam first moment
    moment2: list = field(default_factory=list)    # adam second moment
    step_count: int = 0


def baseline_init(kind, param_shapes, learning_rate, **hyper):
    """Create zeroed state for one of the baseline optimizers."""
    if kind not in ("gd", "momentum", "rmsprop", "adam"):
        raise ConfigError(f"unknown baseline optimizer {kind!r}")
    if not learning_rate > 0:
        raise ConfigError(f"learning_rate must be positive, got {learning_rate}")
    shapes = [tuple(int(d) for d in shape) for shape in param_shapes]
    if not shapes:
        raise ValueError("param_shapes must not be empty")
    state = BaselineState(kind=kind, learning_rate=float(learning_rate), **hyper)
    for name, value in (("gamma", state.gamma), ("rho", state.rho),
                        ("beta1", state.beta1), ("beta2", state.beta2)):
        if not 0.0 <= value < 1.0:
            raise ConfigError(f"{name} must be in [0, 1), got {value}")
    if not state.epsilon > 0:
        raise ConfigError(f"epsilon must be positive, got {state.epsilon}")
    zeros = lambda: [np.zeros(shape) for shape in shapes]
    if kind == "momentum":
        state.velocity = zeros()
    elif kind == "rmsprop":
        state.sq_avg = zeros()
    elif kind == "adam":
        state.moment1 = zeros()
        state.moment2 = zeros()
    return state


def baseline_step(state, params, grads):
    """Apply one update of the baseline optimizer, in place."""
    accum = {"gd": [], "momentum": state.velocity, "rmsprop": state.sq_avg,
             "adam": state.moment1}[state.kind]
    _check_aligned(params, grads, accum or None)
    l = state.learning_rate
    if state.kind == "adam":
        state.step_count += 1
        c1 = 1.0 - state.beta1 ** state.step_count
        c2 = 1.0 - state.beta2 ** state.step_count
    for i, (W, G) in enumerate(zip(params, grads)):
        G = np.asarray(G, dtype=np.float64)
        if state.kind == "gd":
            W -= l * G
        elif state.kind == "momentum":
            v = state.velocity[i]
            v *= state.gamma
            v += G
            W -= l * v
        elif state.kind == "rmsprop":
            E = state.sq_avg[i]
            E *= state.rho
            E += (1.0 - state.rho) * G ** 2
            W -= l * G / (np.sqrt(E) + state.epsilon)
        else:  # adam
            m1, m2 = state.moment1[i], state.moment2[i]
            m1 *= state.beta1
            m1 += (1.0 - state.beta1) * G
            m2 *= state.beta2
            m2 += (1.0 - state.beta2) * G ** 2
            W -= l * (m1 / c1) / (np.sqrt(m2 / c2) + state.epsilon)
        if not np.isfinite(W).all():
            raise NumericError(f"non-finite value after update (tensor {i})")
    if state.kind != "adam":
        state.step_count += 1


def init_optimizer(name, param_shapes, hyper, seed):
    """Uniform constructor used by the harness.

    ``hyper`` holds the optimizer's keyword hyper-parameters (unknown
    keys are rejected).  The seed only matters for gravity's velocity
    draws.
    """
    hyper = dict(hyper or {})
    if name == "gravity":
        try:
            config = GravityConfig(**hyper)
        except TypeError:
            raise ConfigError(f"invalid gravity hyper-parameters {sorted(hyper)}") from None
        return gravity_init(param_shapes, config, seed)
    if name in ("gd", "momentum", "rmsprop", "adam"):
        learning_rate = hyper.pop("learning_rate", 0.1 if name == "gd" else 1e-3)
        allowed = {"gd": set(), "momentum": {"gamma"},
                   "rmsprop": {"rho", "epsilon"},
                   "adam": {"beta1", "beta2", "epsilon"}}[name]
        unknown = set(hyper) - allowed
        if unknown:
            raise ConfigError(f"unknown {name} hyper-parameters {sorted(unknown)}")
        return baseline_init(name, param_shapes, learning_rate, **hyper)
    raise ConfigError(f"unknown optimizer {name!r}")


def optimizer_step(state, params, grads):
    """Dispatch one update step for either optimizer family."""
    if isinstance(state, GravityState):
        gravity_step(state, params, grads)
    else:
        baseline_step(state, params, grads)


def _check_aligned(params, grads, buffers=None):
    if len(params) != len(grads):
        raise ValueError(f"{len(params)} parameter tensors but {len(grads)} gradients")
    if buffers is not None and len(buffers) != len(params):
        raise ValueError(f"{len(params)} parameter tensors but {len(buffers)} state buffers")
    for i, (W, G) in enumerate(zip(params, grads)):
        if np.shape(W) != np.shape(G):
            raise ValueError(
                f"shape mismatch at tensor {i}: params {np.shape(W)} vs grads {np.shape(G)}"
            )
        if buffers is not None and np.shape(buffers[i]) != np.shape(W):
            raise ValueError(
                f"shape mismatch at tensor {i}: params {np.shape(W)} vs state {np.shape(buffers[i])}"
            )
