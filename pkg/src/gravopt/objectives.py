"""Analytic test functions with closed-form gradients.

These give the optimizers fast, oracle-checkable terrain: a convex
quadratic valley steep enough to make plain gradient descent diverge at
moderate learning rates, the classic banana-valley function, and a
seeded logistic-regression problem.
"""

from dataclasses import dataclass

import numpy as np

from .seeding import rng_from


@dataclass(frozen=True)
class Objective:
    """Named differentiable function w -> (loss, gradient)."""

    name: str
    dim: int
    evaluate: callable
    known_minimum: tuple = None   # (w_star, loss_star) when known


def quadratic(k, dim=1):
    """L(w) = k/2 * sum(w^2) with gradient k*w; minimum at the origin.

    Gradient descent on this valley diverges whenever |1 - l*k| > 1.
    """
    if not k > 0:
        raise ValueError(f"curvature k must be positive, got {k}")

    def evaluate(w):
        w = np.asarray(w, dtype=np.float64)
        return 0.5 * k * float(np.sum(w * w)), k * w

    return Objective(name=f"quadratic(k={k:g})", dim=dim, evaluate=evaluate,
                     known_minimum=(np.zeros(dim), 0.0))


def rosenbrock():
    """L(w) = (1 - w0)^2 + 100 (w1 - w0^2)^2, minimum (1, 1) -> 0."""

    def evaluate(w):
        w0, w1 = np.asarray(w, dtype=np.float64)
        loss = (1.0 - w0) ** 2 + 100.0 * (w1 - w0 ** 2) ** 2
        grad = np.array([
            -2.0 * (1.0 - w0) - 400.0 * w0 * (w1 - w0 ** 2),
            200.0 * (w1 - w0 ** 2),
        ])
        return float(loss), grad

    return Objective(name="rosenbrock", dim=2, evaluate=evaluate,
                     known_minimum=(np.array([1.0, 1.0]), 0.0))


def logistic_synthetic(n, d, seed):
    """Binary cross-entropy on a seeded margin-separated dataset.

    Features are standard normal with rows nudged along a hidden unit
    direction until every sample clears a 0.25 margin, so a perfectly
    separating weight vector exists while the cloud stays noisy.  At
    w = 0 the loss is ln 2.  The separating direction is recorded in
    known_minimum with loss None (the infimum 0 is not attained).
    """
    if n <= 0 or d <= 0:
        raise ValueError(f"n and d must be positive, got n={n}, d={d}")
    margin = 0.25
    rng = rng_from(seed)
    w_true = rng.normal(size=d)
    w_true /= np.linalg.norm(w_true)
    X = rng.normal(size=(n, d))
    z = X @ w_true
    signs = np.where(z >= 0, 1.0, -1.0)
    short = np.abs(z) < margin
    X[short] += ((margin - np.abs(z[short])) * signs[short])[:, None] * w_true
    y = (X @ w_true > 0).astype(np.float64)

    def evaluate(w):
        w = np.asarray(w, dtype=np.float64)
        s = X @ w
        # log(1 + exp(-|s|)) form keeps the loss finite for any s
        loss = float(np.mean(np.logaddexp(0.0, -s) + (1.0 - y) * s))
        p = 1.0 / (1.0 + np.exp(-np.clip(s, -500, 500)))
        grad = X.T @ (p - y) / n
        return loss, grad

    return Objective(name=f"logistic(n={n},d={d})", dim=d, evaluate=evaluate,
                     known_minimum=(w_true, None))
