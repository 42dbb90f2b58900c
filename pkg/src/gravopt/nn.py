"""Minimal dense feed-forward network with manual backpropagation.

Hidden layers use ReLU (f(x) = max(0, x)); the final layer is always
identity so the network emits raw logits, and classification loss is the
sparse categorical cross-entropy computed directly from logits with the
log-sum-exp stabilization.
"""

from dataclasses import dataclass

import numpy as np

from .seeding import rng_from

ACTIVATIONS = ("relu", "identity")


@dataclass(frozen=True)
class LayerSpec:
    in_dim: int
    out_dim: int
    activation: str = "relu"

    def __post_init__(self):
        if self.in_dim <= 0 or self.out_dim <= 0:
            raise ValueError(f"layer dims must be positive, got {self.in_dim}x{self.out_dim}")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")


@dataclass
class Model:
    """Ordered dense layers; weights are (out_dim, in_dim), biases (out_dim,)."""

    layers: list
    weights: list
    biases: list
    init_seed: int

    def parameters(self):
        """Flat parameter list [W1, b1, W2, b2, ...] in layer order."""
        out = []
        for W, b in zip(self.weights, self.biases):
            out.append(W)
            out.append(b)
        return out

    @property
    def in_dim(self):
        return self.layers[0].in_dim

    @property
    def out_dim(self):
        return self.layers[-1].out_dim


def model_init(specs, seed):
    """Build a model with weights ~ N(0, 1/in_dim) and zero biases.

    The 1/sqrt(in_dim) scaling keeps pre-activation variance near one at
    init.  Draws come from a PCG64 generator seeded with ``seed``, so the
    same (specs, seed) always yields the same parameters.
    """
    specs = list(specs)
    if not specs:
        raise ValueError("model needs at least one layer")
    for spec, nxt in zip(specs, specs[1:]):
        if spec.out_dim != nxt.in_dim:
            raise ValueError(
                f"layer dims do not chain: {spec.out_dim} followed by {nxt.in_dim}"
            )
    if specs[-1].activation != "identity":
        raise ValueError("final layer must use the identity activation (logits output)")
    rng = rng_from(seed)
    weights = [rng.normal(0.0, 1.0 / np.sqrt(s.in_dim), size=(s.out_dim, s.in_dim))
               for s in specs]
    biases = [np.zeros(s.out_dim) for s in specs]
    return Model(layers=specs, weights=weights, biases=biases, init_seed=int(seed))


def forward(model, X):
    """Logits for a batch X of shape (n, in_dim); pure in (model, X)."""
    acts, _ = _forward_full(model, X)
    return acts[-1]


def loss_and_grads(model, X, labels):
    """Mean cross-entropy from logits plus gradients for every parameter.

    Gradients come back in model.parameters() order [W1, b1, ...].  The
    ReLU backward uses the z > 0 mask (subgradient 0 at the kink).
    """
    X = _check_batch(model, X)
    labels = _check_labels(labels, X.shape[0], model.out_dim)
    acts, zs = _forward_full(model, X)
    logits = acts[-1]
    n = X.shape[0]

    zmax = logits.max(axis=1, keepdims=True)
    lse = zmax + np.log(np.exp(logits - zmax).sum(axis=1, keepdims=True))
    loss = float(np.mean(lse[np.arange(n), 0] - logits[np.arange(n), labels]))

    delta = np.exp(logits - lse)           # softmax probabilities
    delta[np.arange(n), labels] -= 1.0
    delta /= n

    grads = [None] * (2 * len(model.layers))
    for k in range(len(model.layers) - 1, -1, -1):
        grads[2 * k] = delta.T @ acts[k]
        grads[2 * k + 1] = delta.sum(axis=0)
        if k > 0:
            delta = delta @ model.weights[k]
            if model.layers[k - 1].activation == "relu":
                delta = delta * (zs[k - 1] > 0)
    return loss, grads


def accuracy(logits, labels):
    """Fraction of rows whose argmax matches the label.

    Ties break toward the lowest class index (numpy argmax order).
    """
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels)
    if logits.shape[0] != labels.shape[0]:
        raise ValueError(f"{logits.shape[0]} logit rows but {labels.shape[0]} labels")
    if logits.shape[0] == 0:
        raise ValueError("cannot score an empty batch")
    return float(np.mean(np.argmax(logits, axis=1) == labels))


def cross_entropy(logits, labels):
    """Mean -log softmax(logits)[label], log-sum-exp stabilized."""
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels)
    n = logits.shape[0]
    zmax = logits.max(axis=1)
    lse = zmax + np.log(np.exp(logits - zmax[:, None]).sum(axis=1))
    return float(np.mean(lse - logits[np.arange(n), labels]))


def numeric_gradients(model, X, labels, step=1e-6):
    """Central-difference gradients of the mean loss, coordinate by
    coordinate.  O(#params) forward passes — verification only."""
    grads = []
    for P in model.parameters():
        g = np.zeros_like(P)
        flat, out = P.ravel(), g.ravel()
        for j in range(flat.size):
            kept = flat[j]
            flat[j] = kept + step
            hi = cross_entropy(forward(model, X), labels)
            flat[j] = kept - step
            lo = cross_entropy(forward(model, X), labels)
            flat[j] = kept
            out[j] = (hi - lo) / (2.0 * step)
        grads.append(g)
    return grads


def gradient_check(model, X, labels, step=1e-6, floor=1e-3):
    """Worst relative disagreement between analytic and numeric gradients.

    Per coordinate the error is |a - n| / max(|a|, |n|, floor); the floor
    keeps near-zero gradients from inflating finite-difference noise into
    huge ratios.  Returns (worst, per_tensor) where per_tensor lists the
    worst error within each parameter tensor.
    """
    _, analytic = loss_and_grads(model, X, labels)
    numeric = numeric_gradients(model, X, labels, step)
    per_tensor = []
    for a, n in zip(analytic, numeric):
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
        per_tensor.append(float(np.max(np.abs(a - n) / denom)))
    return max(per_tensor), per_tensor


def _forward_full(model, X):
    X = _check_batch(model, X)
    acts = [X]
    zs = []
    h = X
    for spec, W, b in zip(model.layers, model.weights, model.biases):
        z = h @ W.T + b
        zs.append(z)
        h = np.maximum(z, 0.0) if spec.activation == "relu" else z
        acts.append(h)
    return acts, zs


def _check_batch(model, X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.in_dim:
        raise ValueError(
            f"batch shape {X.shape} does not match model input dim {model.in_dim}"
        )
    return X


def _check_labels(labels, n, num_classes):
    labels = np.asarray(labels)
    if labels.shape != (n,):
        raise ValueError(f"labels shape {labels.shape} does not match batch size {n}")
    if n == 0:
        raise ValueError("batch must be non-empty")
    if labels.min() < 0 or labels.max() >= num_classes:
        raise ValueError(
            f"labels must lie in [0, {num_classes}), got range "
            f"[{labels.min()}, {labels.max()}]"
        )
    return labels.astype(np.int64)
