"""Matplotlib renderings of run artifacts, written next to the CSVs.

Everything here uses the Agg backend so rendering works headless; no
function depends on an interactive display.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render_curve_png(points, path):
    """Plot the single-step response curve next to plain gradient descent.

    points: iterable of (gradient, gravity_dw, gd_dw) triples.
    """
    gs = [p[0] for p in points]
    kin = [p[1] for p in points]
    gd = [p[2] for p in points]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(gs, kin, label="gravity", color="tab:blue")
    ax.plot(gs, gd, label="gd", color="tab:gray", linestyle="--")
    ax.set_xlabel("gradient")
    ax.set_ylabel("parameter step")
    ax.set_title("single-step response")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_training_png(log, path, title=None):
    """2x2 panel of train/val loss and accuracy over epochs."""
    epochs = [r.epoch for r in log.records]
    panels = [
        ("train loss", [r.train_loss for r in log.records]),
        ("train accuracy", [r.train_acc for r in log.records]),
        ("val loss", [r.val_loss for r in log.records]),
        ("val accuracy", [r.val_acc for r in log.records]),
    ]
    fig, axes = plt.subplots(2, 2, figsize=(9.6, 7.0))
    for ax, (name, ys) in zip(axes.flat, panels):
        ax.plot(epochs, ys, color="tab:blue")
        ax.set_xlabel("epoch")
        ax.set_title(name)
        ax.grid(True, alpha=0.3)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_comparison_png(labels, logs, path):
    """Overlay validation loss and accuracy for several runs."""
    fig, (ax_loss, ax_acc) = plt.subplots(1, 2, figsize=(11.0, 4.4))
    for label, log in zip(labels, logs):
        epochs = [r.epoch for r in log.records]
        ax_loss.plot(epochs, [r.val_loss for r in log.records], label=label)
        ax_acc.plot(epochs, [r.val_acc for r in log.records], label=label)
    ax_loss.set_xlabel("epoch")
    ax_loss.set_ylabel("val loss")
    ax_acc.set_xlabel("epoch")
    ax_acc.set_ylabel("val accuracy")
    for ax in (ax_loss, ax_acc):
        ax.grid(True, alpha=0.3)
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
