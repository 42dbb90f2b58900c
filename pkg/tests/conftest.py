"""Shared fixtures: tiny IDX file pairs and a small run config."""

import numpy as np
import pytest

from gravopt.data import write_idx_images, write_idx_labels


@pytest.fixture
def tiny_idx_pair(tmp_path):
    """Write a 12-image 4x3 IDX pair; returns (img_path, lbl_path, images, labels)."""
    rng = np.random.default_rng(99)
    images = rng.integers(0, 256, size=(12, 4, 3)).astype(np.uint8)
    labels = rng.integers(0, 3, size=12).astype(np.uint8)
    img_path = tmp_path / "imgs.idx"
    lbl_path = tmp_path / "lbls.idx"
    write_idx_images(img_path, images)
    write_idx_labels(lbl_path, labels)
    return img_path, lbl_path, images, labels


@pytest.fixture
def blob_run_config():
    """Plain-dict run config for a quick synthetic training job."""
    return {
        "model": {"layers": [
            {"in_dim": 20, "out_dim": 16, "activation": "relu"},
            {"in_dim": 16, "out_dim": 5, "activation": "identity"},
        ]},
        "dataset": {"kind": "synthetic", "n": 200, "d": 20, "classes": 5,
                    "spread": 0.08, "seed": 7, "val_n": 100},
        "optimizer": {"name": "gravity"},
        "epochs": 3,
        "batch_size": 32,
        "seed": 1,
    }
