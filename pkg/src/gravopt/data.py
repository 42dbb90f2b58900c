"""Dataset ingestion (IDX binary format), synthetic data, seeded batching.

IDX files are big-endian: a 4-byte magic (0x00000803 for 3-D image
files, 0x00000801 for 1-D label files), one 4-byte unsigned size per
dimension, then raw unsigned bytes.  Pixels are scaled to [0, 1] by
dividing by 255 and images are flattened row-major.

Relative dataset paths are resolved against the GRAVOPT_DATA_DIR
environment variable when it is set, otherwise against the working
directory.
"""

import os
import struct
from dataclasses import dataclass

import numpy as np

from .errors import FormatError
from .seeding import rng_from, rng_for_epoch

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801

DATA_DIR_ENV = "GRAVOPT_DATA_DIR"


@dataclass
class Dataset:
    """Feature matrix in [0, 1] plus integer labels in [0, num_classes)."""

    features: np.ndarray   # (n, d) float64
    labels: np.ndarray     # (n,) int64
    n: int
    d: int
    num_classes: int


@dataclass(frozen=True)
class BatchPlan:
    batch_size: int
    shuffle_seed: int
    drop_last: bool = False


def resolve_data_path(path):
    """Join a relative path to $GRAVOPT_DATA_DIR when that is set."""
    path = os.fspath(path)
    root = os.environ.get(DATA_DIR_ENV)
    if root and not os.path.isabs(path):
        return os.path.join(root, path)
    return path


def load_idx(images_path, labels_path):
    """Load an image/label IDX file pair into a Dataset.

    Image and label counts must agree; any structural problem raises a
    FormatError naming the byte offset, and no partial dataset escapes.
    """
    images_path = resolve_data_path(images_path)
    labels_path = resolve_data_path(labels_path)
    with open(images_path, "rb") as f:
        raw = f.read()
    count, rows, cols, pixels = _parse_idx_images(raw, images_path)
    with open(labels_path, "rb") as f:
        raw = f.read()
    label_count, labels = _parse_idx_labels(raw, labels_path)
    if label_count != count:
        raise FormatError(
            f"{count} images in {images_path} but {label_count} labels in {labels_path}"
        )
    features = pixels.astype(np.float64).reshape(count, rows * cols) / 255.0
    return _make_dataset(features, labels.astype(np.int64))


def idx_header(path):
    """(magic, dims) of any supported IDX file, validating payload size."""
    path = resolve_data_path(path)
    with open(path, "rb") as f:
        raw = f.read()
    magic = _read_u32(raw, 0, path)
    if magic == IMAGE_MAGIC:
        count, rows, cols, _ = _parse_idx_images(raw, path)
        return magic, (count, rows, cols)
    if magic == LABEL_MAGIC:
        count, _ = _parse_idx_labels(raw, path)
        return magic, (count,)
    raise FormatError(
        f"bad magic 0x{magic:08x} at offset 0 in {path} "
        f"(expected 0x{IMAGE_MAGIC:08x} or 0x{LABEL_MAGIC:08x})"
    )


def write_idx_images(path, images):
    """Write a (n, rows, cols) uint8 array as an IDX image file.

    Intended for tests and local data preparation; inverse of the image
    half of load_idx.
    """
    images = np.ascontiguousarray(images, dtype=np.uint8)
    if images.ndim != 3:
        raise ValueError(f"images must be (n, rows, cols), got shape {images.shape}")
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", IMAGE_MAGIC, *images.shape))
        f.write(images.tobytes())


def write_idx_labels(path, labels):
    """Write a (n,) uint8 label vector as an IDX label file."""
    labels = np.ascontiguousarray(labels, dtype=np.uint8)
    if labels.ndim != 1:
        raise ValueError(f"labels must be one-dimensional, got shape {labels.shape}")
    with open(path, "wb") as f:
        f.write(struct.pack(">II", LABEL_MAGIC, labels.shape[0]))
        f.write(labels.tobytes())


def synthetic_blobs(n, d, num_classes, spread, seed):
    """Seeded Gaussian class clusters clipped to [0, 1].

    Cluster centers are uniform in [0.2, 0.8]^d and class counts are
    balanced within one sample.  spread = 0 collapses each class onto
    its center.
    """
    if num_classes < 2:
        raise ValueError(f"need at least 2 classes, got {num_classes}")
    if n < num_classes:
        raise ValueError(f"need n >= num_classes, got n={n}, num_classes={num_classes}")
    if d <= 0:
        raise ValueError(f"feature dim must be positive, got {d}")
    if spread < 0:
        raise ValueError(f"spread must be non-negative, got {spread}")
    rng = rng_from(seed)
    centers = rng.uniform(0.2, 0.8, size=(num_classes, d))
    base, extra = divmod(n, num_classes)
    chunks, labels = [], []
    for c in range(num_classes):
        count = base + (1 if c < extra else 0)
        chunks.append(centers[c] + rng.normal(0.0, spread, size=(count, d)))
        labels.append(np.full(count, c, dtype=np.int64))
    features = np.clip(np.concatenate(chunks), 0.0, 1.0)
    return _make_dataset(features, np.concatenate(labels))


def subset(dataset, indices):
    """New Dataset holding the rows at ``indices`` (copied, not viewed).

    num_classes carries over from the parent even when the subset misses
    a class, so models sized off either split agree.
    """
    indices = np.asarray(indices, dtype=np.int64)
    if indices.ndim != 1 or indices.size == 0:
        raise ValueError("indices must be a non-empty 1-D sequence")
    if indices.min() < 0 or indices.max() >= dataset.n:
        raise ValueError(
            f"indices must lie in [0, {dataset.n}), got range "
            f"[{indices.min()}, {indices.max()}]"
        )
    return Dataset(features=dataset.features[indices].copy(),
                   labels=dataset.labels[indices].copy(),
                   n=int(indices.size), d=dataset.d,
                   num_classes=dataset.num_classes)


def batches(dataset, plan, epoch_index):
    """Index slices of one epoch: a seeded permutation chunked by batch size.

    The permutation is derived from (shuffle_seed, epoch_index), so every
    epoch reshuffles and the whole schedule replays exactly for the same
    plan.  With drop_last=False the final short batch is kept.
    """
    if plan.batch_size < 1:
        raise ValueError(f"batch_size must be positive, got {plan.batch_size}")
    if plan.batch_size > dataset.n:
        raise ValueError(
            f"batch_size {plan.batch_size} exceeds dataset size {dataset.n}"
        )
    perm = rng_for_epoch(plan.shuffle_seed, epoch_index).permutation(dataset.n)
    out = []
    for start in range(0, dataset.n, plan.batch_size):
        chunk = perm[start:start + plan.batch_size]
        if plan.drop_last and len(chunk) < plan.batch_size:
            break
        out.append(chunk)
    return out


def _make_dataset(features, labels):
    n, d = features.shape
    num_classes = int(labels.max()) + 1 if n else 0
    return Dataset(features=features, labels=labels, n=n, d=d,
                   num_classes=num_classes)


def _read_u32(raw, offset, path):
    if len(raw) < offset + 4:
        raise FormatError(
            f"truncated file {path}: needed 4 bytes at offset {offset}, "
            f"file has {len(raw)}"
        )
    return struct.unpack_from(">I", raw, offset)[0]


def _parse_idx_images(raw, path):
    magic = _read_u32(raw, 0, path)
    if magic != IMAGE_MAGIC:
        raise FormatError(
            f"bad magic 0x{magic:08x} at offset 0 in {path} "
            f"(expected 0x{IMAGE_MAGIC:08x})"
        )
    count = _read_u32(raw, 4, path)
    rows = _read_u32(raw, 8, path)
    cols = _read_u32(raw, 12, path)
    payload = count * rows * cols
    if len(raw) != 16 + payload:
        raise FormatError(
            f"truncated file {path}: expected {payload} pixel bytes at offset 16, "
            f"found {len(raw) - 16}"
        )
    pixels = np.frombuffer(raw, dtype=np.uint8, count=payload, offset=16)
    return count, rows, cols, pixels.reshape(count, rows, cols)


def _parse_idx_labels(raw, path):
    magic = _read_u32(raw, 0, path)
    if magic != LABEL_MAGIC:
        raise FormatError(
            f"bad magic 0x{magic:08x} at offset 0 in {path} "
            f"(expected 0x{LABEL_MAGIC:08x})"
        )
    count = _read_u32(raw, 4, path)
    if len(raw) != 8 + count:
        raise FormatError(
            f"truncated file {path}: expected {count} label bytes at offset 8, "
            f"found {len(raw) - 8}"
        )
    return count, np.frombuffer(raw, dtype=np.uint8, count=count, offset=8)
