"""Loading, generating, preprocessing and persisting datasets and embeddings."""
from __future__ import annotations

import gzip
import os
import struct
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, InputError

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801


@dataclass
class DataMatrix:
    """An N x D matrix of samples (one per row) with optional integer labels."""

    values: np.ndarray
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise InputError(f"data must be 2-D, got shape {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise InputError("data contains NaN or Inf")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
            if self.labels.shape != (self.n_rows,):
                raise InputError(
                    f"labels have length {self.labels.shape[0]}, expected {self.n_rows}"
                )

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]


@dataclass
class DatasetBundle:
    """A named dataset.

    ``condition_ids`` holds per-row operating conditions (turbofan data) and
    ``sublabels`` a finer ground truth, e.g. the 20 half-clusters of the
    simulated data.
    """

    data: DataMatrix
    name: str
    condition_ids: Optional[np.ndarray] = None
    sublabels: Optional[np.ndarray] = None

    def __post_init__(self):
        for field in ("condition_ids", "sublabels"):
            value = getattr(self, field)
            if value is None:
                continue
            value = np.asarray(value, dtype=np.int64)
            if value.shape != (self.data.n_rows,):
                raise InputError(f"{field} length {len(value)} != {self.data.n_rows} rows")
            setattr(self, field, value)


def _open_maybe_gzip(path):
    path = os.fspath(path)
    if path.endswith(".gz"):
        return gzip.open(path, "rb")
    return open(path, "rb")


def read_csv_header(path) -> Optional[list]:
    """Column names if the first line of ``path`` is a header, else None."""
    try:
        with open(path, encoding="utf-8") as fh:
            first = fh.readline().rstrip("\r\n")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    cells = first.split(",")
    try:
        [float(c) for c in cells]
    except ValueError:
        return cells
    return None


def load_csv(path, has_header: bool = False, label_column: Optional[int] = None) -> DatasetBundle:
    """Read a comma-separated numeric file.

    ``label_column`` (0-based, negative values count from the end) is split
    off as integer labels. Errors name the offending 0-based row and column.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc

    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    lines = [ln.rstrip("\r") for ln in lines]
    if has_header and lines:
        lines = lines[1:]
    if not lines:
        raise InputError(f"{path}: empty file")

    width = None
    rows = []
    for r, line in enumerate(lines):
        cells = line.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise InputError(f"{path}: ragged row {r}: {len(cells)} fields, expected {width}")
        row = []
        for col, cell in enumerate(cells):
            try:
                row.append(float(cell))
            except ValueError:
                raise InputError(f"{path}: unparseable cell at row {r}, column {col}: {cell!r}") from None
        rows.append(row)

    values = np.array(rows, dtype=np.float64)
    labels = None
    if label_column is not None:
        if not -width <= label_column < width:
            raise InputError(f"{path}: label column {label_column} out of range for {width} columns")
        col = label_column % width
        raw = values[:, col]
        if not np.all(raw == np.round(raw)):
            raise InputError(f"{path}: label column {col} holds non-integer values")
        labels = raw.astype(np.int64)
        values = np.delete(values, col, axis=1)
    if not np.all(np.isfinite(values)):
        bad = np.argwhere(~np.isfinite(values))[0]
        raise InputError(f"{path}: non-finite value at row {bad[0]}, column {bad[1]}")
    name = os.path.splitext(os.path.basename(os.fspath(path)))[0]
    return DatasetBundle(DataMatrix(values, labels), name)


def _read_idx(path, expected_magic):
    try:
        with _open_maybe_gzip(path) as fh:
            raw = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if len(raw) < 8:
        raise InputError(f"{path}: truncated IDX header")
    magic = struct.unpack(">I", raw[:4])[0]
    if magic != expected_magic:
        raise InputError(f"{path}: bad IDX magic 0x{magic:08x}, expected 0x{expected_magic:08x}")
    ndim = magic & 0xFF
    header = 4 + 4 * ndim
    if len(raw) < header:
        raise InputError(f"{path}: truncated IDX header")
    dims = struct.unpack(">" + "I" * ndim, raw[4:header])
    size = int(np.prod(dims, dtype=np.int64))
    if len(raw) - header < size:
        raise InputError(f"{path}: truncated payload, {len(raw) - header} of {size} bytes")
    payload = np.frombuffer(raw, dtype=np.uint8, count=size, offset=header)
    return payload.reshape(dims)


def load_idx(images_path, labels_path=None) -> DatasetBundle:
    """Read MNIST-style IDX files (optionally gzip-compressed, by ``.gz`` suffix).

    Images are flattened row-major and kept on the raw 0-255 scale.
    """
    images = _read_idx(images_path, IDX_IMAGES_MAGIC)
    values = images.reshape(images.shape[0], -1).astype(np.float64)
    labels = None
    if labels_path is not None:
        labels = _read_idx(labels_path, IDX_LABELS_MAGIC).astype(np.int64)
        if labels.shape[0] != values.shape[0]:
            raise InputError(
                f"image/label count mismatch: {values.shape[0]} images, {labels.shape[0]} labels"
            )
    name = os.path.basename(os.fspath(images_path)).split(".")[0]
    return DatasetBundle(DataMatrix(values, labels), name)


def write_idx(path, array, labels: bool = False) -> None:
    """Write ``array`` as an unsigned-byte IDX file (used to build fixtures)."""
    array = np.asarray(array, dtype=np.uint8)
    magic = IDX_LABELS_MAGIC if labels else IDX_IMAGES_MAGIC
    if (magic & 0xFF) != array.ndim:
        raise InputError(f"IDX magic 0x{magic:08x} needs {magic & 0xFF} dims, got {array.ndim}")
    blob = struct.pack(">I", magic) + struct.pack(">" + "I" * array.ndim, *array.shape) + array.tobytes()
    opener = gzip.open if os.fspath(path).endswith(".gz") else open
    with opener(path, "wb") as fh:
        fh.write(blob)


def generate_gaussian_clusters(
    n_clusters: int = 10,
    points_per_cluster: int = 100,
    dim: int = 20,
    mean_scale: float = 5.0,
    offset_scale: float = 2.3,
    seed: int = 0,
) -> DatasetBundle:
    """Simulated clusters, each made of two Gaussian halves.

    Cluster ``i`` (1-based) draws its first half around
    ``mean_scale * e_i + offset_scale * e_{n_clusters+i}`` and its second half
    around ``mean_scale * e_i - offset_scale * e_{n_clusters+i}``, all with
    identity covariance. Labels are the cluster numbers 1..n_clusters;
    ``sublabels`` number the halves 1..2*n_clusters.

    Noise comes from ``numpy.random.default_rng(seed)`` (PCG64), drawn as one
    ``(N, dim)`` standard-normal block, so output is reproducible across
    platforms.
    """
    if dim < 2 * n_clusters:
        raise ConfigError(f"dim={dim} is too small for {n_clusters} clusters (need >= {2 * n_clusters})")
    if points_per_cluster % 2:
        raise ConfigError(f"points_per_cluster must be even, got {points_per_cluster}")
    if n_clusters < 1 or points_per_cluster < 2:
        raise ConfigError("need at least one cluster of two points")

    half = points_per_cluster // 2
    n = n_clusters * points_per_cluster
    means = np.zeros((n, dim))
    labels = np.repeat(np.arange(1, n_clusters + 1), points_per_cluster)
    sublabels = np.repeat(np.arange(1, 2 * n_clusters + 1), half)
    for c in range(n_clusters):
        start = c * points_per_cluster
        means[start:start + points_per_cluster, c] = mean_scale
        means[start:start + half, n_clusters + c] = offset_scale
        means[start + half:start + points_per_cluster, n_clusters + c] = -offset_scale
    rng = np.random.default_rng(seed)
    values = means + rng.standard_normal((n, dim))
    return DatasetBundle(DataMatrix(values, labels), "sim", sublabels=sublabels)


def center_by_condition(data: DataMatrix, condition_ids) -> DataMatrix:
    """Subtract each condition's per-column mean from the rows in that condition."""
    ids = np.asarray(condition_ids)
    if ids.shape != (data.n_rows,):
        raise InputError(f"condition_ids length {len(ids)} != {data.n_rows} rows")
    out = data.values.copy()
    for c in np.unique(ids):
        mask = ids == c
        out[mask] -= data.values[mask].mean(axis=0)
    return DataMatrix(out, data.labels)


def write_embedding_csv(embedding, path, labels=None, header: bool = False) -> None:
    """Write one row per point: coordinates, then the label if given.

    Floats use ``repr`` (shortest round-trip form), so reading the file back
    reproduces the coordinates exactly. ``header`` adds a ``y1,...,label``
    line.
    """
    emb = np.asarray(embedding, dtype=np.float64)
    if emb.ndim != 2:
        raise InputError(f"embedding must be 2-D, got shape {emb.shape}")
    if labels is not None:
        labels = np.asarray(labels)
        if labels.shape != (emb.shape[0],):
            raise InputError(f"labels length {len(labels)} != {emb.shape[0]} rows")
    lines = []
    if header:
        names = [f"y{c + 1}" for c in range(emb.shape[1])]
        lines.append(",".join(names + (["label"] if labels is not None else [])))
    for r, row in enumerate(emb.tolist()):
        cells = [repr(x) for x in row]
        if labels is not None:
            cells.append(str(int(labels[r])))
        lines.append(",".join(cells))
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + ("\n" if lines else ""))
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc
