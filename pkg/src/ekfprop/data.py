"""Dataset ingestion and machine-readable outputs.

Readers cover the big-endian IDX image/label pair (pixels normalized to
[0, 1], images flattened row-major) and plain CSV vector files. Writers
emit JSON report documents and plot-ready CSV series; all floats are
serialized as shortest round-trip decimal literals.
"""

import csv
import json
import struct
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, ShapeError

IDX_IMAGE_MAGIC = 2051
IDX_LABEL_MAGIC = 2049

REPORT_FORMAT = "ekfprop-report"
REPORT_VERSION = 1


@dataclass(eq=False)
class LabeledDataset:
    """Flattened input vectors in [0, 1] with integer class labels."""

    vectors: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.vectors = np.ascontiguousarray(self.vectors, dtype=np.float64)
        self.labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        if self.vectors.ndim != 2 or self.labels.ndim != 1:
            raise ShapeError("dataset needs 2-D vectors and 1-D labels")
        if self.vectors.shape[0] != self.labels.shape[0]:
            raise ShapeError(
                f"{self.vectors.shape[0]} vectors but {self.labels.shape[0]} labels"
            )

    def __len__(self):
        return self.vectors.shape[0]


def _read_exact(fh, count, path):
    data = fh.read(count)
    if len(data) != count:
        raise FormatError(f"{path} is truncated")
    return data


def read_idx(images_path, labels_path):
    """Read an IDX image/label pair into a LabeledDataset."""
    with open(images_path, "rb") as fh:
        magic, count, rows, cols = struct.unpack(
            ">IIII", _read_exact(fh, 16, images_path)
        )
        if magic != IDX_IMAGE_MAGIC:
            raise FormatError(
                f"{images_path}: bad magic {magic}, expected {IDX_IMAGE_MAGIC}"
            )
        raw = _read_exact(fh, count * rows * cols, images_path)
    pixels = np.frombuffer(raw, dtype=np.uint8).astype(np.float64) / 255.0
    vectors = pixels.reshape(count, rows * cols)

    with open(labels_path, "rb") as fh:
        magic, label_count = struct.unpack(
            ">II", _read_exact(fh, 8, labels_path)
        )
        if magic != IDX_LABEL_MAGIC:
            raise FormatError(
                f"{labels_path}: bad magic {magic}, expected {IDX_LABEL_MAGIC}"
            )
        labels = np.frombuffer(_read_exact(fh, label_count, labels_path),
                               dtype=np.uint8)
    if label_count != count:
        raise FormatError(
            f"{count} images but {label_count} labels "
            f"({images_path} vs {labels_path})"
        )
    return LabeledDataset(vectors=vectors, labels=labels.astype(np.int64))


def write_idx(images, labels, images_path, labels_path):
    """Write uint8 images (n, rows, cols) and labels (n,) as an IDX pair."""
    images = np.asarray(images, dtype=np.uint8)
    labels = np.asarray(labels, dtype=np.uint8)
    if images.ndim != 3 or labels.ndim != 1 or images.shape[0] != labels.shape[0]:
        raise ShapeError("write_idx expects (n, rows, cols) images and (n,) labels")
    n, rows, cols = images.shape
    with open(images_path, "wb") as fh:
        fh.write(struct.pack(">IIII", IDX_IMAGE_MAGIC, n, rows, cols))
        fh.write(images.tobytes())
    with open(labels_path, "wb") as fh:
        fh.write(struct.pack(">II", IDX_LABEL_MAGIC, n))
        fh.write(labels.tobytes())


def read_vectors_csv(path):
    """Read CSV rows of equal arity into a list of float vectors."""
    vectors = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            try:
                vec = np.array([float(cell) for cell in row])
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: non-numeric cell: {exc}") from exc
            if vectors and vec.shape[0] != vectors[0].shape[0]:
                raise FormatError(
                    f"{path}:{lineno}: row has {vec.shape[0]} cells, "
                    f"expected {vectors[0].shape[0]}"
                )
            vectors.append(vec)
    if not vectors:
        raise FormatError(f"{path} holds no vectors")
    return vectors


def write_report(report, path):
    """Write a report document as JSON (float round trip is exact)."""
    doc = {"format": REPORT_FORMAT, "version": REPORT_VERSION, **report}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, allow_nan=False)
        fh.write("\n")


def read_report(path):
    """Read a report document back into a dict."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"malformed report file {path}: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != REPORT_FORMAT:
        raise FormatError(f"{path} is not a {REPORT_FORMAT} file")
    return doc


def write_plot_data(series, path):
    """Write named per-component series as CSV, one row per component.

    `series` maps column name -> vector; all vectors must share one
    length. Rows carry the component index followed by one cell per
    series, written as round-trip-exact decimal literals.
    """
    names = list(series)
    if not names:
        raise ShapeError("plot data needs at least one series")
    columns = [np.asarray(series[name], dtype=np.float64) for name in names]
    length = columns[0].shape[0]
    for name, col in zip(names, columns):
        if col.ndim != 1 or col.shape[0] != length:
            raise ShapeError(f"series {name!r} does not have length {length}")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index"] + names)
        for i in range(length):
            writer.writerow([i] + [repr(float(col[i])) for col in columns])
