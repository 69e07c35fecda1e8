"""Dataset container, CSV ingestion, and the coordinate precision constant.

The precision constant is the per-coordinate cost, in nats, of writing down
one centroid coordinate: the information needed to address ``range / gap``
distinguishable values, where ``gap`` is the smallest difference between any
two distinct scalars occurring anywhere in the data.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

# Cost of one degenerate coordinate (constant or single-valued data): one
# standard single-precision float, in nats.
DEGENERATE_COORD_COST = 32.0 * math.log(2.0)


class CsvFormatError(ValueError):
    """Malformed CSV input; message names the offending row/column."""


@dataclass(frozen=True)
class Dataset:
    """An n-by-d matrix of finite feature values.

    The array is float64, C-contiguous, and marked read-only so instances can
    be shared freely across threads.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise ValueError(f"points must be 2-dimensional, got shape {pts.shape}")
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError(f"need at least one row and one column, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points contain NaN or infinite values")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class LabelledDataset:
    """A dataset plus one integer class id per row (dense, 0..n_classes-1)."""

    data: Dataset
    labels: np.ndarray

    def __post_init__(self):
        labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        if labels.shape != (self.data.n,):
            raise ValueError(
                f"labels length {labels.shape} does not match dataset size {self.data.n}"
            )
        labels.flags.writeable = False
        object.__setattr__(self, "labels", labels)

    @property
    def n_classes(self) -> int:
        return int(self.labels.max()) + 1


@dataclass(frozen=True)
class PrecisionInfo:
    """Derived floating-point resolution of a dataset.

    ``bits_per_coord`` is ln(value_range / min_gap) in nats, or the
    degenerate fallback (one 32-bit float) when the data has fewer than two
    distinct values.
    """

    min_gap: float
    value_range: float
    bits_per_coord: float


def precision_info(data: Dataset) -> PrecisionInfo:
    """Smallest scalar gap, value range, and per-coordinate cost in nats.

    The gap is taken over the flattened scalar multiset: all coordinates of
    all points pooled together.
    """
    values = np.unique(data.points)  # sorted distinct scalars
    if values.size < 2:
        return PrecisionInfo(min_gap=0.0, value_range=0.0, bits_per_coord=DEGENERATE_COORD_COST)
    min_gap = float(np.diff(values).min())
    value_range = float(values[-1] - values[0])
    if min_gap <= 0.0 or value_range <= 0.0:
        # Distinct floats can produce a zero diff only through underflow.
        return PrecisionInfo(min_gap=min_gap, value_range=value_range,
                             bits_per_coord=DEGENERATE_COORD_COST)
    return PrecisionInfo(min_gap=min_gap, value_range=value_range,
                         bits_per_coord=math.log(value_range / min_gap))


def load_csv(path, label_column=None, has_header=False):
    """Load a comma-separated file of reals, optionally with a label column.

    Parameters
    ----------
    path : str or Path
        File to read.
    label_column : int, str, or None
        Column holding class labels, as a zero-based index or, when
        ``has_header`` is set, a header name. Label values are mapped to
        dense integers in order of first appearance.
    has_header : bool
        Skip and (for name lookups) parse the first line as a header.

    Returns
    -------
    Dataset or LabelledDataset
        LabelledDataset when ``label_column`` is given.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]  # tolerate trailing blank lines
    if not rows:
        raise CsvFormatError(f"{path}: file is empty")

    header = None
    if has_header:
        header = [cell.strip() for cell in rows[0]]
        rows = rows[1:]
        if not rows:
            raise CsvFormatError(f"{path}: no data rows after header")

    label_idx = _resolve_label_column(path, label_column, header, len(rows[0]))

    width = len(rows[0])
    features = []
    raw_labels = []
    for i, row in enumerate(rows):
        rownum = i + 1 + (1 if has_header else 0)  # 1-based, counting the header
        if len(row) != width:
            raise CsvFormatError(
                f"{path}: ragged row {rownum}: expected {width} cells, got {len(row)}"
            )
        feat = []
        for j, cell in enumerate(row):
            if j == label_idx:
                raw_labels.append(cell.strip())
                continue
            try:
                value = float(cell)
            except ValueError:
                raise CsvFormatError(
                    f"{path}: row {rownum}, column {j}: cannot parse {cell.strip()!r} as a number"
                ) from None
            if not math.isfinite(value):
                raise CsvFormatError(
                    f"{path}: row {rownum}, column {j}: non-finite value {cell.strip()!r}"
                )
            feat.append(value)
        features.append(feat)

    if not features or not features[0]:
        raise CsvFormatError(f"{path}: no feature columns")
    data = Dataset(np.asarray(features, dtype=np.float64))

    if label_idx is None:
        return data
    seen = {}
    labels = np.empty(len(raw_labels), dtype=np.int64)
    for i, value in enumerate(raw_labels):
        labels[i] = seen.setdefault(value, len(seen))
    return LabelledDataset(data=data, labels=labels)


def _resolve_label_column(path, label_column, header, width):
    if label_column is None:
        return None
    if isinstance(label_column, str) and not label_column.lstrip("-").isdigit():
        if header is None:
            raise CsvFormatError(
                f"{path}: label column {label_column!r} given by name but file has no header"
            )
        try:
            return header.index(label_column)
        except ValueError:
            raise CsvFormatError(
                f"{path}: label column {label_column!r} not found in header {header}"
            ) from None
    idx = int(label_column)
    if not 0 <= idx < width:
        raise CsvFormatError(f"{path}: label column index {idx} out of range for width {width}")
    return idx
