"""
Confusion-matrix accounting and the lower-triangular fold.

Rows are reference (actual) classes and columns are predicted classes, so a
column sum minus the diagonal is a false-positive count and a row sum minus
the diagonal is a false-negative count. Class labels are 1-based throughout
the public API; arrays are indexed from 0 internally.
"""

from dataclasses import dataclass, field

import numpy as np

from treesegnet.exceptions import FormatError, LabelError, ShapeError

CLASS_NAMES = ('imp_surf', 'building', 'low_veg', 'tree', 'car', 'clutter')


def default_class_names(num_classes):
    """Return the ISPRS class names, or numbered names past the sixth class."""
    if num_classes <= len(CLASS_NAMES):
        return CLASS_NAMES[:num_classes]
    return tuple(f'class_{index}' for index in range(1, num_classes + 1))


@dataclass(frozen=True)
class ConfusionMatrix:
    """C x C pixel-count table."""

    counts: np.ndarray
    class_names: tuple = field(default=())

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise ShapeError(f'Confusion matrix must be square, got shape {counts.shape}')
        if counts.shape[0] < 2:
            raise ShapeError('Confusion matrix needs at least 2 classes')
        if (counts < 0).any():
            raise LabelError('Confusion counts must be non-negative', code='negative_count')
        counts.setflags(write=False)
        object.__setattr__(self, 'counts', counts)
        names = tuple(self.class_names) or default_class_names(counts.shape[0])
        if len(names) != counts.shape[0]:
            raise ShapeError(f'Expected {counts.shape[0]} class names, got {len(names)}')
        object.__setattr__(self, 'class_names', names)

    @classmethod
    def zeros(cls, num_classes, class_names=()):
        return cls(np.zeros((num_classes, num_classes), dtype=np.int64), class_names)

    @property
    def num_classes(self):
        return self.counts.shape[0]

    @property
    def total(self):
        return int(self.counts.sum())

    def at(self, reference, predicted):
        """Count of pixels with 1-based reference and predicted labels."""
        return int(self.counts[reference - 1, predicted - 1])

    def merge(self, other):
        """Elementwise sum; used to accumulate confusion across tiles and images."""
        if other.num_classes != self.num_classes:
            raise ShapeError(
                f'Cannot merge {self.num_classes}-class and {other.num_classes}-class matrices'
            )
        return ConfusionMatrix(self.counts + other.counts, self.class_names)

    def transpose(self):
        return ConfusionMatrix(self.counts.T.copy(), self.class_names)

    def normalized(self):
        """Row-normalized rates; rows with no reference pixels stay zero."""
        rows = self.counts.sum(axis=1, keepdims=True)
        rates = np.zeros(self.counts.shape, dtype=np.float64)
        np.divide(self.counts, rows, out=rates, where=rows > 0)
        return rates

    def to_text(self):
        return format_matrix(self.counts)

    def to_dict(self):
        return {
            'class_names': list(self.class_names),
            'counts': self.counts.tolist(),
        }


@dataclass(frozen=True)
class LowerTriangular:
    """Symmetrized confusion; nonzero only strictly below the diagonal."""

    weights: np.ndarray

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.int64)
        if weights.ndim != 2 or weights.shape[0] != weights.shape[1]:
            raise ShapeError(f'Lower-triangular table must be square, got shape {weights.shape}')
        if (weights < 0).any():
            raise LabelError('Fold weights must be non-negative', code='negative_count')
        if np.triu(weights).any():
            raise FormatError('Fold weights must be zero on and above the diagonal')
        weights.setflags(write=False)
        object.__setattr__(self, 'weights', weights)

    @property
    def num_classes(self):
        return self.weights.shape[0]

    def at(self, i, j):
        """Weight between 1-based classes i > j."""
        return int(self.weights[i - 1, j - 1])

    def to_text(self):
        return format_matrix(self.weights)


def confusion_from_maps(reference, prediction, num_classes, class_names=()):
    """Tally (reference, prediction) pixel pairs of two label maps."""
    reference = np.asarray(reference)
    prediction = np.asarray(prediction)
    if reference.shape != prediction.shape:
        raise ShapeError(
            f'Reference shape {reference.shape} does not match prediction shape {prediction.shape}'
        )
    for name, labels in (('reference', reference), ('prediction', prediction)):
        if labels.size and (labels.min() < 1 or labels.max() > num_classes):
            bad = np.argwhere((labels < 1) | (labels > num_classes))[0]
            raise LabelError(
                f'{name} label {int(labels[tuple(bad)])} at {tuple(int(v) for v in bad)} '
                f'is outside [1, {num_classes}]'
            )
    flat = (reference.astype(np.int64).ravel() - 1) * num_classes + (prediction.astype(np.int64).ravel() - 1)
    counts = np.bincount(flat, minlength=num_classes * num_classes)
    return ConfusionMatrix(counts.reshape(num_classes, num_classes), class_names)


def fold_lower_triangular(matrix):
    """b_ij = a_ij + a_ji for i > j; zero elsewhere, diagonal ignored."""
    counts = matrix.counts
    return LowerTriangular(np.tril(counts + counts.T, k=-1))


def format_matrix(table):
    """Whitespace-separated text matrix, one row per line."""
    table = np.asarray(table)
    width = max(len(str(int(value))) for value in table.ravel())
    lines = [' '.join(str(int(value)).rjust(width) for value in row) for row in table]
    return '\n'.join(lines) + '\n'


def parse_matrix(text):
    """Parse a whitespace-separated square integer matrix."""
    rows = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([int(token) for token in line.split()])
        except ValueError:
            raise FormatError('Matrix entries must be integers', position=f'line {line_number}')
    if not rows:
        raise FormatError('Matrix text is empty')
    size = len(rows)
    for line_number, row in enumerate(rows, start=1):
        if len(row) != size:
            raise FormatError(
                f'Expected {size} entries per row, got {len(row)}', position=f'row {line_number}'
            )
    return np.array(rows, dtype=np.int64)
