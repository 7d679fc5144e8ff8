"""
Scalar evaluation scores derived from a confusion matrix.
"""

import json
from dataclasses import asdict, dataclass

import numpy as np

from treesegnet.exceptions import DataError


def _ratio(numerator, denominator):
    return numerator / denominator if denominator > 0 else 0.0


@dataclass(frozen=True)
class ClassScore:
    """Per-class counts and rates."""

    name: str
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class ScoreReport:
    """Per-class scores plus overall accuracy and unweighted mean F1."""

    per_class: tuple
    oa: float
    mean_f1: float

    def to_text(self):
        """Plain-text table: one row per class, OA and mean F1 footer."""
        width = max(len('class'), *(len(score.name) for score in self.per_class))
        lines = [f"{'class'.ljust(width)}  precision  recall      f1"]
        for score in self.per_class:
            lines.append(
                f'{score.name.ljust(width)}  {score.precision:9.4f}  {score.recall:6.4f}  {score.f1:6.4f}'
            )
        lines.append(f'OA {self.oa:.4f}')
        lines.append(f'mean F1 {self.mean_f1:.4f}')
        return '\n'.join(lines) + '\n'

    def table_row(self, label):
        """Benchmark-table layout: per-class F1 x100, then OA and mean F1 x100."""
        cells = [f'{score.f1 * 100:.1f}' for score in self.per_class]
        cells.append(f'{self.oa * 100:.1f}')
        cells.append(f'{self.mean_f1 * 100:.1f}')
        return ' '.join([label, *cells])

    def to_dict(self):
        return {
            'per_class': [asdict(score) for score in self.per_class],
            'oa': self.oa,
            'mean_f1': self.mean_f1,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + '\n'


def score(matrix):
    """Precision, recall and F1 per class; OA as trace over total."""
    counts = matrix.counts
    total = int(counts.sum())
    if total <= 0:
        raise DataError('Cannot score an empty confusion matrix', code='empty_matrix')

    diagonal = np.diag(counts)
    column_sums = counts.sum(axis=0)
    row_sums = counts.sum(axis=1)

    per_class = []
    for index, name in enumerate(matrix.class_names):
        tp = int(diagonal[index])
        fp = int(column_sums[index]) - tp
        fn = int(row_sums[index]) - tp
        precision = _ratio(tp, tp + fp)
        recall = _ratio(tp, tp + fn)
        f1 = _ratio(2 * precision * recall, precision + recall)
        per_class.append(ClassScore(name, tp, fp, fn, precision, recall, f1))

    oa = int(diagonal.sum()) / total
    mean_f1 = sum(item.f1 for item in per_class) / len(per_class)
    return ScoreReport(tuple(per_class), oa, mean_f1)
