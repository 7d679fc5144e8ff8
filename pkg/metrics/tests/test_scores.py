"""
Tests for scores and error maps.
"""

import json

import numpy as np
from django.test import SimpleTestCase

from metrics.confusion import ConfusionMatrix, confusion_from_maps
from metrics.error_map import render_error_map
from metrics.scores import score
from treesegnet.exceptions import DataError, ShapeError


def brute_force_scores(reference, prediction, num_classes):
    """Precision/recall/F1/OA straight from the pixel lists."""
    pairs = list(zip(reference.ravel().tolist(), prediction.ravel().tolist()))
    rows = []
    for label in range(1, num_classes + 1):
        tp = sum(1 for ref, pred in pairs if ref == label and pred == label)
        fp = sum(1 for ref, pred in pairs if ref != label and pred == label)
        fn = sum(1 for ref, pred in pairs if ref == label and pred != label)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        rows.append((tp, fp, fn, precision, recall, f1))
    oa = sum(1 for ref, pred in pairs if ref == pred) / len(pairs)
    return rows, oa


class ScoreTests(SimpleTestCase):
    """Test score()."""

    def test_two_class_hand_case(self):
        """Test the documented 2-class example."""
        report = score(ConfusionMatrix([[3, 1], [2, 4]]))
        first = report.per_class[0]
        self.assertAlmostEqual(first.precision, 0.6)
        self.assertAlmostEqual(first.recall, 0.75)
        self.assertAlmostEqual(first.f1, 0.666667, places=6)
        self.assertAlmostEqual(report.oa, 0.7)

    def test_diagonal_is_perfect(self):
        """Test OA and every F1 are 1 without confusion."""
        report = score(ConfusionMatrix(np.diag([7, 1, 3])))
        self.assertEqual(report.oa, 1.0)
        self.assertTrue(all(item.f1 == 1.0 for item in report.per_class))
        self.assertEqual(report.mean_f1, 1.0)

    def test_absent_class_has_zero_f1(self):
        """Test F1 is 0 rather than NaN when precision + recall is 0."""
        report = score(ConfusionMatrix([[5, 0], [0, 0]]))
        self.assertEqual(report.per_class[1].f1, 0.0)
        self.assertEqual(report.mean_f1, 0.5)

    def test_empty_matrix(self):
        """Test an all-zero matrix cannot be scored."""
        with self.assertRaises(DataError):
            score(ConfusionMatrix.zeros(3))

    def test_matches_brute_force_oracle(self):
        """Test 100 random map pairs against the pixel-list oracle."""
        rng = np.random.default_rng(2024)
        for _ in range(100):
            shape = tuple(rng.integers(1, 12, size=2))
            reference = rng.integers(1, 7, size=shape)
            prediction = np.where(rng.random(shape) < 0.6, reference, rng.integers(1, 7, size=shape))
            report = score(confusion_from_maps(reference, prediction, 6))
            rows, oa = brute_force_scores(reference, prediction, 6)
            self.assertEqual(report.oa, oa)
            for item, (tp, fp, fn, precision, recall, f1) in zip(report.per_class, rows):
                self.assertEqual((item.tp, item.fp, item.fn), (tp, fp, fn))
                self.assertEqual(item.precision, precision)
                self.assertEqual(item.recall, recall)
                self.assertEqual(item.f1, f1)

    def test_oa_is_fraction_of_equal_pixels(self):
        """Test OA equals the share of agreeing pixels."""
        rng = np.random.default_rng(4)
        reference = rng.integers(1, 7, size=(20, 20))
        prediction = rng.integers(1, 7, size=(20, 20))
        report = score(confusion_from_maps(reference, prediction, 6))
        self.assertEqual(report.oa, float((reference == prediction).mean()))

    def test_permutation_equivariance(self):
        """Test relabeling classes permutes per-class scores only."""
        rng = np.random.default_rng(6)
        counts = rng.integers(0, 30, size=(6, 6))
        permutation = rng.permutation(6)
        original = score(ConfusionMatrix(counts))
        permuted = score(ConfusionMatrix(counts[np.ix_(permutation, permutation)]))
        self.assertAlmostEqual(original.oa, permuted.oa)
        self.assertAlmostEqual(original.mean_f1, permuted.mean_f1)
        for new_index, old_index in enumerate(permutation):
            self.assertAlmostEqual(permuted.per_class[new_index].f1, original.per_class[old_index].f1)

    def test_scores_bounded(self):
        """Test every rate lies in [0, 1]."""
        counts = np.random.default_rng(7).integers(0, 10, size=(6, 6))
        report = score(ConfusionMatrix(counts))
        for item in report.per_class:
            for value in (item.precision, item.recall, item.f1):
                self.assertGreaterEqual(value, 0.0)
                self.assertLessEqual(value, 1.0)
        self.assertLessEqual(report.oa, 1.0)
        self.assertLessEqual(report.mean_f1, 1.0)


class ReportFormatTests(SimpleTestCase):
    """Test text and JSON serialization of a ScoreReport."""

    def setUp(self):
        self.report = score(ConfusionMatrix(np.diag([5, 5, 5, 5, 5, 5])))

    def test_text_footer(self):
        """Test the text table ends with OA and mean F1."""
        lines = self.report.to_text().splitlines()
        self.assertEqual(len(lines), 1 + 6 + 2)
        self.assertTrue(lines[1].startswith('imp_surf'))
        self.assertEqual(lines[-2], 'OA 1.0000')
        self.assertEqual(lines[-1], 'mean F1 1.0000')

    def test_json_document(self):
        """Test the JSON document carries all fields."""
        document = json.loads(self.report.to_json())
        self.assertEqual(document['oa'], 1.0)
        self.assertEqual(len(document['per_class']), 6)
        self.assertEqual(document['per_class'][3]['name'], 'tree')

    def test_table_row(self):
        """Test the benchmark-table row layout."""
        self.assertEqual(
            self.report.table_row('toy'),
            'toy 100.0 100.0 100.0 100.0 100.0 100.0 100.0 100.0',
        )


class ErrorMapTests(SimpleTestCase):
    """Test render_error_map."""

    def test_all_correct_is_green(self):
        """Test a perfect prediction renders green everywhere."""
        labels = np.full((3, 4), 2)
        image = render_error_map(labels, labels)
        self.assertTrue((image == (0, 255, 0)).all())

    def test_all_wrong_is_red(self):
        """Test a fully wrong prediction renders red everywhere."""
        image = render_error_map(np.full((3, 3), 1), np.full((3, 3), 2))
        self.assertTrue((image == (255, 0, 0)).all())

    def test_single_error_location(self):
        """Test exactly one red pixel at the wrong coordinate."""
        reference = np.array([[1, 2], [3, 4]])
        prediction = np.array([[1, 2], [5, 4]])
        image = render_error_map(reference, prediction)
        red = np.argwhere((image == (255, 0, 0)).all(axis=-1))
        np.testing.assert_array_equal(red, [[1, 0]])

    def test_dimension_mismatch(self):
        """Test maps of different shapes are rejected."""
        with self.assertRaises(ShapeError):
            render_error_map(np.ones((2, 2)), np.ones((3, 2)))
