"""
Finite-difference checks for every primitive layer.
"""

import numpy as np
from django.test import SimpleTestCase

from nn import functional as F
from nn.gradcheck import grad_check
from nn.modules import Add, BatchNorm2d, Concat, Conv2d, MaxPool2, ReLU, Sequential, Upsample2
from treesegnet.exceptions import DataError

TOLERANCE = 1e-4


def float64(module, seed=0):
    return module.initialize(seed).astype(np.float64)


class PrimitiveGradientTests(SimpleTestCase):
    """Test grad_check on single layers in 64-bit mode."""

    def setUp(self):
        self.rng = np.random.default_rng(12)

    def test_pointwise_conv_is_exact(self):
        """Test a 1x1 conv, being linear, matches to rounding."""
        conv = float64(Conv2d(3, 4, kernel=1, relu_follows=False))
        result = grad_check(conv, self.rng.standard_normal((2, 3, 4, 4)))
        self.assertLessEqual(result.max_error, 1e-7)

    def test_conv3(self):
        """Test a 3x3 conv."""
        conv = float64(Conv2d(2, 3, kernel=3))
        self.assertTrue(grad_check(conv, self.rng.standard_normal((2, 2, 5, 5))).passed(TOLERANCE))

    def test_grouped_conv(self):
        """Test a grouped 3x3 conv."""
        conv = float64(Conv2d(4, 4, kernel=3, groups=2))
        self.assertTrue(grad_check(conv, self.rng.standard_normal((1, 4, 4, 4))).passed(TOLERANCE))

    def test_conv_relu(self):
        """Test conv3x3 followed by relu."""
        layer = float64(Sequential(Conv2d(2, 3, kernel=3), ReLU()))
        result = grad_check(layer, self.rng.standard_normal((2, 2, 5, 5)), eps=1e-6)
        self.assertTrue(result.passed(TOLERANCE), result.errors)

    def test_maxpool(self):
        """Test pooling on distinct random values."""
        result = grad_check(MaxPool2(), self.rng.standard_normal((2, 2, 4, 6)), eps=1e-6)
        self.assertTrue(result.passed(TOLERANCE))

    def test_maxpool_tie_skipped(self):
        """Test tied maxima are flagged instead of checked."""
        x = self.rng.standard_normal((1, 1, 4, 4))
        x[0, 0, 0, 0] = x[0, 0, 0, 1] = 10.0
        result = grad_check(MaxPool2(), x)
        self.assertTrue(result.skipped)
        self.assertFalse(result.passed(TOLERANCE))

    def test_upsample(self):
        """Test nearest upsampling."""
        self.assertTrue(grad_check(Upsample2(), self.rng.standard_normal((1, 2, 3, 3))).passed(TOLERANCE))

    def test_batchnorm_training(self):
        """Test batch norm with batch statistics."""
        bn = float64(BatchNorm2d(3))
        bn.gamma.set_value(self.rng.uniform(0.5, 1.5, 3))
        bn.beta.set_value(self.rng.standard_normal(3))
        result = grad_check(bn, self.rng.normal(1, 2, size=(2, 3, 3, 3)))
        self.assertTrue(result.passed(TOLERANCE), result.errors)

    def test_batchnorm_eval(self):
        """Test batch norm with running statistics."""
        bn = float64(BatchNorm2d(2)).eval()
        self.assertTrue(grad_check(bn, self.rng.standard_normal((1, 2, 3, 3))).passed(TOLERANCE))

    def test_batchnorm_buffers_restored(self):
        """Test the check leaves running statistics as they were."""
        bn = float64(BatchNorm2d(2))
        grad_check(bn, self.rng.standard_normal((2, 2, 3, 3)))
        np.testing.assert_array_equal(bn.running_mean, np.zeros(2))
        np.testing.assert_array_equal(bn.running_var, np.ones(2))

    def test_add_and_concat(self):
        """Test the two-input layers."""
        a = self.rng.standard_normal((1, 2, 3, 3))
        b = self.rng.standard_normal((1, 2, 3, 3))
        self.assertTrue(grad_check(Add(), (a, b)).passed(TOLERANCE))
        c = self.rng.standard_normal((1, 3, 3, 3))
        self.assertTrue(grad_check(Concat(), (a, c)).passed(TOLERANCE))

    def test_softmax_loss(self):
        """Test the loss gradient against differences of the loss itself."""
        logits = self.rng.standard_normal((2, 6, 3, 3))
        targets = self.rng.integers(1, 7, size=(2, 3, 3))
        conv = float64(Conv2d(6, 6, kernel=1, relu_follows=False))

        def loss(outputs):
            return F.softmax_ce_loss(outputs[0], targets)

        result = grad_check(conv, logits, loss=loss)
        self.assertTrue(result.passed(TOLERANCE), result.errors)

    def test_sampled_entries(self):
        """Test limiting the number of checked entries per tensor."""
        conv = float64(Conv2d(4, 4, kernel=3))
        result = grad_check(conv, self.rng.standard_normal((1, 4, 6, 6)), max_entries_per_tensor=10)
        self.assertTrue(result.passed(TOLERANCE))
        self.assertEqual(set(result.errors), {'input0', 'weight', 'bias'})

    def test_entry_errors_reported(self):
        """Test per-entry relative errors sit beside the tensor-scaled ones."""
        conv = float64(Conv2d(3, 4, kernel=1, relu_follows=False))
        result = grad_check(conv, self.rng.standard_normal((2, 3, 4, 4)))
        self.assertEqual(set(result.entry_errors), set(result.errors))
        self.assertLessEqual(result.max_entry_error, 1e-5)

    def test_wrong_backward_detected(self):
        """Test a backward pass off by a constant factor shows in both errors."""

        class Tripler:
            def forward(self, x):
                return 3.0 * x

            def backward(self, dout):
                return 2.0 * dout

        result = grad_check(Tripler(), self.rng.standard_normal((2, 3)))
        self.assertAlmostEqual(result.max_error, 1 / 3, places=5)
        self.assertAlmostEqual(result.max_entry_error, 1 / 3, places=5)
        self.assertFalse(result.passed(TOLERANCE))

    def test_requires_float64(self):
        """Test 32-bit tensors are refused."""
        conv = Conv2d(1, 1, kernel=1).initialize(0)
        with self.assertRaises(DataError):
            grad_check(conv, np.zeros((1, 1, 2, 2), dtype=np.float32))
