"""
Tests for channel fusion.
"""

import numpy as np
from django.test import SimpleTestCase

from dataset.fusion import fuse_channels
from treesegnet.exceptions import DataError, ShapeError


class FuseChannelsTests(SimpleTestCase):
    """Test fuse_channels()."""

    def setUp(self):
        rng = np.random.default_rng(2)
        self.rgbir = rng.integers(0, 256, size=(4, 8, 9)).astype(np.uint8)
        self.dsm = rng.normal(40, 5, size=(8, 9)).astype(np.float32)

    def test_rgbir_passthrough(self):
        """Test RGBIR and DSM are stacked verbatim."""
        fused = fuse_channels(self.dsm, rgbir=self.rgbir)
        self.assertEqual(fused.shape, (5, 8, 9))
        np.testing.assert_array_equal(fused[:4], self.rgbir)
        np.testing.assert_array_equal(fused[4], self.dsm)

    def test_rgb_irrg_matches_rgbir(self):
        """Test both routes agree on consistent inputs."""
        rgb = self.rgbir[:3]
        irrg = np.stack([self.rgbir[3], self.rgbir[0], self.rgbir[1]])
        np.testing.assert_array_equal(
            fuse_channels(self.dsm, rgb=rgb, irrg=irrg), fuse_channels(self.dsm, rgbir=self.rgbir)
        )

    def test_rgbir_preferred(self):
        """Test RGBIR wins when every modality is given."""
        rgb = np.zeros((3, 8, 9), dtype=np.uint8)
        fused = fuse_channels(self.dsm, rgb=rgb, irrg=rgb, rgbir=self.rgbir)
        np.testing.assert_array_equal(fused[:4], self.rgbir)

    def test_dsm_not_normalized(self):
        """Test large DSM values pass through unchanged."""
        dsm = np.full((8, 9), 1234.5, dtype=np.float32)
        self.assertEqual(fuse_channels(dsm, rgbir=self.rgbir)[4, 0, 0], np.float32(1234.5))

    def test_missing_dsm(self):
        """Test the DSM is required."""
        with self.assertRaises(DataError):
            fuse_channels(None, rgbir=self.rgbir)

    def test_insufficient_modalities(self):
        """Test RGB alone is not enough."""
        with self.assertRaises(DataError):
            fuse_channels(self.dsm, rgb=self.rgbir[:3])

    def test_dimension_mismatch(self):
        """Test optical and DSM sizes must agree."""
        with self.assertRaises(ShapeError):
            fuse_channels(self.dsm[:4], rgbir=self.rgbir)
