"""
Tests for patch names, the manifest and the train/validation split.
"""

import json
import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from dataset.manifest import (
    DSM,
    GT,
    RGBIR,
    VALIDATION_PATCHES,
    Manifest,
    PatchId,
    build_manifest,
    parse_patch_name,
    scan_directory,
    split_train_val,
)
from treesegnet.exceptions import DataError, FormatError

FIXTURES = Path(__file__).resolve().parent / 'fixtures'


def potsdam_listing():
    return (FIXTURES / 'potsdam_listing.txt').read_text().split()


class ParsePatchNameTests(SimpleTestCase):
    """Test parse_patch_name()."""

    def test_documented_names(self):
        """Test the three name families."""
        self.assertEqual(parse_patch_name('top_potsdam_2_10_RGBIR.tif'), (PatchId(2, 10), RGBIR))
        self.assertEqual(parse_patch_name('dsm_potsdam_07_08.tif'), (PatchId(7, 8), DSM))
        self.assertEqual(parse_patch_name('top_potsdam_7_7_label.tif'), (PatchId(7, 7), GT))

    def test_converted_names(self):
        """Test everything after the first dot is ignored, directories too."""
        self.assertEqual(parse_patch_name('data/top_potsdam_2_10_RGBIR.ir.pgm'), (PatchId(2, 10), RGBIR))
        self.assertEqual(parse_patch_name('dsm_potsdam_07_08.f32r'), (PatchId(7, 8), DSM))

    def test_unrecognized(self):
        """Test other names are rejected."""
        for name in ('readme.txt', 'top_potsdam_2_10_NIR.tif', 'dsm_potsdam_7_8.tif'):
            with self.assertRaises(FormatError):
                parse_patch_name(name)

    def test_patch_id_text(self):
        """Test ids print and parse as R_C."""
        self.assertEqual(str(PatchId(7, 10)), '7_10')
        self.assertEqual(PatchId.parse('7_10'), PatchId(7, 10))


class BuildManifestTests(SimpleTestCase):
    """Test build_manifest()."""

    def test_full_listing(self):
        """Test the full Potsdam listing."""
        manifest = build_manifest(potsdam_listing())
        self.assertEqual(len(manifest), 38)
        self.assertEqual(len(manifest.with_gt()), 24)
        self.assertTrue(manifest.get(PatchId(7, 10)).excluded)
        self.assertEqual(len(manifest.labeled()), 23)
        self.assertEqual(manifest.incomplete(), [])

    def test_gt_column(self):
        """Test exactly the patches with a label file are labeled."""
        listing = potsdam_listing()
        expected = {parse_patch_name(name)[0] for name in listing if '_label' in name}
        manifest = build_manifest(listing)
        self.assertEqual({record.id for record in manifest.with_gt()}, expected)

    def test_empty(self):
        """Test an empty listing gives an empty manifest."""
        self.assertEqual(len(build_manifest([])), 0)

    def test_missing_dsm_flagged(self):
        """Test a record without DSM is incomplete but kept."""
        listing = [name for name in potsdam_listing() if name != 'dsm_potsdam_03_11.tif']
        manifest = build_manifest(listing)
        self.assertEqual(len(manifest), 38)
        self.assertEqual([record.id for record in manifest.incomplete()], [PatchId(3, 11)])
        self.assertEqual(len(manifest.labeled()), 22)

    def test_unknown_files_skipped(self):
        """Test unrelated and sidecar files do not break the manifest."""
        manifest = build_manifest(['notes.txt', 'top_potsdam_2_10_RGB.tfw', 'dsm_potsdam_02_10.tif'])
        self.assertEqual(manifest.skipped, ('notes.txt',))
        self.assertEqual(manifest.records[0].modalities, frozenset({DSM}))

    def test_json_round_trip(self):
        """Test the manifest survives its JSON form."""
        manifest = build_manifest(potsdam_listing())
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / 'manifest.json'
            manifest.save(path)
            loaded = Manifest.load(path)
            self.assertEqual(json.loads(path.read_text())['records'][0]['id'], '2_10')
        self.assertEqual(loaded.to_dict(), manifest.to_dict())

    def test_scan_directory(self):
        """Test scanning a directory of converted files."""
        with tempfile.TemporaryDirectory() as directory:
            for name in ('top_potsdam_2_10_RGBIR.ppm', 'top_potsdam_2_10_RGBIR.ir.pgm', 'dsm_potsdam_02_10.f32r'):
                (Path(directory) / name).write_bytes(b'')
            manifest = scan_directory(directory)
        record = manifest.records[0]
        self.assertTrue(record.complete)
        self.assertEqual(len(record.paths[RGBIR]), 2)

    def test_scan_missing_directory(self):
        """Test a missing directory is a data error."""
        with self.assertRaises(DataError):
            scan_directory('/nonexistent/treesegnet-data')


class SplitTrainValTests(SimpleTestCase):
    """Test split_train_val()."""

    def test_split_sizes(self):
        """Test 18 training and 5 validation patches."""
        train, val = split_train_val(build_manifest(potsdam_listing()))
        self.assertEqual(len(train), 18)
        self.assertEqual(len(val), 5)
        self.assertEqual(
            {record.id for record in val},
            {PatchId(7, 7), PatchId(7, 8), PatchId(7, 9), PatchId(7, 11), PatchId(7, 12)},
        )
        self.assertNotIn(PatchId(7, 10), {record.id for record in train})

    def test_missing_validation_patch(self):
        """Test the error names the missing patch."""
        listing = [name for name in potsdam_listing() if name != 'top_potsdam_7_12_label.tif']
        with self.assertRaises(DataError) as ctx:
            split_train_val(build_manifest(listing))
        self.assertIn('7_12', str(ctx.exception))
        self.assertEqual(ctx.exception.code, 'missing_patch')

    def test_default_validation_ids(self):
        """Test the default validation list."""
        self.assertEqual([str(patch_id) for patch_id in VALIDATION_PATCHES], ['7_7', '7_8', '7_9', '7_11', '7_12'])
