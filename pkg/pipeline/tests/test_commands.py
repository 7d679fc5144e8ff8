"""
Tests for the pipeline management commands.
"""

import json
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase

from dataset import formats
from trainer.models import TrainingRun
from trainer.rundir import RunDirectory

TOY_CONFIG = {
    'tile_size': 16, 'margin': 2, 'K': 4, 'depth': 2, 'base_channels': [4, 6], 'cardinality': 2,
    'bottleneck': 4, 'unit_channels': 4, 'epochs': 1, 'batch_size': 4, 'passes': 2,
    'train_scenes': 2, 'train_tiles': 8, 'val_scenes': 1, 'scene_size': 32, 'workers': 1,
}


class CommandTestCase(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def call(self, name, *args):
        out = StringIO()
        call_command(name, *[str(arg) for arg in args], stdout=out)
        return out.getvalue()

    def assertFails(self, returncode, name, *args):
        with self.assertRaises(CommandError) as ctx:
            self.call(name, *args)
        self.assertEqual(ctx.exception.returncode, returncode, str(ctx.exception))
        self.assertNotIn('\n', str(ctx.exception))
        return str(ctx.exception)

    def write(self, name, text):
        path = self.root / name
        path.write_text(text)
        return path


class TreecutCommandTests(CommandTestCase):
    """Test the treecut command."""

    def test_triangle_fold(self):
        """Test the triangle example splits off {3} as the left child."""
        path = self.write('fold.txt', '0 0 0\n3 0 0\n1 2 0\n')
        self.assertEqual(self.call('treecut', '--matrix', path).strip(), '(3,(1,2))')

    def test_full_confusion_is_folded(self):
        path = self.write('confusion.txt', '10 1 0\n2 10 1\n1 1 10\n')
        self.assertEqual(self.call('treecut', '--matrix', path).strip(), '(3,(1,2))')

    def test_trace_and_verify(self):
        path = self.write('fold.txt', '0 0 0\n3 0 0\n1 2 0\n')
        lines = self.call('treecut', '--matrix', path, '--trace', '--verify').splitlines()
        self.assertEqual(lines[0], '(3,(1,2))')
        self.assertEqual(lines[1:3], ['removed 3-1 1', 'removed 3-2 2'])
        self.assertEqual(lines[-1], 'trace ok')

    def test_missing_file(self):
        """Test a missing input is a data error naming the file."""
        message = self.assertFails(2, 'treecut', '--matrix', self.root / 'absent.txt')
        self.assertIn('absent.txt', message)

    def test_malformed_matrix(self):
        path = self.write('bad.txt', '0 0\n3 x\n')
        message = self.assertFails(2, 'treecut', '--matrix', path)
        self.assertTrue(message.startswith('format[format]'), message)

    def test_missing_flag(self):
        """Test a missing required flag is a usage error."""
        self.assertFails(1, 'treecut')


class EvalCommandTests(CommandTestCase):
    """Test the eval command."""

    def setUp(self):
        super().setUp()
        labels = np.random.default_rng(0).integers(1, 7, size=(12, 10)).astype(np.uint8)
        self.ref = self.root / 'ref.pgm'
        formats.write_pgm(self.ref, labels)
        self.labels = labels

    def test_perfect_prediction(self):
        output = self.call('eval', '--ref', self.ref, '--pred', self.ref)
        self.assertIn('OA 1.0000', output)
        self.assertIn('mean F1 1.0000', output)

    def test_json(self):
        wrong = self.root / 'pred.pgm'
        shifted = self.labels.copy()
        shifted[0, :] = shifted[0, :] % 6 + 1
        formats.write_pgm(wrong, shifted)
        report = json.loads(self.call('eval', '--ref', self.ref, '--pred', wrong, '--json'))
        self.assertAlmostEqual(report['oa'], 1 - 10 / 120)
        self.assertEqual(len(report['per_class']), 6)

    def test_error_map(self):
        path = self.root / 'errors.ppm'
        self.call('eval', '--ref', self.ref, '--pred', self.ref, '--error-map', path)
        planes = formats.read_ppm(path)
        self.assertTrue(np.all(planes[1] == 255))

    def test_shape_mismatch(self):
        other = self.root / 'small.pgm'
        formats.write_pgm(other, self.labels[:5])
        message = self.assertFails(2, 'eval', '--ref', self.ref, '--pred', other)
        self.assertTrue(message.startswith('shape['), message)

    def test_needs_one_prediction_source(self):
        self.assertFails(1, 'eval', '--ref', self.ref)


class ImageCommandTests(CommandTestCase):
    """Test synth, fuse, augment, tile and stitch."""

    def test_synth_is_deterministic(self):
        first = self.root / 'a'
        second = self.root / 'b'
        self.call('synth', '--out', first, '--count', 2, '--size', 32, '--seed', 3)
        self.call('synth', '--out', second, '--count', 2, '--size', 32, '--seed', 3)
        names = sorted(path.name for path in first.iterdir())
        self.assertEqual(len(names), 8)
        for name in names:
            self.assertEqual((first / name).read_bytes(), (second / name).read_bytes(), name)
        image = np.load(first / 'scene_000.npy')
        self.assertEqual(image.shape, (5, 32, 32))

    def test_fuse(self):
        rng = np.random.default_rng(1)
        rgb = rng.integers(0, 256, size=(3, 6, 7)).astype(np.uint8)
        irrg = rng.integers(0, 256, size=(3, 6, 7)).astype(np.uint8)
        dsm = rng.random((6, 7)).astype(np.float32) * 30
        formats.write_ppm(self.root / 'rgb.ppm', rgb)
        formats.write_ppm(self.root / 'irrg.ppm', irrg)
        formats.write_f32r(self.root / 'dsm.f32r', dsm)
        out = self.root / 'fused.npy'
        self.call('fuse', '--dsm', self.root / 'dsm.f32r', '--rgb', self.root / 'rgb.ppm',
                  '--irrg', self.root / 'irrg.ppm', '--out', out)
        fused = np.load(out)
        self.assertEqual(fused.shape, (5, 6, 7))
        np.testing.assert_array_equal(fused[:3], rgb)
        np.testing.assert_array_equal(fused[3], irrg[0])
        np.testing.assert_array_equal(fused[4], dsm)

    def test_fuse_needs_optical(self):
        formats.write_f32r(self.root / 'dsm.f32r', np.zeros((4, 4), dtype=np.float32))
        self.assertFails(1, 'fuse', '--dsm', self.root / 'dsm.f32r', '--out', self.root / 'f.npy')

    def test_augment_writes_36_pairs(self):
        self.call('synth', '--out', self.root / 'scene', '--size', 40, '--seed', 0)
        out = self.root / 'aug'
        output = self.call(
            'augment', '--in', self.root / 'scene' / 'scene_000.npy',
            '--labels', self.root / 'scene' / 'scene_000_labels.pgm', '--out', out,
        )
        self.assertIn('36 pairs', output)
        self.assertEqual(len(list(out.glob('rot_*_labels.pgm'))), 36)
        self.assertEqual(len(list(out.glob('rot_*.npy'))), 36)
        self.assertEqual(np.load(out / 'rot_000.npy').shape, (5, 40, 40))

    def test_tile_then_stitch(self):
        """Test tiling and stitching return the original image."""
        image = np.random.default_rng(2).random((3, 37, 29)).astype(np.float32)
        source = self.root / 'image.npy'
        np.save(source, image)
        tiles = self.root / 'tiles'
        self.call('tile', '--in', source, '--out', tiles, '--tile-size', 16, '--margin', 2)
        plan = json.loads((tiles / 'plan.json').read_text())
        self.assertEqual(len(list(tiles.glob('tile_*.npy'))), len(plan['origins']))
        out = self.root / 'stitched.npy'
        self.call('stitch', '--in', tiles, '--out', out)
        np.testing.assert_allclose(np.load(out), image, atol=1e-6)

    def test_stitch_without_plan(self):
        (self.root / 'empty').mkdir()
        self.assertFails(2, 'stitch', '--in', self.root / 'empty', '--out', self.root / 'x.npy')


class TrainPredictCommandTests(TestCase):
    """Test train, predict and eval with a checkpoint."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)
        self.config = self.root / 'toy.json'
        self.config.write_text(json.dumps(TOY_CONFIG))

    def tearDown(self):
        self.tmp.cleanup()

    def call(self, name, *args):
        out = StringIO()
        call_command(name, *[str(arg) for arg in args], stdout=out)
        return out.getvalue()

    def test_train_predict_eval(self):
        run_dir = self.root / 'run'
        output = self.call('train', '--config', self.config, '--run-dir', run_dir)
        self.assertIn('pass 0: tree none', output)
        self.assertTrue((run_dir / 'transcript.json').is_file())

        run = TrainingRun.objects.get()
        self.assertIn(run.status, ('converged', 'stopped'))
        self.assertEqual(run.passes.count(), len(json.loads((run_dir / 'transcript.json').read_text())['passes']))

        self.call('synth', '--out', self.root / 'scene', '--size', 32, '--split', 'val', '--seed', 0)
        scene = self.root / 'scene' / 'scene_000.npy'
        labels = self.root / 'pred.pgm'
        self.call('predict', '--config', self.config, '--checkpoint', run_dir, '--in', scene, '--out', labels,
                  '--workers', 2)
        predicted = formats.read_pgm(labels)
        self.assertEqual(predicted.shape, (32, 32))
        self.assertTrue(1 <= predicted.min() and predicted.max() <= 6)

        output = self.call('eval', '--config', self.config, '--ref', self.root / 'scene' / 'scene_000_labels.pgm',
                           '--checkpoint', run_dir, '--image', scene, '--json')
        self.assertTrue(0.0 <= json.loads(output)['oa'] <= 1.0)

    def test_depth_flag_alone(self):
        """Test --depth works without --base-channels."""
        toy = {key: value for key, value in TOY_CONFIG.items() if key not in ('depth', 'base_channels')}
        self.config.write_text(json.dumps(dict(toy, passes=1)))
        run_dir = self.root / 'shallow'
        self.call('train', '--config', self.config, '--run-dir', run_dir, '--depth', 2)
        self.assertEqual(RunDirectory(run_dir).read_config().network.base_channels, (16, 32))

    def test_base_channels_flag(self):
        """Test --base-channels with a mismatched depth exits with a data error."""
        with self.assertRaises(CommandError) as ctx:
            self.call('train', '--config', self.config, '--base-channels', '4,6,8')
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn('base_channels', str(ctx.exception))

    def test_resume_needs_run_dir(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('train', '--resume')
        self.assertEqual(ctx.exception.returncode, 1)
