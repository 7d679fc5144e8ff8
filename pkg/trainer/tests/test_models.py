"""
Tests for the training audit models.
"""

from django.test import TestCase

from trainer.data import synthetic_training_data
from trainer.loop import run_structure_iteration
from trainer.models import StructurePassLog, TrainingRun

from .toy import toy_config


class TrainingRunTests(TestCase):
    """Test TrainingRun and StructurePassLog."""

    def setUp(self):
        self.config = toy_config(max_passes=2)

    def test_start(self):
        run = TrainingRun.start(self.config, 'runs/toy')
        self.assertEqual(run.status, 'running')
        self.assertEqual(run.seed, 0)
        self.assertEqual(run.config['tile'], 16)
        self.assertIsNone(run.finished_at)

    def test_records_every_pass(self):
        """Test one log row per pass and the final status."""
        run = TrainingRun.start(self.config, 'runs/toy')
        result = run_structure_iteration(self.config, synthetic_training_data(self.config), on_pass=run.log_pass)
        run.finish(result)

        run.refresh_from_db()
        self.assertEqual(run.passes.count(), len(result.records))
        self.assertEqual(run.converged, result.converged)
        self.assertIn(run.status, ('converged', 'stopped'))
        self.assertEqual(run.final_tree, result.records[-1].tree_text)
        self.assertIsNotNone(run.finished_at)

        logs = list(StructurePassLog.objects.filter(run=run))
        self.assertEqual([log.pass_index for log in logs], [record.index for record in result.records])
        self.assertEqual(logs[0].tree, '')
        for log, record in zip(logs, result.records):
            self.assertAlmostEqual(log.oa, record.report.oa)
            self.assertEqual(log.details['confusion'], record.confusion.counts.tolist())

    def test_fail(self):
        run = TrainingRun.start(self.config, 'runs/toy')
        run.fail()
        self.assertEqual(TrainingRun.objects.get(pk=run.pk).status, 'failed')
