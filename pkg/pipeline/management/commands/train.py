"""
Management command to run the structure iteration.
"""

from pathlib import Path

from django.conf import settings

from dataset.manifest import Manifest
from pipeline.base import PipelineCommand
from trainer.data import patch_training_data, synthetic_training_data
from trainer.loop import run_structure_iteration
from trainer.models import TrainingRun
from trainer.rundir import RunDirectory, resume_run


class Command(PipelineCommand):
    help = 'Train TreeSegNet: repeat train / evaluate / rebuild the class tree until the tree is stable'
    config_flags = (
        'tile_size', 'margin', 'sigma', 'K', 'depth', 'base_channels', 'epochs', 'passes', 'workers', 'batch_size',
        'seed',
    )

    def add_command_arguments(self, parser):
        parser.add_argument('--run-dir', help='Run directory (default: <run root>/seed_<seed>)')
        parser.add_argument('--resume', action='store_true', help='Continue the run in --run-dir')
        parser.add_argument('--manifest', help='Dataset manifest JSON; synthetic data is used without it')
        parser.add_argument('--data-root', default='.', help='Directory the manifest paths are relative to')

    def handle(self, *args, **options):
        if options['resume']:
            if not options['run_dir']:
                raise self.usage_error('--resume needs --run-dir')
            run_dir = RunDirectory(options['run_dir'])
            config = run_dir.read_config()
            data = self.load_data(options, config)
            audit = TrainingRun.start(config, run_dir.path)
            result = self.guarded(audit, lambda: resume_run(run_dir.path, data, on_pass=self.report(audit)))
        else:
            config = self.load_run_config(options).train_config()
            path = options['run_dir'] or Path(settings.TREESEGNET['RUN_ROOT']) / f'seed_{config.seed}'
            run_dir = RunDirectory(path)
            data = self.load_data(options, config)
            audit = TrainingRun.start(config, run_dir.path)
            result = self.guarded(
                audit, lambda: run_structure_iteration(config, data, run_dir, on_pass=self.report(audit))
            )

        state = 'converged' if result.converged else 'stopped at the pass limit'
        tree = result.records[-1].tree_text or 'none'
        self.success(f'Run {state} after {len(result.records)} passes; final tree {tree}; artifacts in {run_dir.path}')

    def load_data(self, options, config):
        if options['manifest']:
            return patch_training_data(Manifest.load(options['manifest']), options['data_root'], config)
        return synthetic_training_data(config)

    def report(self, audit):
        def on_pass(record):
            audit.log_pass(record)
            self.stdout.write(
                f'pass {record.index}: tree {record.tree_text or "none"} '
                f'OA {record.report.oa:.4f} mean F1 {record.report.mean_f1:.4f}'
            )
        return on_pass

    def guarded(self, audit, work):
        try:
            result = work()
        except Exception:
            audit.fail()
            raise
        audit.finish(result)
        return result
