"""
Run directory layout::

    config.json
    transcript.json
    pass_<k>/checkpoint.tsn
    pass_<k>/confusion.txt
    pass_<k>/tree.txt
    pass_<k>/scores.txt
    pass_<k>/scores.json
    pass_<k>/error_map_<i>.ppm
"""

import json
import logging
import re
from pathlib import Path

from dataset.formats import write_ppm
from metrics.confusion import format_matrix
from metrics.error_map import render_error_map
from treesegnet.exceptions import CheckpointError, ConfigError

from .checkpoint import load_pass_checkpoint, save_pass_checkpoint
from .config import TrainConfig
from .data import synthetic_training_data
from .loop import run_structure_iteration

logger = logging.getLogger(__name__)

CONFIG_FILE = 'config.json'
TRANSCRIPT_FILE = 'transcript.json'
CHECKPOINT_FILE = 'checkpoint.tsn'
_PASS_DIR = re.compile(r'^pass_(\d+)$')


class RunDirectory:
    def __init__(self, path):
        self.path = Path(path)

    def pass_dir(self, index):
        return self.path / f'pass_{index}'

    def write_config(self, config):
        self.path.mkdir(parents=True, exist_ok=True)
        (self.path / CONFIG_FILE).write_text(config.to_json(), encoding='utf-8')

    def read_config(self):
        path = self.path / CONFIG_FILE
        if not path.is_file():
            raise ConfigError(f'{self.path} has no {CONFIG_FILE}', code='missing_config')
        return TrainConfig.from_dict(json.loads(path.read_text(encoding='utf-8')))

    def write_pass(self, record, network, config, history, predictions=(), scenes=()):
        """Write every artifact of one pass and set ``record.checkpoint``."""
        folder = self.pass_dir(record.index)
        folder.mkdir(parents=True, exist_ok=True)
        record.checkpoint = f'{folder.name}/{CHECKPOINT_FILE}'
        save_pass_checkpoint(self.path / record.checkpoint, network, config, history)
        (folder / 'confusion.txt').write_text(format_matrix(record.confusion.counts), encoding='utf-8')
        (folder / 'tree.txt').write_text((record.tree_text or 'none') + '\n', encoding='utf-8')
        (folder / 'scores.txt').write_text(record.report.to_text(), encoding='utf-8')
        (folder / 'scores.json').write_text(record.report.to_json(), encoding='utf-8')
        for number, (labels, (_, reference)) in enumerate(zip(predictions, scenes)):
            write_ppm(folder / f'error_map_{number}.ppm', render_error_map(reference, labels).transpose(2, 0, 1))
        logger.info('Wrote pass %d artifacts to %s', record.index, folder)

    def write_transcript(self, records, converged):
        transcript = {
            'converged': converged,
            'final_tree': (records[-1].tree_text or None) if records else None,
            'passes': [record.to_dict() for record in records],
        }
        (self.path / TRANSCRIPT_FILE).write_text(
            json.dumps(transcript, indent=2, sort_keys=True) + '\n', encoding='utf-8'
        )

    def read_transcript(self):
        return json.loads((self.path / TRANSCRIPT_FILE).read_text(encoding='utf-8'))

    def latest_checkpoint(self):
        indices = []
        if self.path.is_dir():
            for child in self.path.iterdir():
                match = _PASS_DIR.match(child.name)
                if match and (child / CHECKPOINT_FILE).is_file():
                    indices.append(int(match.group(1)))
        if not indices:
            raise CheckpointError(f'{self.path} has no pass checkpoints', code='checkpoint_missing')
        return self.pass_dir(max(indices)) / CHECKPOINT_FILE


def resume_run(path, data=None, on_pass=None):
    """Continue an interrupted run from its latest pass checkpoint."""
    run_dir = RunDirectory(path)
    config = run_dir.read_config()
    network, history, saved_config = load_pass_checkpoint(run_dir.latest_checkpoint())
    if saved_config != config:
        raise ConfigError(f'{run_dir.path / CONFIG_FILE} does not match the checkpointed config', code='resume_config')
    if data is None:
        data = synthetic_training_data(config)
    return run_structure_iteration(config, data, run_dir, on_pass=on_pass, resume=(network, history))
