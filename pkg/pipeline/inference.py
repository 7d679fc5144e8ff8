"""
Checkpoint loading and whole-image prediction for the commands.
"""

import logging
from pathlib import Path

from trainer.checkpoint import load_pass_checkpoint
from trainer.loop import predict_scene
from trainer.rundir import RunDirectory
from treesegnet.exceptions import ShapeError

logger = logging.getLogger(__name__)


def load_network(path):
    """Network from a pass checkpoint file, or from the latest pass of a run directory."""
    path = Path(path)
    if path.is_dir():
        path = RunDirectory(path).latest_checkpoint()
    network, history, _ = load_pass_checkpoint(path)
    logger.info('Loaded %s (pass %d)', path, history[-1].index)
    return network


def predict_image(network, image, run_config):
    if image.shape[0] != network.spec.in_channels:
        raise ShapeError(
            f'Image has {image.shape[0]} channels, the network expects {network.spec.in_channels}'
        )
    config = run_config.inference_config(network)
    return predict_scene(network, image, config, workers=run_config.workers)
