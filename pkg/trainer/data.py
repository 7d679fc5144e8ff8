"""
Training and validation data for a structure iteration run.
"""

import logging
from dataclasses import dataclass

import numpy as np

from dataset.loader import load_patch
from dataset.manifest import split_train_val
from dataset.synthetic import TRAIN_SPLIT, VAL_SPLIT, crop_rng, random_crops, synthetic_scenes
from geometry.augment import augment_rotations
from treesegnet.exceptions import DataError

logger = logging.getLogger(__name__)


@dataclass
class TrainingData:
    """Fixed-size training tiles plus whole validation scenes.

    ``val_scenes`` is a list of ``(image, labels)`` with image (5, H, W).
    """

    train_images: np.ndarray
    train_labels: np.ndarray
    val_scenes: list

    def __post_init__(self):
        if not len(self.train_images):
            raise DataError('No training tiles', code='empty_split')
        if not self.val_scenes:
            raise DataError('No validation scenes', code='empty_split')
        if self.train_labels.shape != (self.train_images.shape[0], *self.train_images.shape[2:]):
            raise DataError(
                f'Training labels {self.train_labels.shape} do not match tiles {self.train_images.shape}',
                code='shape_mismatch',
            )

    @property
    def num_train(self):
        return len(self.train_images)

    @property
    def val_pixels(self):
        return sum(labels.size for _, labels in self.val_scenes)


def rotated_scenes(scenes, tile):
    """Every scene with its rotated center crops; crops smaller than a tile are dropped."""
    expanded = []
    for image, labels in scenes:
        expanded.extend(pair for pair in augment_rotations(image, labels) if pair[1].shape[0] >= tile)
    logger.info('Rotation augmentation expanded %d scenes to %d', len(scenes), len(expanded))
    return expanded


def synthetic_training_data(config):
    train = synthetic_scenes(config.seed, TRAIN_SPLIT, config.train_scenes, config.scene_size)
    if config.rotate_augment:
        train = rotated_scenes(train, config.tile)
    images, labels = random_crops(train, config.train_tiles, config.tile, crop_rng(config.seed))
    val = synthetic_scenes(config.seed, VAL_SPLIT, config.val_scenes, config.scene_size)
    return TrainingData(images, labels, val)


def patch_training_data(manifest, root, config, palette=None):
    """Training crops and validation scenes from labeled dataset patches."""
    train_records, val_records = split_train_val(manifest)
    kwargs = {'palette': palette} if palette is not None else {}
    train = [load_patch(record, root, **kwargs) for record in train_records]
    if config.rotate_augment:
        train = rotated_scenes(train, config.tile)
    images, labels = random_crops(train, config.train_tiles, config.tile, crop_rng(config.seed))
    val = [load_patch(record, root, **kwargs) for record in val_records]
    logger.info('Loaded %d training and %d validation patches', len(train_records), len(val_records))
    return TrainingData(images, labels, val)
