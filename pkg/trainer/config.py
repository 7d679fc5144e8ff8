"""
Training configuration for the structure iteration.
"""

import json
from dataclasses import dataclass, field, fields

from django.conf import settings

from geometry.tiles import default_margin
from network.spec import NetworkSpec
from treesegnet.exceptions import ConfigError


def _default(key):
    return settings.TREESEGNET[key]


def network_from_settings(**overrides):
    values = dict(
        depth=_default('DEPTH'),
        first_channels=_default('K'),
        base_channels=_default('BASE_CHANNELS'),
        cardinality=_default('CARDINALITY'),
        bottleneck_channels=_default('BOTTLENECK'),
        unit_channels=_default('UNIT_CHANNELS'),
        num_classes=_default('NUM_CLASSES'),
        dsm_scale=_default('DSM_SCALE'),
    )
    values.update(overrides)
    return NetworkSpec(**values)


@dataclass(frozen=True)
class TrainConfig:
    """Everything a structure iteration run depends on besides its data.

    The learning rate starts at ``learning_rate`` and drops tenfold at half
    and again at three quarters of each pass's optimizer steps.
    """

    epochs: int = 8
    batch_size: int = 4
    tile: int = 64
    margin: int = 8
    sigma: float = 0.5
    learning_rate: float = 0.01
    momentum: float = 0.9
    seed: int = 0
    max_passes: int = 10
    workers: int = 0
    rotate_augment: bool = False
    train_scenes: int = 10
    train_tiles: int = 200
    val_scenes: int = 4
    scene_size: int = 160
    network: NetworkSpec = field(default_factory=NetworkSpec)

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError(f'epochs must be >= 1, got {self.epochs}')
        if self.batch_size < 1:
            raise ConfigError(f'batch_size must be >= 1, got {self.batch_size}')
        if self.max_passes < 1:
            raise ConfigError(f'max_passes must be >= 1, got {self.max_passes}')
        if self.tile % self.network.divisor:
            raise ConfigError(
                f'Tile side {self.tile} is not divisible by 2^depth = {self.network.divisor}', code='tile_size'
            )
        if not 0 <= 2 * self.margin < self.tile:
            raise ConfigError(f'Margin {self.margin} does not fit tile side {self.tile}')
        if self.sigma <= 0:
            raise ConfigError(f'sigma must be positive, got {self.sigma}')
        if self.learning_rate <= 0 or not 0 <= self.momentum < 1:
            raise ConfigError('Need learning_rate > 0 and 0 <= momentum < 1')
        if self.workers < 0:
            raise ConfigError(f'workers must be >= 0, got {self.workers}')
        if min(self.train_scenes, self.train_tiles, self.val_scenes) < 1:
            raise ConfigError('Need at least one training scene, training tile and validation scene')
        if self.scene_size < self.tile:
            raise ConfigError(f'Scene side {self.scene_size} is smaller than tile side {self.tile}')

    @classmethod
    def from_settings(cls, network=None, **overrides):
        values = dict(
            epochs=_default('EPOCHS'),
            batch_size=_default('BATCH_SIZE'),
            tile=_default('TILE_SIZE'),
            margin=_default('MARGIN'),
            sigma=_default('SIGMA'),
            learning_rate=_default('LEARNING_RATE'),
            momentum=_default('MOMENTUM'),
            seed=_default('SEED'),
            max_passes=_default('PASSES'),
            workers=_default('WORKERS'),
            rotate_augment=_default('ROTATE_AUGMENT'),
            train_scenes=_default('TRAIN_SCENES'),
            train_tiles=_default('TRAIN_TILES'),
            val_scenes=_default('VAL_SCENES'),
            scene_size=_default('SCENE_SIZE'),
        )
        values.update(overrides)
        if values['margin'] is None:
            values['margin'] = default_margin(values['tile'])
        return cls(network=network or network_from_settings(), **values)

    def to_dict(self):
        data = {item.name: getattr(self, item.name) for item in fields(self) if item.name != 'network'}
        data['network'] = self.network.to_dict()
        return data

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + '\n'

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        known = {item.name for item in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f'Unknown training config keys: {", ".join(unknown)}')
        if isinstance(data.get('network'), dict):
            data['network'] = NetworkSpec.from_dict(data['network'])
        return cls(**data)
