"""
Run configuration: settings defaults, then a JSON file, then command flags.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from django.conf import settings

from network.spec import NetworkSpec
from trainer.config import TrainConfig
from treesegnet.exceptions import ConfigError, FormatError

from .forms import RunConfigForm

logger = logging.getLogger(__name__)

CONFIG_KEYS = tuple(RunConfigForm.base_fields)


def default_values():
    values = {key: settings.TREESEGNET[key.upper()] for key in CONFIG_KEYS}
    values['base_channels'] = list(values['base_channels'])
    return values


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration shared by every pipeline command."""

    values: dict
    source: str = ''

    @property
    def seed(self):
        return self.values['seed']

    @property
    def workers(self):
        return self.values['workers']

    @property
    def network(self):
        values = self.values
        return NetworkSpec(
            depth=values['depth'],
            first_channels=values['K'],
            base_channels=values['base_channels'],
            cardinality=values['cardinality'],
            bottleneck_channels=values['bottleneck'],
            unit_channels=values['unit_channels'],
            num_classes=values['num_classes'],
            dsm_scale=values['dsm_scale'],
        )

    def train_config(self, network=None):
        values = self.values
        return TrainConfig(
            epochs=values['epochs'],
            batch_size=values['batch_size'],
            tile=values['tile_size'],
            margin=values['margin'],
            sigma=values['sigma'],
            learning_rate=values['learning_rate'],
            momentum=values['momentum'],
            seed=values['seed'],
            max_passes=values['passes'],
            workers=values['workers'],
            rotate_augment=values['rotate_augment'],
            train_scenes=values['train_scenes'],
            train_tiles=values['train_tiles'],
            val_scenes=values['val_scenes'],
            scene_size=max(values['scene_size'], values['tile_size']),
            network=network or self.network,
        )

    def inference_config(self, network):
        """Tiling settings for an already built network."""
        return self.train_config(network.spec)

    def to_dict(self):
        data = dict(self.values)
        data['base_channels'] = list(data['base_channels'])
        return data


def read_config_file(path):
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding='utf-8') or '{}')
    except FileNotFoundError:
        raise ConfigError(f'Config file {path} does not exist', code='missing_config')
    except json.JSONDecodeError as exc:
        raise FormatError(f'{path} is not valid JSON: {exc.msg}', position=f'line {exc.lineno}')
    if not isinstance(data, dict):
        raise FormatError(f'{path} must hold a JSON object')
    unknown = sorted(set(data) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f'Unknown config key {path}:{unknown[0]}', code='unknown_key')
    return data


def scaled_widths(widths, depth):
    """Channel widths for ``depth`` levels, doubling from the first of ``widths``."""
    return [int(widths[0]) * 2 ** level for level in range(depth)]


def load_config(path=None, overrides=None):
    """Merge settings defaults, the JSON file at ``path`` and flag ``overrides``.

    Overrides whose value is None are ignored so unset flags fall through to
    the file and then to the defaults. When the depth is set but the channel
    widths are not, the default widths are rescaled to the new depth.
    """
    values = default_values()
    from_file = read_config_file(path) if path else {}
    values.update(from_file)
    flags = {key: value for key, value in (overrides or {}).items() if value is not None}
    unknown = sorted(set(flags) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f'Unknown config key flags:{unknown[0]}', code='unknown_key')
    values.update(flags)

    explicit = set(from_file) | set(flags)
    depth = values['depth']
    if 'depth' in explicit and 'base_channels' not in explicit and isinstance(depth, int) and depth > 0:
        values['base_channels'] = scaled_widths(values['base_channels'], depth)

    form = RunConfigForm(data=values)
    if not form.is_valid():
        key, errors = next(iter(form.errors.items()))
        where = f'{path}:{key}' if path else key
        raise ConfigError(f'Invalid config value {where}: {errors[0]}', code='config_value')
    logger.debug('Loaded config from %s with flags %s', path or 'defaults', sorted(flags))
    return RunConfig(dict(form.cleaned_data), str(path or ''))
