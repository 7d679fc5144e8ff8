"""
Shared behaviour of the pipeline management commands.

Every command reports failures as one line ``kind[code]: message`` and exits
with 1 for usage errors, 2 for data errors and 3 for internal invariant
violations.
"""

import logging
import sys

from django.core.management.base import BaseCommand, CommandError

from treesegnet.exceptions import DataError, InvariantViolation

from .config import load_config

logger = logging.getLogger(__name__)

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INVARIANT = 3


def error_kind(exc):
    name = type(exc).__name__
    return name[:-len('Error')].lower() if name.endswith('Error') and name != 'Error' else name.lower()


class PipelineCommand(BaseCommand):
    """Base class mapping domain errors onto exit codes."""

    #: Flags mapped onto run configuration keys; None leaves the file/default value.
    config_flags = ()

    _FLAGS = {
        'tile_size': ('--tile-size', int, 'Tile side T in pixels'),
        'margin': ('--margin', int, 'Tile margin in pixels (default T/8)'),
        'sigma': ('--sigma', float, 'Gaussian blending sigma in tile units'),
        'K': ('--K', int, 'Width of the first convolution'),
        'depth': ('--depth', int, 'Down/Up block pairs'),
        'base_channels': ('--base-channels', str, 'Comma-separated Down block widths, one per depth level'),
        'epochs': ('--epochs', int, 'Epochs per structure pass'),
        'passes': ('--passes', int, 'Maximum structure passes'),
        'workers': ('--workers', int, 'Inference workers (0 = available CPUs)'),
        'batch_size': ('--batch-size', int, 'Minibatch size'),
        'seed': ('--seed', int, 'Seed for every random choice'),
    }

    def add_arguments(self, parser):
        if self.config_flags:
            parser.add_argument('--config', type=str, help='JSON run configuration file')
        for key in self.config_flags:
            flag, kind, help_text = self._FLAGS[key]
            parser.add_argument(flag, dest=f'cfg_{key}', type=kind, default=None, help=help_text)
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def load_run_config(self, options):
        overrides = {key: options.get(f'cfg_{key}') for key in self.config_flags}
        return load_config(options.get('config'), overrides)

    def execute(self, *args, **options):
        try:
            return super().execute(*args, **options)
        except CommandError:
            raise
        except InvariantViolation as exc:
            logger.exception('Invariant violated in %s', type(self).__module__)
            raise CommandError(f'invariant[invariant]: {exc}', returncode=EXIT_INVARIANT)
        except DataError as exc:
            logger.warning('%s failed: %s', type(self).__module__.rpartition('.')[2], exc)
            message = str(exc).replace('\n', ' ')
            raise CommandError(f'{error_kind(exc)}[{exc.code}]: {message}', returncode=EXIT_DATA)
        except OSError as exc:
            raise CommandError(f'io[{exc.__class__.__name__.lower()}]: {exc}', returncode=EXIT_DATA)

    def run_from_argv(self, argv):
        try:
            super().run_from_argv(argv)
        except SystemExit as exc:
            # argparse exits with 2 on bad flags.
            if exc.code == 2 and not isinstance(exc.__context__, CommandError):
                sys.exit(EXIT_USAGE)
            raise

    def usage_error(self, message):
        return CommandError(f'usage[usage]: {message}', returncode=EXIT_USAGE)

    def success(self, message):
        self.stdout.write(self.style.SUCCESS(message))
