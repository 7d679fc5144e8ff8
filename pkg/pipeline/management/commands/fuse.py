"""
Management command to fuse optical bands and a DSM into one 5-band image.
"""

from dataset import formats
from dataset.fusion import fuse_channels
from pipeline.base import PipelineCommand
from pipeline.files import require_file, write_array


class Command(PipelineCommand):
    help = 'Fuse RGB+IRRG (or RGBIR) and a DSM into a (5, H, W) .npy image'

    def add_command_arguments(self, parser):
        parser.add_argument('--dsm', required=True, help='DSM raster (.f32r)')
        parser.add_argument('--rgb', help='RGB image (.ppm)')
        parser.add_argument('--irrg', help='IRRG image (.ppm)')
        parser.add_argument('--rgbir', help='RGBIR image (.ppm with .ir.pgm sidecar)')
        parser.add_argument('--out', required=True, help='Output .npy file')

    def handle(self, *args, **options):
        if options['rgbir'] and (options['rgb'] or options['irrg']):
            raise self.usage_error('Give --rgbir, or --rgb together with --irrg, not both')
        if not options['rgbir'] and not (options['rgb'] and options['irrg']):
            raise self.usage_error('Fusion needs --rgbir, or --rgb together with --irrg')

        dsm = formats.read_f32r(require_file(options['dsm'], 'DSM'))
        if options['rgbir']:
            fused = fuse_channels(dsm, rgbir=formats.read_rgbir(require_file(options['rgbir'])))
        else:
            fused = fuse_channels(
                dsm,
                rgb=formats.read_ppm(require_file(options['rgb'])),
                irrg=formats.read_ppm(require_file(options['irrg'])),
            )
        path = write_array(options['out'], fused)
        self.success(f'Fused {fused.shape[1]}x{fused.shape[2]} image written to {path}')
