"""
Management command to cut an image into overlapping tiles.
"""

import json
from pathlib import Path

from geometry.tiles import extract_tiles, plan_tiles
from pipeline.base import PipelineCommand
from pipeline.files import read_image, write_array

PLAN_FILE = 'plan.json'


def tile_name(index):
    return f'tile_{index:04d}.npy'


class Command(PipelineCommand):
    help = 'Split an image into T x T tiles with mirrored borders; writes plan.json and one .npy per tile'
    config_flags = ('tile_size', 'margin')

    def add_command_arguments(self, parser):
        parser.add_argument('--in', dest='image', required=True, help='Image (.npy, .ppm, .pgm or .f32r)')
        parser.add_argument('--out', required=True, help='Output directory')

    def handle(self, *args, **options):
        config = self.load_run_config(options)
        tile, margin = config.values['tile_size'], config.values['margin']
        image = read_image(options['image'])
        plan = plan_tiles(image.shape[1], image.shape[2], tile, margin)

        out = Path(options['out'])
        out.mkdir(parents=True, exist_ok=True)
        for index, window in enumerate(extract_tiles(image, plan)):
            write_array(out / tile_name(index), window)
        (out / PLAN_FILE).write_text(json.dumps(plan.to_dict(), sort_keys=True) + '\n', encoding='utf-8')
        rows, cols = plan.grid
        self.success(f'{len(plan)} tiles ({rows}x{cols}) written to {out}')
