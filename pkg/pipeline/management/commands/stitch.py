"""
Management command to blend per-tile scores back into a full image.
"""

import json
from pathlib import Path

import numpy as np

from geometry.tiles import TilePlan, gaussian_weight_map, stitch
from pipeline.base import PipelineCommand
from pipeline.files import read_image, require_file, write_array, write_image
from treesegnet.exceptions import FormatError

from .tile import PLAN_FILE, tile_name


class Command(PipelineCommand):
    help = 'Gaussian-weighted stitch of tile_XXXX.npy files laid out by plan.json'
    config_flags = ('sigma',)

    def add_command_arguments(self, parser):
        parser.add_argument('--in', dest='tiles', required=True, help='Directory written by the tile command')
        parser.add_argument('--out', required=True, help='Stitched .npy output')
        parser.add_argument('--labels-out', help='Also write argmax labels (1-based) as .pgm')

    def handle(self, *args, **options):
        config = self.load_run_config(options)
        folder = Path(options['tiles'])
        plan_path = require_file(folder / PLAN_FILE, 'Plan')
        try:
            plan = TilePlan.from_dict(json.loads(plan_path.read_text(encoding='utf-8')))
        except (ValueError, KeyError, TypeError) as exc:
            raise FormatError(f'{plan_path} is not a tile plan: {exc}')

        tiles = []
        for index in range(len(plan)):
            tile = read_image(folder / tile_name(index))
            tiles.append(tile[0] if tile.shape[0] == 1 else tile)
        stitched = stitch(tiles, plan, gaussian_weight_map(plan.tile, config.values['sigma']))
        write_array(options['out'], stitched)
        if options['labels_out']:
            if stitched.ndim != 3:
                raise self.usage_error('--labels-out needs multi-channel class scores')
            write_image(options['labels_out'], (np.argmax(stitched, axis=0) + 1).astype(np.uint8))
        self.success(f'Stitched {len(plan)} tiles into {plan.height}x{plan.width}')
