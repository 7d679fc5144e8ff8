"""
Management command to generate seeded synthetic 6-class scenes.
"""

from pathlib import Path

from dataset.palette import labels_to_colors
from dataset.synthetic import TRAIN_SPLIT, VAL_SPLIT, generate_synthetic_scene, scene_seed
from pipeline.base import PipelineCommand
from pipeline.files import write_array, write_image

SPLITS = {'train': TRAIN_SPLIT, 'val': VAL_SPLIT}


class Command(PipelineCommand):
    help = 'Write synthetic scenes: 5-band .npy image, label .pgm, colored labels and RGB preview'
    config_flags = ('seed',)

    def add_command_arguments(self, parser):
        parser.add_argument('--out', required=True, help='Output directory')
        parser.add_argument('--count', type=int, default=1, help='Number of scenes')
        parser.add_argument('--size', type=int, default=None, help='Scene side in pixels')
        parser.add_argument('--split', choices=sorted(SPLITS), default='train', help='Seed stream to draw from')

    def handle(self, *args, **options):
        config = self.load_run_config(options)
        if options['count'] < 1:
            raise self.usage_error(f'--count must be >= 1, got {options["count"]}')
        size = options['size'] or config.values['scene_size']
        out = Path(options['out'])
        out.mkdir(parents=True, exist_ok=True)

        for index in range(options['count']):
            image, labels = generate_synthetic_scene(scene_seed(config.seed, SPLITS[options['split']], index), size, size)
            stem = out / f'scene_{index:03d}'
            write_array(stem.with_name(stem.name + '.npy'), image)
            write_image(stem.with_name(stem.name + '_labels.pgm'), labels)
            write_image(stem.with_name(stem.name + '_labels.ppm'), labels_to_colors(labels))
            write_image(stem.with_name(stem.name + '_rgb.ppm'), image[:3])
        self.success(f'{options["count"]} scenes of {size}x{size} written to {out}')
