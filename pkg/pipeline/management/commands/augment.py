"""
Management command to write rotated, center-cropped training pairs.
"""

from pathlib import Path

from geometry.augment import ROTATION_STEP, augment_rotations
from pipeline.base import PipelineCommand
from pipeline.files import read_image, read_label_map, suffix, write_image


class Command(PipelineCommand):
    help = 'Rotate an image and its labels every --step degrees and crop the inscribed square'

    def add_command_arguments(self, parser):
        parser.add_argument('--in', dest='image', required=True, help='Square image (.ppm or .npy)')
        parser.add_argument('--labels', required=True, help='Label map (.pgm or colored .ppm)')
        parser.add_argument('--out', required=True, help='Output directory')
        parser.add_argument('--step', type=int, default=ROTATION_STEP, help='Angle step in degrees')

    def handle(self, *args, **options):
        step = options['step']
        if step < 1 or 360 % step:
            raise self.usage_error(f'--step must divide 360, got {step}')
        image = read_image(options['image'])
        labels = read_label_map(options['labels'])
        kind = 'npy' if suffix(options['image']) == 'npy' or image.shape[0] != 3 else 'ppm'

        out = Path(options['out'])
        out.mkdir(parents=True, exist_ok=True)
        pairs = augment_rotations(image, labels, step)
        for number, (rotated, rotated_labels) in enumerate(pairs):
            angle = number * step
            write_image(out / f'rot_{angle:03d}.{kind}', rotated)
            write_image(out / f'rot_{angle:03d}_labels.pgm', rotated_labels)
        self.success(f'{len(pairs)} pairs written to {out}')
