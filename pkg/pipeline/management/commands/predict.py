"""
Management command to label a whole image with a trained checkpoint.
"""

from dataset.palette import labels_to_colors
from pipeline.base import PipelineCommand
from pipeline.files import read_image, write_array, write_image
from pipeline.inference import load_network, predict_image


class Command(PipelineCommand):
    help = 'Tiled prediction with Gaussian-blended stitching; writes 1-based labels as .pgm'
    config_flags = ('tile_size', 'margin', 'sigma', 'workers', 'batch_size')

    def add_command_arguments(self, parser):
        parser.add_argument('--checkpoint', required=True, help='Pass checkpoint file or run directory')
        parser.add_argument('--in', dest='image', required=True, help='Fused (5, H, W) image (.npy)')
        parser.add_argument('--out', required=True, help='Label map output (.pgm)')
        parser.add_argument('--scores', help='Also write stitched class scores (.npy)')
        parser.add_argument('--color', help='Also write palette-colored labels (.ppm)')

    def handle(self, *args, **options):
        network = load_network(options['checkpoint'])
        labels, scores = predict_image(network, read_image(options['image']), self.load_run_config(options))
        write_image(options['out'], labels)
        if options['scores']:
            write_array(options['scores'], scores)
        if options['color']:
            write_image(options['color'], labels_to_colors(labels))
        self.success(f'Labeled {labels.shape[0]}x{labels.shape[1]} image written to {options["out"]}')
