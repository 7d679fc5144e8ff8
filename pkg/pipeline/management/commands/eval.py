"""
Management command to score a prediction against a reference label map.
"""

from django.conf import settings

from metrics.confusion import confusion_from_maps
from metrics.error_map import render_error_map
from metrics.scores import score
from pipeline.base import PipelineCommand
from pipeline.files import read_image, read_label_map, write_image
from pipeline.inference import load_network, predict_image


class Command(PipelineCommand):
    help = 'Per-class precision/recall/F1 with OA and mean F1 for a predicted label map'
    config_flags = ('tile_size', 'margin', 'sigma', 'workers', 'batch_size')

    def add_command_arguments(self, parser):
        parser.add_argument('--ref', required=True, help='Reference labels (.pgm or colored .ppm)')
        parser.add_argument('--pred', help='Predicted labels (.pgm or colored .ppm)')
        parser.add_argument('--checkpoint', help='Predict with this checkpoint (file or run directory)')
        parser.add_argument('--image', help='Image to predict when --checkpoint is given')
        parser.add_argument('--classes', type=int, default=None, help='Number of classes')
        parser.add_argument('--json', action='store_true', help='Print the report as JSON')
        parser.add_argument('--matrix', action='store_true', help='Also print the confusion matrix')
        parser.add_argument('--error-map', help='Write a green/red correctness map (.ppm)')

    def handle(self, *args, **options):
        if bool(options['pred']) == bool(options['checkpoint']):
            raise self.usage_error('Give exactly one of --pred or --checkpoint')
        if options['checkpoint'] and not options['image']:
            raise self.usage_error('--checkpoint needs --image')

        reference = read_label_map(options['ref'])
        num_classes = options['classes']
        if options['pred']:
            prediction = read_label_map(options['pred'])
        else:
            network = load_network(options['checkpoint'])
            prediction, _ = predict_image(network, read_image(options['image']), self.load_run_config(options))
            num_classes = num_classes or network.spec.num_classes
        num_classes = num_classes or settings.TREESEGNET['NUM_CLASSES']

        confusion = confusion_from_maps(reference, prediction, num_classes)
        report = score(confusion)
        if options['matrix']:
            self.stdout.write(confusion.to_text(), ending='')
        self.stdout.write(report.to_json() if options['json'] else report.to_text(), ending='')
        if options['error_map']:
            write_image(options['error_map'], render_error_map(reference, prediction).transpose(2, 0, 1))
