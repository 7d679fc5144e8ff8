"""
Management command to build a class tree from a confusion matrix.
"""

import numpy as np

from metrics.confusion import ConfusionMatrix, LowerTriangular, fold_lower_triangular, parse_matrix
from pipeline.base import PipelineCommand
from pipeline.files import require_file
from treecut.cutting import removed_before_root_split, tree_cutting
from treecut.graph import graph_from_fold
from treecut.oracles import verify_cutting_trace
from treecut.tree import serialize_tree
from treesegnet.exceptions import InvariantViolation


def read_fold(path):
    """Lower-triangular fold from a text matrix; a full confusion matrix is folded first."""
    table = parse_matrix(require_file(path, 'Matrix').read_text(encoding='utf-8'))
    if np.triu(table).any():
        return fold_lower_triangular(ConfusionMatrix(table))
    return LowerTriangular(table)


class Command(PipelineCommand):
    help = 'Run TreeCutting on a confusion matrix (or its lower-triangular fold) and print the tree'

    def add_command_arguments(self, parser):
        parser.add_argument('--matrix', required=True, help='Whitespace-separated integer matrix file')
        parser.add_argument('--trace', action='store_true', help='Also list edges removed before the root split')
        parser.add_argument('--verify', action='store_true', help='Check every split against the graph')

    def handle(self, *args, **options):
        graph = graph_from_fold(read_fold(options['matrix']))
        tree = tree_cutting(graph)
        self.stdout.write(serialize_tree(tree))
        if options['trace']:
            for i, j, weight in removed_before_root_split(graph):
                self.stdout.write(f'removed {i}-{j} {weight}')
        if options['verify']:
            verdict = verify_cutting_trace(graph, tree)
            if not verdict:
                raise InvariantViolation('TreeCutting trace check failed: ' + '; '.join(verdict.problems))
            self.stdout.write('trace ok')
