"""
TreeCutting: turn a confusion graph into a binary class tree.

Edges are removed in ascending weight order (ties broken by the smaller
(i, j) pair). As long as the graph stays connected the removal continues; the
first disconnection splits the node set into two components, which become the
children of the current node and are processed recursively. The smaller
component becomes the left child; on equal sizes the component holding the
smaller class index goes left.
"""

import logging

from treesegnet.exceptions import GraphError

from .graph import UnionFind
from .tree import Leaf, Node

logger = logging.getLogger(__name__)


def removal_order(graph):
    return sorted(graph.edges, key=lambda edge: (edge[2], edge[0], edge[1]))


def first_disconnection(graph):
    """Return (components, removed edges) for the first disconnecting removal.

    Works backwards: edges are re-added from the heaviest down until only two
    components remain; the edge that would join them is the last one removed.
    """
    if len(graph.nodes) < 2:
        raise GraphError('A single node cannot be split')
    order = removal_order(graph)
    uf = UnionFind(graph.nodes)
    components = len(graph.nodes)
    for position in range(len(order) - 1, -1, -1):
        i, j, _ = order[position]
        if uf.find(i) == uf.find(j):
            continue
        if components == 2:
            return uf.groups(), order[:position + 1]
        uf.union(i, j)
        components -= 1
    raise GraphError(f'Graph on nodes {sorted(graph.nodes)} is not connected')


def order_children(groups):
    """(left, right): smaller component first, then the one with the smaller minimum class."""
    first, second = sorted(groups, key=lambda group: (len(group), min(group)))
    return first, second


def removed_before_root_split(graph):
    """Edges TreeCutting removes up to and including the first disconnection."""
    _, removed = first_disconnection(graph)
    return removed


def tree_cutting(graph):
    if len(graph.nodes) == 1:
        (label,) = graph.nodes
        return Leaf(label)
    groups, removed = first_disconnection(graph)
    left, right = order_children(groups)
    logger.debug(
        'Split %s into %s | %s after removing %d edges',
        sorted(graph.nodes), sorted(left), sorted(right), len(removed),
    )
    return Node(tree_cutting(graph.induced(left)), tree_cutting(graph.induced(right)))
