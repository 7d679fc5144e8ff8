"""
Independent checks for TreeCutting.

These do not replay the removal loop. ``verify_cutting_trace`` decides, per
split, whether some nondecreasing-weight removal order could have produced
it; the spanning-tree and min-cut helpers give the contrasts used in tests.
"""

from dataclasses import dataclass, field
from itertools import combinations

from treesegnet.exceptions import GraphError

from .cutting import order_children
from .graph import UnionFind
from .tree import Leaf, Node, walk


@dataclass
class TraceVerdict:
    """Outcome of a trace check; ``problems`` lists every failed split."""

    ok: bool
    problems: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def max_spanning_tree(graph):
    """Kruskal with edges sorted by descending weight, ties by ascending (i, j)."""
    uf = UnionFind(graph.nodes)
    chosen = []
    for i, j, weight in sorted(graph.edges, key=lambda edge: (-edge[2], edge[0], edge[1])):
        if uf.union(i, j):
            chosen.append((i, j, weight))
    if len(chosen) != len(graph.nodes) - 1:
        raise GraphError(f'Graph on nodes {sorted(graph.nodes)} is not connected')
    return tuple(chosen)


def _connected_with(nodes, edges):
    uf = UnionFind(nodes)
    for i, j, _ in edges:
        uf.union(i, j)
    return len(uf.groups()) == 1


def _check_split(graph, node):
    """None if some nondecreasing removal order first disconnects into node's children."""
    subgraph = graph.induced(node.classes)
    try:
        bottleneck = min(weight for _, _, weight in max_spanning_tree(subgraph))
    except GraphError:
        return f'subset {sorted(node.classes)} is not connected'

    left, right = node.left.classes, node.right.classes
    crossing = [edge for edge in subgraph.edges if (edge[0] in left) != (edge[1] in left)]
    heavy = [(i, j, weight) for i, j, weight in crossing if weight > bottleneck]
    if heavy:
        return (
            f'split {sorted(left)} | {sorted(right)} would need edge {heavy[0][:2]} '
            f'of weight {heavy[0][2]} removed before the graph disconnects at {bottleneck}'
        )
    for side in (left, right):
        kept = [edge for edge in graph.induced(side).edges if edge[2] >= bottleneck]
        if not _connected_with(side, kept):
            return f'side {sorted(side)} falls apart before the split at weight {bottleneck}'
    return None


def verify_cutting_trace(graph, tree):
    """Check every split of ``tree`` against the graph, ignoring child order."""
    if tree.classes != graph.nodes:
        raise GraphError(
            f'Tree classes {sorted(tree.classes)} do not match graph nodes {sorted(graph.nodes)}'
        )
    problems = []
    for key, subtree in walk(tree):
        if subtree.is_leaf:
            continue
        problem = _check_split(graph, subtree)
        if problem:
            problems.append(f'{key}: {problem}')
    return TraceVerdict(not problems, problems)


def single_linkage_tree(graph):
    """Recursive split at the lightest edge of the maximum spanning tree."""
    if len(graph.nodes) == 1:
        (label,) = graph.nodes
        return Leaf(label)
    spanning = max_spanning_tree(graph)
    weakest = min(spanning, key=lambda edge: (edge[2], edge[0], edge[1]))
    remaining = [edge for edge in spanning if edge != weakest]
    uf = UnionFind(graph.nodes)
    for i, j, _ in remaining:
        uf.union(i, j)
    left, right = order_children(uf.groups())
    return Node(single_linkage_tree(graph.induced(left)), single_linkage_tree(graph.induced(right)))


def cut_weight(graph, side):
    side = frozenset(side)
    return sum(weight for i, j, weight in graph.edges if (i in side) != (j in side))


def min_cut_value(graph):
    """Minimum total crossing weight over all bipartitions; exhaustive, small graphs only."""
    nodes = sorted(graph.nodes)
    anchor, rest = nodes[0], nodes[1:]
    best = None
    for size in range(0, len(rest)):
        for extra in combinations(rest, size):
            side = frozenset((anchor, *extra))
            value = cut_weight(graph, side)
            if best is None or value < best[0]:
                best = (value, side)
    return best
