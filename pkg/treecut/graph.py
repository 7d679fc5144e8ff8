"""
Undirected confusion graph built from a lower-triangular fold.
"""

from dataclasses import dataclass

from treesegnet.exceptions import GraphError


class UnionFind:
    """Disjoint sets over arbitrary hashable labels, with path compression."""

    def __init__(self, labels):
        self.parents = {label: label for label in labels}
        self.rank = {label: 0 for label in self.parents}

    def find(self, x):
        root = x
        parent = self.parents[root]
        while parent != root:
            root = parent
            parent = self.parents[root]

        parent = self.parents[x]
        while parent != root:
            self.parents[x] = root
            x = parent
            parent = self.parents[x]

        return root

    def union(self, x, y):
        x = self.find(x)
        y = self.find(y)

        if x == y:
            return False
        if self.rank[x] < self.rank[y]:
            x, y = y, x
        # x has larger rank and becomes shared root
        self.parents[y] = x
        if self.rank[x] == self.rank[y]:
            self.rank[x] += 1
        return True

    def groups(self):
        """Disjoint sets as frozensets, in order of their smallest label."""
        members = {}
        for label in sorted(self.parents):
            members.setdefault(self.find(label), []).append(label)
        return [frozenset(group) for group in members.values()]


@dataclass(frozen=True)
class ConfusionGraph:
    """Nodes are class indices; edges are (i, j, weight) with i > j."""

    nodes: frozenset
    edges: tuple

    def __post_init__(self):
        nodes = frozenset(self.nodes)
        edges = []
        for i, j, weight in self.edges:
            if i < j:
                i, j = j, i
            if i == j or i not in nodes or j not in nodes:
                raise GraphError(f'Edge ({i}, {j}) does not join two distinct graph nodes')
            if weight < 0:
                raise GraphError(f'Edge ({i}, {j}) has negative weight {weight}')
            edges.append((int(i), int(j), int(weight)))
        edges.sort()
        pairs = [(i, j) for i, j, _ in edges]
        if len(set(pairs)) != len(pairs):
            raise GraphError('A node pair carries more than one edge')
        object.__setattr__(self, 'nodes', nodes)
        object.__setattr__(self, 'edges', tuple(edges))

    def weight(self, i, j):
        if i < j:
            i, j = j, i
        for a, b, weight in self.edges:
            if (a, b) == (i, j):
                return weight
        raise GraphError(f'No edge between {i} and {j}')

    def induced(self, subset):
        """Subgraph on ``subset`` keeping every edge with both ends inside it."""
        subset = frozenset(subset)
        return ConfusionGraph(
            subset,
            tuple(edge for edge in self.edges if edge[0] in subset and edge[1] in subset),
        )

    def components(self, edges=None):
        uf = UnionFind(self.nodes)
        for i, j, _ in self.edges if edges is None else edges:
            uf.union(i, j)
        return uf.groups()

    def is_connected(self):
        return len(self.components()) == 1


def graph_from_fold(fold):
    """Complete graph on classes 1..C; edge (i, j) carries b_ij, zeros included."""
    size = fold.num_classes
    if size < 2:
        raise GraphError(f'A confusion graph needs at least 2 classes, got {size}')
    edges = tuple(
        (i, j, fold.at(i, j))
        for i in range(2, size + 1)
        for j in range(1, i)
    )
    return ConfusionGraph(frozenset(range(1, size + 1)), edges)


def complete_graph(weights):
    """Build a graph from a {(i, j): weight} mapping over nodes 1..n."""
    nodes = set()
    for i, j in weights:
        nodes.update((i, j))
    return ConfusionGraph(frozenset(nodes), tuple((i, j, w) for (i, j), w in weights.items()))
