"""
Tests for graph construction and TreeCutting.
"""

import itertools

import numpy as np
from django.test import SimpleTestCase, tag

from metrics.confusion import LowerTriangular
from treecut.cutting import removed_before_root_split, tree_cutting
from treecut.graph import ConfusionGraph, complete_graph, graph_from_fold
from treecut.oracles import (
    cut_weight,
    max_spanning_tree,
    min_cut_value,
    single_linkage_tree,
    verify_cutting_trace,
)
from treecut.tree import Leaf, Node, internal_count, leaves, walk
from treesegnet.exceptions import GraphError

TRIANGLE = complete_graph({(2, 1): 3, (3, 1): 1, (3, 2): 2})


def random_complete_graph(rng, size, distinct=False, high=5):
    pairs = [(i, j) for i in range(2, size + 1) for j in range(1, i)]
    if distinct:
        weights = rng.permutation(len(pairs) * 3)[:len(pairs)]
    else:
        weights = rng.integers(0, high, size=len(pairs))
    return complete_graph({pair: int(w) for pair, w in zip(pairs, weights)})


def all_complete_graphs(size, weights=range(5)):
    pairs = [(i, j) for i in range(2, size + 1) for j in range(1, i)]
    for combo in itertools.product(weights, repeat=len(pairs)):
        yield complete_graph(dict(zip(pairs, combo)))


class GraphFromFoldTests(SimpleTestCase):
    """Test graph_from_fold."""

    def test_two_classes(self):
        """Test a 2-class fold gives one edge."""
        graph = graph_from_fold(LowerTriangular([[0, 0], [7, 0]]))
        self.assertEqual(graph.edges, ((2, 1, 7),))

    def test_six_classes_have_fifteen_edges(self):
        """Test the graph is complete."""
        graph = graph_from_fold(LowerTriangular(np.tril(np.ones((6, 6), int), k=-1)))
        self.assertEqual(len(graph.edges), 15)

    def test_zero_weight_pairs_are_edges(self):
        """Test an all-zero fold still yields every edge."""
        graph = graph_from_fold(LowerTriangular(np.zeros((3, 3), int)))
        self.assertEqual([w for _, _, w in graph.edges], [0, 0, 0])

    def test_needs_two_classes(self):
        """Test C < 2 is rejected."""
        with self.assertRaises(GraphError):
            graph_from_fold(LowerTriangular([[0]]))


class TreeCuttingTests(SimpleTestCase):
    """Test tree_cutting."""

    def test_triangle(self):
        """Test the hand-simulated triangle: {3} splits off and, being smaller, goes left."""
        self.assertEqual(tree_cutting(TRIANGLE), Node(Leaf(3), Node(Leaf(1), Leaf(2))))

    def test_two_nodes(self):
        """Test the only possible split regardless of weight."""
        for weight in (0, 1, 99):
            graph = complete_graph({(2, 1): weight})
            self.assertEqual(tree_cutting(graph), Node(Leaf(1), Leaf(2)))

    def test_singleton_split_goes_left(self):
        """Test cutting the weight-20 edge isolates node 5 as the left child."""
        for last in ((6, 5), (5, 4)):
            with self.subTest(last=last):
                weights = {(5, 1): 0, (5, 2): 1, (5, 3): 2, (5, 4): 3, (6, 1): 6, (6, 5): 6}
                weights[last] = 20
                for i, j in [(2, 1), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3), (6, 2), (6, 3), (6, 4)]:
                    weights[(i, j)] = 21 + i + j
                graph = complete_graph(weights)
                removed = removed_before_root_split(graph)
                self.assertEqual(removed[-1][:2], last)
                self.assertEqual([w for _, _, w in removed][-1], 20)
                tree = tree_cutting(graph)
                self.assertEqual(tree.left, Leaf(5))
                self.assertEqual(tree.right.classes, frozenset({1, 2, 3, 4, 6}))

    def test_equal_sizes_order_by_smallest_class(self):
        """Test components of equal size put the one holding the smaller class left."""
        graph = complete_graph({(2, 1): 0, (3, 1): 0, (3, 2): 9, (4, 1): 9, (4, 2): 0, (4, 3): 0})
        tree = tree_cutting(graph)
        self.assertEqual(tree.left.classes, frozenset({1, 4}))
        self.assertEqual(tree.right.classes, frozenset({2, 3}))

    def test_ties_break_lexicographically(self):
        """Test equal weights are removed in (i, j) order."""
        graph = complete_graph({(2, 1): 1, (3, 1): 1, (3, 2): 1})
        removed = removed_before_root_split(graph)
        self.assertEqual([edge[:2] for edge in removed], [(2, 1), (3, 1)])
        self.assertEqual(tree_cutting(graph), Node(Leaf(1), Node(Leaf(2), Leaf(3))))

    def test_disconnected_input(self):
        """Test a graph without a connecting edge is rejected."""
        graph = ConfusionGraph(frozenset({1, 2, 3}), ((2, 1, 4),))
        with self.assertRaises(GraphError):
            tree_cutting(graph)

    def test_leaf_and_internal_counts(self):
        """Test L leaves give L-1 internal nodes (11 nodes for C=6)."""
        rng = np.random.default_rng(1)
        for size in range(2, 9):
            tree = tree_cutting(random_complete_graph(rng, size))
            self.assertEqual(sorted(leaves(tree)), list(range(1, size + 1)))
            self.assertEqual(internal_count(tree), size - 1)
        tree = tree_cutting(random_complete_graph(rng, 6))
        self.assertEqual(sum(1 for _ in walk(tree)), 11)

    def test_monotone_removal(self):
        """Test no removed edge is heavier than an edge still present at the split."""
        rng = np.random.default_rng(12)
        for _ in range(200):
            graph = random_complete_graph(rng, int(rng.integers(2, 8)), high=10)
            removed = removed_before_root_split(graph)
            remaining = [edge for edge in graph.edges if edge not in removed]
            if remaining:
                self.assertLessEqual(max(w for _, _, w in removed), min(w for _, _, w in remaining))


class VerifierTests(SimpleTestCase):
    """Test verify_cutting_trace."""

    def test_accepts_own_output(self):
        """Test self-consistency on the triangle."""
        self.assertTrue(verify_cutting_trace(TRIANGLE, tree_cutting(TRIANGLE)).ok)

    def test_rejects_wrong_split(self):
        """Test ((1,3),2) is not reachable on the triangle."""
        verdict = verify_cutting_trace(TRIANGLE, Node(Node(Leaf(1), Leaf(3)), Leaf(2)))
        self.assertFalse(verdict.ok)
        self.assertEqual(len(verdict.problems), 1)

    def test_two_node_graph(self):
        """Test the unique 2-node tree is accepted."""
        graph = complete_graph({(2, 1): 4})
        self.assertTrue(verify_cutting_trace(graph, Node(Leaf(2), Leaf(1))).ok)

    def test_leaf_set_mismatch(self):
        """Test a tree over other classes is an error."""
        with self.assertRaises(GraphError):
            verify_cutting_trace(TRIANGLE, Node(Leaf(1), Leaf(2)))

    def test_exhaustive_small_graphs(self):
        """Test every complete graph on <= 4 nodes with weights in 0..4."""
        for size in (2, 3, 4):
            for graph in all_complete_graphs(size):
                verdict = verify_cutting_trace(graph, tree_cutting(graph))
                self.assertTrue(verdict.ok, verdict.problems)

    @tag('slow')
    def test_random_five_node_graphs(self):
        """Test 10^5 random complete graphs on 5 nodes with weights in 0..4."""
        rng = np.random.default_rng(5)
        for _ in range(100_000):
            graph = random_complete_graph(rng, 5)
            verdict = verify_cutting_trace(graph, tree_cutting(graph))
            self.assertTrue(verdict.ok, verdict.problems)


class SpanningTreeTests(SimpleTestCase):
    """Test max_spanning_tree and the single-linkage duality."""

    def test_triangle(self):
        """Test the heaviest spanning tree of the triangle."""
        self.assertEqual({edge[:2] for edge in max_spanning_tree(TRIANGLE)}, {(2, 1), (3, 2)})

    def test_two_nodes(self):
        """Test a 2-node graph returns its edge."""
        self.assertEqual(max_spanning_tree(complete_graph({(2, 1): 0})), ((2, 1, 0),))

    def test_star(self):
        """Test a star is its own spanning tree."""
        graph = ConfusionGraph(frozenset({1, 2, 3, 4}), ((2, 1, 5), (3, 1, 2), (4, 1, 9)))
        self.assertEqual(set(max_spanning_tree(graph)), set(graph.edges))

    def test_disconnected(self):
        """Test a disconnected graph is rejected."""
        with self.assertRaises(GraphError):
            max_spanning_tree(ConfusionGraph(frozenset({1, 2, 3}), ((2, 1, 1),)))

    def test_single_linkage_duality(self):
        """Test 1000 random graphs with distinct weights build identical trees."""
        rng = np.random.default_rng(77)
        for _ in range(1000):
            graph = random_complete_graph(rng, int(rng.integers(2, 9)), distinct=True)
            self.assertEqual(tree_cutting(graph), single_linkage_tree(graph))

    def test_irrelevant_edge_change_keeps_tree(self):
        """Test raising a heavy within-group edge leaves the tree unchanged."""
        base = {(2, 1): 9, (3, 1): 1, (3, 2): 2, (4, 1): 0, (4, 2): 3, (4, 3): 8}
        changed = {**base, (2, 1): 50}
        self.assertEqual(tree_cutting(complete_graph(base)), tree_cutting(complete_graph(changed)))


class MinCutContrastTests(SimpleTestCase):
    """TreeCutting is not a minimum cut."""

    def test_constructed_graph(self):
        """Test a graph whose first split crosses more weight than the minimum cut."""
        graph = complete_graph({(2, 1): 10, (3, 1): 0, (3, 2): 1, (4, 1): 2, (4, 2): 2, (4, 3): 2})
        removed = removed_before_root_split(graph)
        self.assertEqual(sorted(w for _, _, w in removed), [0, 1, 2, 2])
        tree = tree_cutting(graph)
        self.assertEqual({tree.left.classes, tree.right.classes}, {frozenset({1, 2}), frozenset({3, 4})})
        best, _ = min_cut_value(graph)
        self.assertEqual(best, 3)
        self.assertEqual(cut_weight(graph, tree.left.classes), 5)
        self.assertGreater(sum(w for _, _, w in removed), best)

    def test_search_finds_contrast(self):
        """Test a random search over small graphs finds removal sets that are not minimum cuts."""
        rng = np.random.default_rng(0)
        found = 0
        for _ in range(300):
            graph = random_complete_graph(rng, 5, high=6)
            removed = removed_before_root_split(graph)
            best, _ = min_cut_value(graph)
            if sum(w for _, _, w in removed) > best:
                found += 1
        self.assertGreater(found, 0)
