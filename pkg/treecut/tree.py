"""
Binary class trees and their nested-parenthesis text form.
"""

from dataclasses import dataclass, field

from treesegnet.exceptions import FormatError


@dataclass(frozen=True)
class Leaf:
    """A single class."""

    label: int
    classes: frozenset = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, 'classes', frozenset((self.label,)))

    @property
    def is_leaf(self):
        return True


@dataclass(frozen=True)
class Node:
    """An internal split into two disjoint class subsets."""

    left: object
    right: object
    classes: frozenset = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.left.classes & self.right.classes:
            raise FormatError('Sibling subtrees share classes')
        object.__setattr__(self, 'classes', self.left.classes | self.right.classes)

    @property
    def is_leaf(self):
        return False


def tree_equals(a, b):
    """Exact structural equality, left/right order included."""
    return a == b


def walk(tree, key='n'):
    """Yield (key, subtree) in preorder; children append '0' (left) or '1' (right)."""
    yield key, tree
    if not tree.is_leaf:
        yield from walk(tree.left, key + '0')
        yield from walk(tree.right, key + '1')


def leaves(tree):
    """Leaf labels in left-to-right order."""
    return [subtree.label for _, subtree in walk(tree) if subtree.is_leaf]


def internal_count(tree):
    return sum(1 for _, subtree in walk(tree) if not subtree.is_leaf)


def depth(tree):
    """Edges on the longest root-to-leaf path."""
    if tree.is_leaf:
        return 0
    return 1 + max(depth(tree.left), depth(tree.right))


def class_depth(tree, label):
    """Number of internal nodes above the leaf holding ``label``."""
    for key, subtree in walk(tree):
        if subtree.is_leaf and subtree.label == label:
            return len(key) - 1
    raise KeyError(label)


def chain_tree(labels):
    """Straight tree: each split peels off the first remaining class."""
    labels = list(labels)
    tree = Leaf(labels[-1])
    for label in reversed(labels[:-1]):
        tree = Node(Leaf(label), tree)
    return tree


def balanced_tree(labels):
    """Balanced tree splitting the ordered labels in halves (smaller half left)."""
    labels = list(labels)
    if len(labels) == 1:
        return Leaf(labels[0])
    middle = len(labels) // 2
    return Node(balanced_tree(labels[:middle]), balanced_tree(labels[middle:]))


def serialize_tree(tree):
    if tree.is_leaf:
        return str(tree.label)
    return f'({serialize_tree(tree.left)},{serialize_tree(tree.right)})'


class _Parser:
    """Recursive-descent parser for the nested-parenthesis form."""

    def __init__(self, text):
        self.text = text
        self.position = 0

    def skip_space(self):
        while self.position < len(self.text) and self.text[self.position].isspace():
            self.position += 1

    def peek(self):
        self.skip_space()
        return self.text[self.position] if self.position < len(self.text) else ''

    def expect(self, char):
        if self.peek() != char:
            found = self.peek() or 'end of text'
            raise FormatError(f"Expected '{char}', found '{found}'", position=self.position)
        self.position += 1

    def parse_subtree(self):
        if self.peek() == '(':
            self.position += 1
            left = self.parse_subtree()
            self.expect(',')
            right = self.parse_subtree()
            self.expect(')')
            return Node(left, right)
        start = self.position
        while self.position < len(self.text) and self.text[self.position].isdigit():
            self.position += 1
        if start == self.position:
            found = self.peek() or 'end of text'
            raise FormatError(f"Expected a class index or '(', found '{found}'", position=start)
        return Leaf(int(self.text[start:self.position]))


def parse_tree(text):
    parser = _Parser(text)
    tree = parser.parse_subtree()
    if parser.peek():
        raise FormatError(f"Unexpected trailing '{parser.peek()}'", position=parser.position)
    labels = leaves(tree)
    if len(set(labels)) != len(labels):
        raise FormatError('A class appears more than once in the tree')
    return tree
