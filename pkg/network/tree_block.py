"""
Tree-CNN block: one ResNeXt unit per node of a class tree.

Units are keyed by their position in the tree (``n`` for the root, then ``0``
for a left child and ``1`` for a right child). The root unit sees the bridge
features joined with the first convolution's K maps; every other unit sees
its parent's output joined with the same K maps. Leaf outputs are stacked in
class order and a 1x1 convolution maps them to class logits.
"""

from nn import functional as F
from nn.modules import Conv2d, Module
from treecut.tree import walk

from .blocks import ResNeXtUnit


def routing_table(tree):
    """Map each unit key to its (left, right) child keys; leaves map to None."""
    table = {}
    for key, subtree in walk(tree):
        table[key] = None if subtree.is_leaf else (key + '0', key + '1')
    return table


def trace_path(tree, label):
    """Unit keys a class's features pass through, root to leaf."""
    for key, subtree in walk(tree):
        if subtree.is_leaf and subtree.label == label:
            return [key[:end] for end in range(1, len(key) + 1)]
    raise KeyError(label)


class TreeCnnBlock(Module):
    def __init__(self, spec):
        super().__init__()
        tree = spec.class_tree
        self.tree = tree
        self.routes = routing_table(tree)
        self.order = list(self.routes)
        self.parents = {child: key for key, children in self.routes.items() if children for child in children}
        self.leaf_keys = {subtree.label: key for key, subtree in walk(tree) if subtree.is_leaf}
        self.classes = sorted(self.leaf_keys)
        for key in self.order:
            in_channels = (spec.feature_channels if key == 'n' else spec.unit_channels) + spec.first_channels
            self.add_module(
                key, ResNeXtUnit(in_channels, spec.cardinality, spec.bottleneck_channels, spec.unit_channels)
            )
        self.head = Conv2d(spec.unit_channels * len(self.classes), spec.num_classes, kernel=1, relu_follows=False)
        self._joins = {}
        self._leaf_split = None

    @property
    def unit_count(self):
        return len(self.order)

    def unit(self, key):
        return getattr(self, key)

    def forward(self, features, stem):
        outputs = {}
        for key in self.order:
            source = features if key == 'n' else outputs[self.parents[key]]
            joined, self._joins[key] = F.concat_forward([source, stem])
            outputs[key] = self.unit(key).forward(joined)
        stacked, self._leaf_split = F.concat_forward([outputs[self.leaf_keys[label]] for label in self.classes])
        return self.head(stacked)

    def backward(self, dlogits):
        """Return (d features, d stem)."""
        douts = dict(zip(
            (self.leaf_keys[label] for label in self.classes),
            F.concat_backward(self.head.backward(dlogits), self._leaf_split),
        ))
        dstem = None
        dfeatures = None
        for key in reversed(self.order):
            dsource, dstem_part = F.concat_backward(self.unit(key).backward(douts.pop(key)), self._joins[key])
            dstem = dstem_part if dstem is None else dstem + dstem_part
            if key == 'n':
                dfeatures = dsource
            else:
                parent = self.parents[key]
                douts[parent] = dsource if parent not in douts else douts[parent] + dsource
        return dfeatures, dstem
