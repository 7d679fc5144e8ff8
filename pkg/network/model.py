"""
The full network: segmentation module plus Tree-CNN block or a plain head.
"""

import copy
import logging

import numpy as np

from nn import functional as F
from nn.modules import Conv2d, Module
from treesegnet.exceptions import ShapeError

from .segmentation import SegmentationNet
from .tree_block import TreeCnnBlock

logger = logging.getLogger(__name__)

SEGMENTATION_PREFIX = 'seg.'
OPTICAL_RANGE = 255.0


class TreeSegNet(Module):
    def __init__(self, spec):
        super().__init__()
        self.spec = spec
        self.seg = SegmentationNet(spec)
        if spec.class_tree is None:
            self.head = Conv2d(spec.feature_channels, spec.num_classes, kernel=1, relu_follows=False)
        else:
            self.tree = TreeCnnBlock(spec)

    @property
    def has_tree(self):
        return self.spec.class_tree is not None

    def forward(self, x):
        spec = self.spec
        if x.ndim != 4 or x.shape[1] != spec.in_channels:
            raise ShapeError(f'Expected (B, {spec.in_channels}, T, T) tiles, got {x.shape}')
        features, stem = self.seg.forward(x)
        if self.has_tree:
            return self.tree.forward(features, stem)
        return self.head.forward(features)

    def backward(self, dlogits):
        if self.has_tree:
            dfeatures, dstem = self.tree.backward(dlogits)
            return self.seg.backward(dfeatures, dstem)
        return self.seg.backward(self.head.backward(dlogits))

    def clone(self):
        """Independent copy for a concurrent inference worker."""
        return copy.deepcopy(self)


def build_network(spec, seed):
    network = TreeSegNet(spec).initialize(seed)
    logger.debug('Built network with %d parameters (tree=%s)', network.num_parameters(), network.has_tree)
    return network


def prepare_input(tiles, dsm_scale):
    """Scale optical channels to [0, 1] and the DSM by ``dsm_scale`` (meters per unit).

    The DSM keeps its absolute heights; no terrain or per-tile offset is removed.
    """
    tiles = np.asarray(tiles, dtype=np.float32)
    if tiles.ndim == 3:
        tiles = tiles[None]
    if tiles.ndim != 4 or tiles.shape[1] != 5:
        raise ShapeError(f'Expected (B, 5, H, W) tiles, got {tiles.shape}')
    prepared = np.empty_like(tiles)
    prepared[:, :4] = tiles[:, :4] / OPTICAL_RANGE
    prepared[:, 4] = tiles[:, 4] / np.float32(dsm_scale)
    return prepared


def predict(network, tiles):
    """Per-pixel labels (argmax, lowest class on ties) and softmax scores."""
    network.eval()
    logits = network.forward(tiles)
    scores = F.softmax(logits.astype(np.float64), axis=1).astype(np.float32)
    labels = (np.argmax(logits, axis=1) + 1).astype(np.uint8)
    return labels, scores


def carry_over(source, target):
    """Copy every segmentation parameter and buffer from ``source`` into ``target``."""
    state = {
        name: value for name, value in source.state_dict().items() if name.startswith(SEGMENTATION_PREFIX)
    }
    target.load_state_dict(state, strict=False)
    logger.debug('Carried over %d segmentation tensors', len(state))
    return target


def census(network):
    """Layer and parameter counts by network part."""
    seg = network.seg
    counts = {
        'stem_convs': 1,
        'down_blocks': len(seg.downs),
        'up_blocks': len(seg.ups),
        'bridge_norms': 1,
        'tree_units': network.tree.unit_count if network.has_tree else 0,
        'segmentation_parameters': seg.num_parameters(),
        'total_parameters': network.num_parameters(),
    }
    counts['head_parameters'] = counts['total_parameters'] - counts['segmentation_parameters']
    return counts
