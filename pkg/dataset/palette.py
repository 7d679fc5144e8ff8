"""
Label colors.

The default palette is the ISPRS labeling convention; class k (1-based) is
drawn with ``colors[k - 1]``.
"""

from dataclasses import dataclass

import numpy as np

from metrics.confusion import CLASS_NAMES
from treesegnet.exceptions import FormatError, LabelError, ShapeError


@dataclass(frozen=True)
class Palette:
    class_names: tuple
    colors: tuple

    def __post_init__(self):
        if len(self.class_names) != len(self.colors):
            raise ShapeError(f'{len(self.class_names)} class names for {len(self.colors)} colors')
        if len(set(self.colors)) != len(self.colors):
            raise FormatError('Palette colors must be distinct')

    @property
    def num_classes(self):
        return len(self.colors)

    def codes(self):
        return np.array([_pack(np.array(color)) for color in self.colors], dtype=np.int64)

    @classmethod
    def from_dict(cls, data):
        return cls(tuple(data), tuple(tuple(int(v) for v in color) for color in data.values()))


DEFAULT_PALETTE = Palette(
    CLASS_NAMES,
    (
        (255, 255, 255),
        (0, 0, 255),
        (0, 255, 255),
        (0, 255, 0),
        (255, 255, 0),
        (255, 0, 0),
    ),
)


def _pack(rgb):
    rgb = np.asarray(rgb, dtype=np.int64)
    return (rgb[0] << 16) | (rgb[1] << 8) | rgb[2]


def labels_from_colors(image, palette=DEFAULT_PALETTE):
    """(3, H, W) color image to an (H, W) uint8 map of 1-based labels."""
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[0] != 3:
        raise ShapeError(f'Expected a (3, H, W) color image, got {image.shape}')
    packed = _pack(image)
    codes = palette.codes()
    order = np.argsort(codes)
    sorted_codes = codes[order]
    slots = np.clip(np.searchsorted(sorted_codes, packed), 0, len(codes) - 1)
    known = sorted_codes[slots] == packed
    if not known.all():
        row, col = (int(v) for v in np.argwhere(~known)[0])
        color = tuple(int(v) for v in image[:, row, col])
        raise FormatError(f'Unknown label color {color}', position=(row, col))
    return (order[slots] + 1).astype(np.uint8)


def labels_to_colors(labels, palette=DEFAULT_PALETTE):
    labels = np.asarray(labels)
    if labels.ndim != 2:
        raise ShapeError(f'Expected an (H, W) label map, got {labels.shape}')
    if labels.size and (labels.min() < 1 or labels.max() > palette.num_classes):
        row, col = (int(v) for v in np.argwhere((labels < 1) | (labels > palette.num_classes))[0])
        raise LabelError(f'Label {labels[row, col]} at ({row}, {col}) outside 1..{palette.num_classes}')
    colors = np.array(palette.colors, dtype=np.uint8)
    return np.ascontiguousarray(np.moveaxis(colors[labels.astype(np.int64) - 1], -1, 0))
