"""
Rotation augmentation and the maximum inscribed square.

Angles are in degrees, counter-clockwise as displayed (rows grow downward).
Rotation is about the image center ((H - 1) / 2, (W - 1) / 2); a pixel whose
source position falls outside the source area is filled with 0.
"""

import math
from dataclasses import dataclass

import numpy as np

from treesegnet.exceptions import DataError, ShapeError

ROTATION_STEP = 10
NEAREST = 'nearest'
BILINEAR = 'bilinear'

# Sampling slack for positions that land on the source border up to rounding.
_EDGE_TOLERANCE = 1e-6


def _is_label_map(image):
    return image.ndim == 2 and np.issubdtype(image.dtype, np.integer)


def _source_coordinates(height, width, angle):
    theta = math.radians(angle)
    cos, sin = math.cos(theta), math.sin(theta)
    cy, cx = (height - 1) / 2, (width - 1) / 2
    rows, cols = np.meshgrid(np.arange(height), np.arange(width), indexing='ij')
    x = cols - cx
    y = cy - rows
    src_x = x * cos + y * sin
    src_y = -x * sin + y * cos
    return cy - src_y, cx + src_x


def rotate(image, angle, mode=NEAREST):
    """Rotate a (C, H, W) image or an (H, W) map; label maps must use nearest."""
    image = np.asarray(image)
    if mode not in (NEAREST, BILINEAR):
        raise DataError(f"Unknown interpolation mode '{mode}'", code='mode')
    if mode == BILINEAR and _is_label_map(image):
        raise DataError('Label maps must be rotated with nearest interpolation', code='mode')
    if image.ndim not in (2, 3):
        raise ShapeError(f'Expected an (H, W) or (C, H, W) array, got shape {image.shape}')

    height, width = image.shape[-2:]
    if angle % 90 == 0 and (height == width or angle % 180 == 0):
        return np.ascontiguousarray(np.rot90(image, k=int(angle // 90) % 4, axes=(-2, -1)))

    src_row, src_col = _source_coordinates(height, width, angle)
    inside = (
        (src_row >= -0.5 - _EDGE_TOLERANCE) & (src_row <= height - 0.5 + _EDGE_TOLERANCE)
        & (src_col >= -0.5 - _EDGE_TOLERANCE) & (src_col <= width - 0.5 + _EDGE_TOLERANCE)
    )
    planes = image[None] if image.ndim == 2 else image

    if mode == NEAREST:
        row_index = np.clip(np.floor(src_row + 0.5).astype(np.int64), 0, height - 1)
        col_index = np.clip(np.floor(src_col + 0.5).astype(np.int64), 0, width - 1)
        sampled = planes[:, row_index, col_index]
    else:
        src_row = np.clip(src_row, 0, height - 1)
        src_col = np.clip(src_col, 0, width - 1)
        r0 = np.floor(src_row).astype(np.int64)
        c0 = np.floor(src_col).astype(np.int64)
        r1 = np.minimum(r0 + 1, height - 1)
        c1 = np.minimum(c0 + 1, width - 1)
        dr = src_row - r0
        dc = src_col - c0
        values = planes.astype(np.float64)
        sampled = (
            values[:, r0, c0] * (1 - dr) * (1 - dc)
            + values[:, r0, c1] * (1 - dr) * dc
            + values[:, r1, c0] * dr * (1 - dc)
            + values[:, r1, c1] * dr * dc
        )
        if np.issubdtype(image.dtype, np.integer):
            sampled = np.rint(sampled)
        sampled = sampled.astype(image.dtype)

    sampled = np.where(inside[None], sampled, 0).astype(image.dtype)
    return sampled[0] if image.ndim == 2 else sampled


def rotate_labels(labels, angle):
    labels = np.asarray(labels)
    if labels.ndim != 2:
        raise ShapeError(f'Expected an (H, W) label map, got shape {labels.shape}')
    return rotate(labels, angle, NEAREST)


def max_inscribed_square_side(side, angle):
    """Side of the largest axis-aligned square centered inside a rotated square."""
    if side < 1:
        raise DataError(f'Square side must be >= 1, got {side}')
    theta = math.radians(angle % 90)
    return int(math.floor(side / (abs(math.cos(theta)) + abs(math.sin(theta))) + 1e-9))


@dataclass(frozen=True)
class RotationCrop:
    """A rotation angle with its centered crop."""

    angle: int
    source_side: int
    crop_side: int

    @property
    def offset(self):
        return (self.source_side - self.crop_side) // 2

    def crop(self, array):
        start, stop = self.offset, self.offset + self.crop_side
        return array[..., start:stop, start:stop]


def rotation_crops(side, step=ROTATION_STEP):
    return [
        RotationCrop(angle, side, max_inscribed_square_side(side, angle))
        for angle in range(0, 360, step)
    ]


def augment_rotations(image, labels, step=ROTATION_STEP):
    """Rotated, center-cropped (image, labels) pairs for every ``step`` degrees."""
    image = np.asarray(image)
    labels = np.asarray(labels)
    height, width = image.shape[-2:]
    if height != width:
        raise ShapeError(f'Rotation augmentation needs a square image, got {height}x{width}')
    if labels.shape != (height, width):
        raise ShapeError(f'Label map shape {labels.shape} does not match image {height}x{width}')

    pairs = []
    for crop in rotation_crops(height, step):
        rotated_image = rotate(image, crop.angle, BILINEAR)
        rotated_labels = rotate_labels(labels, crop.angle)
        pairs.append((crop.crop(rotated_image), crop.crop(rotated_labels)))
    return pairs
