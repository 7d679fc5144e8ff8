"""
Overlap-tile planning, mirrored extraction, Gaussian weights and stitching.

A tile is T x T pixels; its outer margin of m pixels only supplies context and
the central (T - 2m) core is the area the tile is responsible for. Cores of
consecutive tiles abut, and the last tile along each axis is moved back so its
core ends exactly on the far border. Context beyond the image is mirrored.
"""

import math
from dataclasses import dataclass

import numpy as np

from treesegnet.exceptions import DataError, ShapeError

DEFAULT_SIGMA = 0.5


def default_margin(tile):
    return tile // 8


def _axis_origins(length, tile, margin):
    stride = tile - 2 * margin
    count = max(1, math.ceil(length / stride))
    origins = [-margin + k * stride for k in range(count)]
    if count > 1:
        origins[-1] = length - tile + margin
    return origins


@dataclass(frozen=True)
class TilePlan:
    """Tile origins in source coordinates, row-major from the top left."""

    height: int
    width: int
    tile: int
    margin: int
    origins: tuple

    @property
    def stride(self):
        return self.tile - 2 * self.margin

    @property
    def grid(self):
        rows = len({origin[0] for origin in self.origins})
        cols = len({origin[1] for origin in self.origins})
        return rows, cols

    def __len__(self):
        return len(self.origins)

    def core(self, index):
        """Core rectangle (row0, row1, col0, col1) clipped to the image."""
        row, col = self.origins[index]
        m, s = self.margin, self.stride
        return (
            max(row + m, 0), min(row + m + s, self.height),
            max(col + m, 0), min(col + m + s, self.width),
        )

    def to_dict(self):
        return {
            'height': self.height,
            'width': self.width,
            'tile': self.tile,
            'margin': self.margin,
            'origins': [list(origin) for origin in self.origins],
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            int(data['height']), int(data['width']), int(data['tile']), int(data['margin']),
            tuple((int(row), int(col)) for row, col in data['origins']),
        )


def plan_tiles(height, width, tile, margin):
    if tile <= 2 * margin or margin < 0:
        raise DataError(f'Tile side {tile} must exceed twice the margin {margin}', code='tile_plan')
    if height < 1 or width < 1:
        raise ShapeError(f'Image must be at least 1x1, got {height}x{width}')
    rows = _axis_origins(height, tile, margin)
    cols = _axis_origins(width, tile, margin)
    return TilePlan(height, width, tile, margin, tuple((r, c) for r in rows for c in cols))


def reflect_index(index, length):
    """Mirror indices into [0, length) about the borders, edge pixel not repeated."""
    index = np.asarray(index)
    if length == 1:
        return np.zeros_like(index)
    period = 2 * (length - 1)
    folded = np.mod(index, period)
    return np.where(folded >= length, period - folded, folded)


def extract_tile(image, plan, index):
    """T x T window at the plan's index-th origin, mirrored where it leaves the image."""
    if not 0 <= index < len(plan):
        raise DataError(f'Tile index {index} outside plan of {len(plan)} tiles', code='tile_index')
    image = np.asarray(image)
    if image.shape[-2:] != (plan.height, plan.width):
        raise ShapeError(f'Image shape {image.shape} does not match plan {plan.height}x{plan.width}')
    row, col = plan.origins[index]
    rows = reflect_index(np.arange(row, row + plan.tile), plan.height)
    cols = reflect_index(np.arange(col, col + plan.tile), plan.width)
    return image[..., rows[:, None], cols[None, :]]


def extract_tiles(image, plan):
    return [extract_tile(image, plan, index) for index in range(len(plan))]


@dataclass(frozen=True)
class WeightMap:
    """Per-pixel blending weights for one tile."""

    weights: np.ndarray
    sigma: float
    center: tuple = (0.0, 0.0)


def gaussian_weight_map(tile, sigma=DEFAULT_SIGMA):
    """Isotropic Gaussian over coordinates normalized to [-1, 1] across the tile."""
    if sigma <= 0:
        raise DataError(f'Sigma must be positive, got {sigma}', code='sigma')
    if tile < 1:
        raise DataError(f'Tile side must be >= 1, got {tile}', code='tile_plan')
    if tile == 1:
        coords = np.zeros(1)
    else:
        coords = (2 * np.arange(tile) - (tile - 1)) / (tile - 1)
    y, x = np.meshgrid(coords, coords, indexing='ij')
    weights = np.exp(-(x ** 2 + y ** 2) / (2 * sigma ** 2)) / (2 * math.pi * sigma ** 2)
    return WeightMap(weights, sigma)


class StitchAccumulator:
    """Folds tile scores into a weighted average in ascending tile order.

    Tiles may be delivered in any order; each is held until every tile before
    it has been folded, so the floating-point result does not depend on
    delivery order.
    """

    def __init__(self, plan, weight, channels=None):
        if weight.weights.shape != (plan.tile, plan.tile):
            raise ShapeError(
                f'Weight map {weight.weights.shape} does not match tile side {plan.tile}'
            )
        self.plan = plan
        self.weight = weight.weights
        self.channels = channels
        shape = (plan.height, plan.width) if channels is None else (channels, plan.height, plan.width)
        self.numerator = np.zeros(shape, dtype=np.float64)
        self.denominator = np.zeros((plan.height, plan.width), dtype=np.float64)
        self.pending = {}
        self.next_index = 0

    def add(self, index, scores):
        if not 0 <= index < len(self.plan) or index < self.next_index or index in self.pending:
            raise DataError(f'Unexpected tile index {index}', code='tile_index')
        self.pending[index] = np.asarray(scores)
        while self.next_index in self.pending:
            self._fold(self.next_index, self.pending.pop(self.next_index))
            self.next_index += 1

    def _fold(self, index, scores):
        plan = self.plan
        expected = (plan.tile, plan.tile) if self.channels is None else (self.channels, plan.tile, plan.tile)
        if scores.shape != expected:
            raise ShapeError(f'Tile {index} has shape {scores.shape}, expected {expected}')
        row, col = plan.origins[index]
        r0, r1 = max(row, 0), min(row + plan.tile, plan.height)
        c0, c1 = max(col, 0), min(col + plan.tile, plan.width)
        tile_rows = slice(r0 - row, r1 - row)
        tile_cols = slice(c0 - col, c1 - col)
        weight = self.weight[tile_rows, tile_cols]
        self.numerator[..., r0:r1, c0:c1] += weight * scores[..., tile_rows, tile_cols]
        self.denominator[r0:r1, c0:c1] += weight

    def result(self):
        if self.next_index != len(self.plan):
            raise DataError(
                f'Stitch received {self.next_index} of {len(self.plan)} tiles', code='tile_count'
            )
        return self.numerator / self.denominator


def stitch(tiles, plan, weight):
    """Weighted average of overlapping tile scores over the full image."""
    tiles = list(tiles)
    if len(tiles) != len(plan):
        raise DataError(f'Got {len(tiles)} tiles for a plan of {len(plan)}', code='tile_count')
    first = np.asarray(tiles[0])
    accumulator = StitchAccumulator(plan, weight, channels=first.shape[0] if first.ndim == 3 else None)
    for index, scores in enumerate(tiles):
        accumulator.add(index, scores)
    return accumulator.result()
