"""
Seeded synthetic aerial scenes with the six ISPRS classes.

Scenes are drawn as layers over an impervious background: building
rectangles, clutter patches, low-vegetation blobs, tree crowns and finally
cars. Channel statistics per class (mean R, G, B, IR; per-pixel noise std):

    imp_surf   (150, 150, 145, 110)  std 14   flat
    building   (175, 105,  95, 120)  std 14   roof 6-14 m above terrain
    low_veg    ( 95, 140,  80, 165)  std 20   0.2 m
    tree       ( 85, 130,  75, 175)  std 20   0.4-1.6 m crowns
    car        random saturated color std 8    1.5 m
    clutter    (140,  95,  70, 100)  std 25   0.3-1.0 m

Tree and low vegetation differ by (10, 10, 5, 10) at equal std 20, which puts
the summed per-channel Gaussian KL divergence of their colors at about 0.41;
TREE_LOW_VEG_KL_BOUND is the documented ceiling. Their heights overlap too, so
these two classes are the hardest pair to separate.
"""

import numpy as np

from treesegnet.exceptions import DataError

IMP_SURF, BUILDING, LOW_VEG, TREE, CAR, CLUTTER = range(1, 7)
MIN_SIDE = 32
TREE_LOW_VEG_KL_BOUND = 0.5

COLOR_MEANS = np.array([
    [0, 0, 0, 0],
    [150, 150, 145, 110],
    [175, 105, 95, 120],
    [95, 140, 80, 165],
    [85, 130, 75, 175],
    [0, 0, 0, 90],
    [140, 95, 70, 100],
], dtype=np.float64)
COLOR_STD = np.array([0, 14, 14, 20, 20, 8, 25], dtype=np.float64)
DSM_NOISE = np.array([0, 0.1, 0.3, 0.15, 0.4, 0.1, 0.3], dtype=np.float64)

TRAIN_SPLIT = 0
VAL_SPLIT = 1


def _blob(rng, shape, center, radius, wobble=0.25):
    """Irregular star-shaped region around center."""
    rows, cols = np.ogrid[:shape[0], :shape[1]]
    dy = rows - center[0]
    dx = cols - center[1]
    phi = np.arctan2(dy, dx)
    lobes = rng.integers(3, 7)
    boundary = radius * (
        1 + wobble * np.sin(lobes * phi + rng.uniform(0, 2 * np.pi))
        + 0.5 * wobble * np.sin((lobes + 2) * phi + rng.uniform(0, 2 * np.pi))
    )
    return np.hypot(dy, dx) <= boundary


def _rectangle(shape, top, left, height, width):
    mask = np.zeros(shape, dtype=bool)
    mask[max(top, 0):top + height, max(left, 0):left + width] = True
    return mask


def _count(rng, low, high, scale, minimum):
    return max(minimum, int(round(rng.integers(low, high + 1) * scale)))


def generate_synthetic_scene(seed, height, width):
    """Return a float32 (5, H, W) image and uint8 (H, W) label map for ``seed``."""
    if height < MIN_SIDE or width < MIN_SIDE:
        raise DataError(f'Synthetic scenes need H, W >= {MIN_SIDE}, got {height}x{width}', code='scene_size')
    rng = np.random.default_rng([int(seed), height, width])
    shape = (height, width)
    side = min(height, width)
    scale = height * width / (128 * 128)

    labels = np.full(shape, IMP_SURF, dtype=np.uint8)
    elevation = np.zeros(shape)

    for _ in range(_count(rng, 2, 3, scale, 1)):
        rect_h = int(rng.integers(side // 8, side // 4 + 1))
        rect_w = int(rng.integers(side // 8, side // 4 + 1))
        mask = _rectangle(shape, int(rng.integers(0, height - rect_h)), int(rng.integers(0, width - rect_w)), rect_h, rect_w)
        labels[mask] = BUILDING
        elevation[mask] = rng.uniform(6, 14)

    for _ in range(_count(rng, 1, 3, scale, 1)):
        center = rng.uniform(0, height), rng.uniform(0, width)
        mask = np.zeros(shape, dtype=bool)
        for _ in range(rng.integers(3, 6)):
            offset = rng.normal(0, 4, size=2)
            mask |= _blob(rng, shape, (center[0] + offset[0], center[1] + offset[1]), rng.uniform(2, 5), wobble=0.4)
        labels[mask] = CLUTTER
        elevation[mask] = rng.uniform(0.3, 1.0)

    for _ in range(_count(rng, 2, 4, scale, 2)):
        center = rng.uniform(0, height), rng.uniform(0, width)
        mask = _blob(rng, shape, center, rng.uniform(side / 10, side / 6))
        labels[mask] = LOW_VEG
        elevation[mask] = 0.2

    for _ in range(_count(rng, 2, 4, scale, 2)):
        center = rng.uniform(0, height), rng.uniform(0, width)
        mask = _blob(rng, shape, center, rng.uniform(side / 14, side / 9))
        labels[mask] = TREE
        elevation[mask] = rng.uniform(0.4, 1.6)

    car_colors = []
    for _ in range(_count(rng, 3, 5, scale, 2)):
        car_h, car_w = (3, 7) if rng.random() < 0.5 else (7, 3)
        for _attempt in range(20):
            top = int(rng.integers(0, height - car_h))
            left = int(rng.integers(0, width - car_w))
            if labels[top + car_h // 2, left + car_w // 2] == IMP_SURF:
                break
        mask = _rectangle(shape, top, left, car_h, car_w)
        labels[mask] = CAR
        elevation[mask] = 1.5
        car_colors.append((mask, rng.choice([40.0, 220.0], size=3)))

    noise = rng.normal(size=(4, height, width))
    optical = COLOR_MEANS[labels].transpose(2, 0, 1) + COLOR_STD[labels] * noise
    for mask, color in car_colors:
        optical[:3, mask] = color[:, None] + COLOR_STD[CAR] * noise[:3, mask]

    slope = rng.uniform(-2, 2, size=2)
    rows, cols = np.mgrid[:height, :width]
    terrain = 30 + slope[0] * rows / height + slope[1] * cols / width
    dsm = terrain + elevation + DSM_NOISE[labels] * rng.normal(size=shape)

    image = np.empty((5, height, width), dtype=np.float32)
    image[:4] = np.clip(np.rint(optical), 0, 255)
    image[4] = dsm
    return image, labels


def scene_seed(seed, split, index):
    """Independent per-scene seed derived from the run seed."""
    return int(np.random.SeedSequence([int(seed), split, index]).generate_state(1)[0])


def random_crops(scenes, count, tile, rng):
    """``count`` tile x tile crops, each from a uniformly chosen scene and position."""
    images = np.empty((count, scenes[0][0].shape[0], tile, tile), dtype=np.float32)
    labels = np.empty((count, tile, tile), dtype=np.uint8)
    for k in range(count):
        image, label_map = scenes[int(rng.integers(len(scenes)))]
        height, width = label_map.shape
        if height < tile or width < tile:
            raise DataError(f'Scene {height}x{width} is smaller than tile {tile}', code='scene_size')
        top = int(rng.integers(0, height - tile + 1))
        left = int(rng.integers(0, width - tile + 1))
        images[k] = image[:, top:top + tile, left:left + tile]
        labels[k] = label_map[top:top + tile, left:left + tile]
    return images, labels


def synthetic_scenes(seed, split, count, scene_size):
    return [
        generate_synthetic_scene(scene_seed(seed, split, index), scene_size, scene_size)
        for index in range(count)
    ]


def crop_rng(seed):
    return np.random.default_rng([int(seed), 2])
