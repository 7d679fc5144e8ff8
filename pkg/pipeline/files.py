"""
Image and label files read and written by the pipeline commands.

Multi-band float images (fused inputs, tiles, stitched scores) are stored as
``.npy``; optical images as PPM; label maps as PGM (or palette-colored PPM
when reading); DSM rasters as F32R.
"""

from pathlib import Path

import numpy as np

from dataset import formats
from dataset.loader import read_labels
from treesegnet.exceptions import DataError, FormatError


def suffix(path):
    return Path(path).name.partition('.')[2].lower()


def require_file(path, what='Input'):
    path = Path(path)
    if not path.is_file():
        raise DataError(f'{what} file {path} does not exist', code='missing_file')
    return path


def read_image(path):
    """(C, H, W) float32 image from .npy, .ppm, .pgm or .f32r."""
    path = require_file(path)
    kind = suffix(path)
    if kind == 'npy':
        try:
            image = np.load(path, allow_pickle=False)
        except (ValueError, OSError, EOFError) as exc:
            raise FormatError(f'Cannot decode {path}: {exc}')
    elif kind == 'ppm':
        image = formats.read_ppm(path)
    elif kind == 'pgm':
        image = formats.read_pgm(path)
    elif kind in ('f32r', 'f32'):
        image = formats.read_f32r(path)
    else:
        raise FormatError(f'{path} has an unsupported image type .{kind}')
    image = np.asarray(image, dtype=np.float32)
    if image.ndim == 2:
        image = image[None]
    if image.ndim != 3:
        raise FormatError(f'{path} holds a {image.ndim}-D array, expected (C, H, W)')
    return image


def read_label_map(path):
    return read_labels(require_file(path, 'Label'))


def write_array(path, array):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'wb') as handle:
        np.save(handle, np.ascontiguousarray(array), allow_pickle=False)
    return path


def write_image(path, image):
    """Write by suffix: .npy keeps floats, .ppm/.pgm store uint8."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    kind = suffix(path)
    image = np.asarray(image)
    if kind == 'npy':
        return write_array(path, image)
    if kind == 'ppm':
        formats.write_ppm(path, np.clip(np.rint(image), 0, 255).astype(np.uint8))
    elif kind == 'pgm':
        plane = image[0] if image.ndim == 3 else image
        formats.write_pgm(path, np.clip(np.rint(plane), 0, 255).astype(np.uint8))
    else:
        raise FormatError(f'Cannot write .{kind} images to {path}')
    return path
