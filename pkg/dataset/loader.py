"""
Turn manifest records into fused images and label maps.
"""

import logging
from pathlib import Path

from treesegnet.exceptions import DataError, FormatError

from . import formats
from .fusion import fuse_channels
from .manifest import DSM, GT, IRRG, RGB, RGBIR
from .palette import DEFAULT_PALETTE, labels_from_colors

logger = logging.getLogger(__name__)


def _primary(record, modality):
    """Main file of a modality; the RGBIR infrared sidecar is found through it."""
    paths = record.paths.get(modality)
    if not paths:
        return None
    main = [path for path in paths if not path.endswith(formats.IR_SUFFIX)]
    if not main:
        raise DataError(f'Patch {record.id} has no main {modality} file', code='modalities')
    return main[0]


def _suffix(path):
    return Path(path).name.partition('.')[2]


def read_optical(path, modality):
    if _suffix(path) != 'ppm':
        raise FormatError(f'{modality} file {path} must be a converted .ppm')
    if modality == RGBIR:
        return formats.read_rgbir(path)
    return formats.read_ppm(path)


def read_labels(path, palette=DEFAULT_PALETTE):
    """Label indices from a PGM, or decoded from a palette-colored PPM."""
    suffix = _suffix(path)
    if suffix == 'pgm':
        return formats.read_pgm(path)
    if suffix == 'ppm':
        return labels_from_colors(formats.read_ppm(path), palette)
    raise FormatError(f'Label file {path} must be .pgm or .ppm')


def load_patch(record, root='.', palette=DEFAULT_PALETTE):
    """Return (image, labels) for a record; labels is None without ground truth."""
    root = Path(root)
    if not record.complete:
        raise DataError(
            f'Patch {record.id} is incomplete: has {sorted(record.modalities)}', code='modalities'
        )

    dsm_path = _primary(record, DSM)
    if _suffix(dsm_path) not in ('f32r', 'f32'):
        raise FormatError(f'DSM file {dsm_path} must be a converted .f32r raster')
    dsm = formats.read_f32r(root / dsm_path)

    if RGBIR in record.paths:
        image = fuse_channels(dsm, rgbir=read_optical(root / _primary(record, RGBIR), RGBIR))
    else:
        image = fuse_channels(
            dsm,
            rgb=read_optical(root / _primary(record, RGB), RGB),
            irrg=read_optical(root / _primary(record, IRRG), IRRG),
        )

    labels = None
    if record.labeled:
        labels = read_labels(root / _primary(record, GT), palette)
        if labels.shape != image.shape[1:]:
            raise DataError(
                f'Patch {record.id} labels {labels.shape} do not match image {image.shape[1:]}',
                code='shape_mismatch',
            )
    logger.debug('Loaded patch %s (%dx%d)', record.id, *image.shape[1:])
    return image, labels
