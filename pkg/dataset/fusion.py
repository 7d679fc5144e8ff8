"""
Channel fusion into the five-channel [R, G, B, IR, DSM] layout.
"""

import logging

import numpy as np

from treesegnet.exceptions import DataError, ShapeError

logger = logging.getLogger(__name__)

CHANNELS = ('R', 'G', 'B', 'IR', 'DSM')


def _planes(name, image, count):
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[0] != count:
        raise ShapeError(f'{name} must have shape ({count}, H, W), got {image.shape}')
    return image


def fuse_channels(dsm, rgb=None, irrg=None, rgbir=None):
    """Stack optical bands and the raw DSM as a float32 (5, H, W) image.

    RGBIR is used directly when present; otherwise R, G, B come from the RGB
    image and IR from channel 0 of the IRRG image. The DSM is not normalized.
    """
    if dsm is None:
        raise DataError('A DSM raster is required for fusion', code='modalities')
    dsm = np.asarray(dsm)
    if dsm.ndim != 2:
        raise ShapeError(f'DSM must be an (H, W) raster, got {dsm.shape}')

    if rgbir is not None:
        optical = _planes('RGBIR', rgbir, 4)
    elif rgb is not None and irrg is not None:
        rgb = _planes('RGB', rgb, 3)
        irrg = _planes('IRRG', irrg, 3)
        if rgb.shape[1:] != irrg.shape[1:]:
            raise ShapeError(f'RGB {rgb.shape[1:]} and IRRG {irrg.shape[1:]} differ in size')
        if not np.array_equal(rgb[0], irrg[1]):
            logger.debug('Red channels of RGB and IRRG differ; using RGB')
        optical = np.concatenate([rgb, irrg[:1]], axis=0)
    else:
        raise DataError('Fusion needs RGBIR, or RGB together with IRRG', code='modalities')

    if optical.shape[1:] != dsm.shape:
        raise ShapeError(f'Optical bands {optical.shape[1:]} and DSM {dsm.shape} differ in size')
    fused = np.empty((len(CHANNELS), *dsm.shape), dtype=np.float32)
    fused[:4] = optical
    fused[4] = dsm
    return fused
