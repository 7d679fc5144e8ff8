"""
Raster codecs for converted patch files.

Optical images are binary PPM (P6), label index maps and the infrared plane
of an RGBIR pair are binary PGM (P5), both read and written through Pillow.
DSM rasters use the F32R container: a 16-byte header (``F32R``, height and
width as little-endian uint32, one reserved uint32 that must be 0) followed by
height x width little-endian float32 values in row-major order.
"""

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from treesegnet.exceptions import FormatError, ShapeError

F32R_MAGIC = b'F32R'
F32R_HEADER_SIZE = 16
IR_SUFFIX = '.ir.pgm'


def _open(path, expected_format, expected_mode):
    try:
        with Image.open(path) as image:
            image.load()
            if image.format != expected_format or image.mode != expected_mode:
                raise FormatError(
                    f'{path} is {image.format}/{image.mode}, expected {expected_format}/{expected_mode}'
                )
            return np.asarray(image)
    except (UnidentifiedImageError, OSError) as exc:
        raise FormatError(f'Cannot decode {path}: {exc}')


def read_ppm(path):
    """(3, H, W) uint8 planes from a P6 file."""
    return np.ascontiguousarray(np.moveaxis(_open(path, 'PPM', 'RGB'), -1, 0))


def write_ppm(path, planes):
    planes = np.asarray(planes)
    if planes.ndim != 3 or planes.shape[0] != 3:
        raise ShapeError(f'PPM needs (3, H, W) planes, got {planes.shape}')
    Image.fromarray(np.ascontiguousarray(np.moveaxis(planes.astype(np.uint8), 0, -1)), 'RGB').save(path, format='PPM')


def read_pgm(path):
    return _open(path, 'PPM', 'L').copy()


def write_pgm(path, plane):
    plane = np.asarray(plane)
    if plane.ndim != 2:
        raise ShapeError(f'PGM needs an (H, W) plane, got {plane.shape}')
    Image.fromarray(plane.astype(np.uint8), 'L').save(path, format='PPM')


def ir_path(path):
    """Infrared sibling of an RGBIR ``.ppm`` file."""
    path = Path(path)
    return path.with_name(path.name.partition('.')[0] + IR_SUFFIX)


def read_rgbir(path):
    rgb = read_ppm(path)
    ir = read_pgm(ir_path(path))
    if ir.shape != rgb.shape[1:]:
        raise ShapeError(f'Infrared plane {ir.shape} does not match {path} {rgb.shape[1:]}')
    return np.concatenate([rgb, ir[None]], axis=0)


def write_rgbir(path, planes):
    planes = np.asarray(planes)
    if planes.ndim != 3 or planes.shape[0] != 4:
        raise ShapeError(f'RGBIR needs (4, H, W) planes, got {planes.shape}')
    write_ppm(path, planes[:3])
    write_pgm(ir_path(path), planes[3])


def read_f32r(path):
    data = Path(path).read_bytes()
    if len(data) < F32R_HEADER_SIZE or data[:4] != F32R_MAGIC:
        raise FormatError(f'{path} is not an F32R raster', position='byte 0')
    height, width, reserved = (int(value) for value in np.frombuffer(data, dtype='<u4', count=3, offset=4))
    if reserved != 0:
        raise FormatError(f'{path} has a nonzero reserved header field', position='byte 12')
    expected = F32R_HEADER_SIZE + 4 * height * width
    if len(data) != expected:
        raise FormatError(f'{path} holds {len(data)} bytes, header promises {expected}')
    values = np.frombuffer(data, dtype='<f4', offset=F32R_HEADER_SIZE).reshape(height, width)
    return values.astype(np.float32)


def write_f32r(path, raster):
    raster = np.asarray(raster)
    if raster.ndim != 2:
        raise ShapeError(f'F32R needs an (H, W) raster, got {raster.shape}')
    header = F32R_MAGIC + np.array([raster.shape[0], raster.shape[1], 0], dtype='<u4').tobytes()
    Path(path).write_bytes(header + raster.astype('<f4').tobytes())
