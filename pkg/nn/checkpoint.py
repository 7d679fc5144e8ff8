"""
Checkpoint container.

Layout::

    b'TSNCKPT\\0'             8-byte magic
    uint32 LE                 header length in bytes
    header                    UTF-8 JSON, keys sorted, no whitespace
    payload                   tensors back to back, little-endian

The header holds the format version, one entry per tensor (name, shape,
dtype, byte offset into the payload) and a free-form ``meta`` object. Writing
the same state and meta twice produces identical bytes.
"""

import json
from collections import OrderedDict
from pathlib import Path

import numpy as np

from treesegnet.exceptions import CheckpointError

MAGIC = b'TSNCKPT\x00'
FORMAT_VERSION = 1
_DTYPES = {'float32': '<f4', 'float64': '<f8'}


def encode_checkpoint(state, meta=None):
    entries = []
    chunks = []
    offset = 0
    for name, value in state.items():
        value = np.asarray(value)
        if value.dtype.name not in _DTYPES:
            raise CheckpointError(f'{name} has unsupported dtype {value.dtype}', code='checkpoint_dtype')
        dtype = _DTYPES[value.dtype.name]
        data = value.astype(dtype).tobytes()
        entries.append({'name': name, 'shape': list(value.shape), 'dtype': dtype, 'offset': offset})
        chunks.append(data)
        offset += len(data)
    header = json.dumps(
        {'version': FORMAT_VERSION, 'entries': entries, 'meta': meta or {}},
        sort_keys=True, separators=(',', ':'),
    ).encode('utf-8')
    return MAGIC + np.array([len(header)], dtype='<u4').tobytes() + header + b''.join(chunks)


def decode_checkpoint(data, source='checkpoint'):
    """Return (state, meta) from container bytes."""
    if data[:len(MAGIC)] != MAGIC:
        raise CheckpointError(f'{source} is not a checkpoint file')
    start = len(MAGIC) + 4
    if len(data) < start:
        raise CheckpointError(f'{source} is truncated')
    header_length = int(np.frombuffer(data, dtype='<u4', count=1, offset=len(MAGIC))[0])
    try:
        header = json.loads(data[start:start + header_length].decode('utf-8'))
    except (UnicodeDecodeError, json.JSONDecodeError):
        raise CheckpointError(f'{source} has a corrupt header')
    if not isinstance(header, dict):
        raise CheckpointError(f'{source} has a corrupt header')
    version = header.get('version')
    if version != FORMAT_VERSION:
        raise CheckpointError(
            f'{source} has format version {version}, expected {FORMAT_VERSION}', code='checkpoint_version'
        )

    payload = memoryview(data)[start + header_length:]
    state = OrderedDict()
    try:
        entries = [
            (entry['name'], np.dtype(entry['dtype']), [int(side) for side in entry['shape']], int(entry['offset']))
            for entry in header['entries']
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise CheckpointError(f'{source} has a malformed tensor table: {exc!r}')
    for name, dtype, shape, offset in entries:
        count = int(np.prod(shape, dtype=np.int64))
        end = offset + count * dtype.itemsize
        if end > len(payload):
            raise CheckpointError(f'{source} is truncated at tensor {name}')
        values = np.frombuffer(payload, dtype=dtype, count=count, offset=offset)
        state[name] = values.reshape(shape).astype(dtype.newbyteorder('='))
    return state, header.get('meta', {})


def save_checkpoint(path, state, meta=None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + '.tmp')
    tmp.write_bytes(encode_checkpoint(state, meta))
    tmp.replace(path)
    return path


def load_checkpoint(path):
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(f'Checkpoint {path} does not exist', code='checkpoint_missing')
    return decode_checkpoint(path.read_bytes(), source=str(path))
