"""
Parameters and seeded initialization.

A parameter's initial value depends only on the run seed, the parameter's
full dotted name and its shape, so two networks that share a parameter name
start from the same weights no matter how they were assembled.
"""

import zlib

import numpy as np

from treesegnet.exceptions import DataError, ShapeError

RUNTIME_DTYPE = np.float32
CHECK_DTYPE = np.float64

HE = 'he'
UNIT = 'unit'
ZEROS = 'zeros'
ONES = 'ones'
_SCHEMES = (HE, UNIT, ZEROS, ONES)


class Parameter:
    """A trainable tensor with its gradient and momentum buffer."""

    def __init__(self, shape, init=ZEROS, fan_in=None, dtype=RUNTIME_DTYPE):
        if init not in _SCHEMES:
            raise DataError(f"Unknown init scheme '{init}'", code='init')
        if init in (HE, UNIT) and not fan_in:
            raise DataError(f"Init scheme '{init}' needs a fan-in", code='init')
        self.shape = tuple(int(dim) for dim in shape)
        self.init = init
        self.fan_in = fan_in
        self.value = np.zeros(self.shape, dtype=dtype)
        self.grad = np.zeros(self.shape, dtype=dtype)
        self.velocity = np.zeros(self.shape, dtype=dtype)

    def __repr__(self):
        return f'Parameter(shape={self.shape}, init={self.init!r})'

    @property
    def size(self):
        return int(np.prod(self.shape))

    def zero_grad(self):
        self.grad.fill(0)

    def reset_velocity(self):
        self.velocity.fill(0)

    def set_value(self, value):
        value = np.asarray(value)
        if value.shape != self.shape:
            raise ShapeError(f'Value shape {value.shape} does not match parameter {self.shape}')
        self.value[...] = value

    def astype(self, dtype):
        self.value = self.value.astype(dtype)
        self.grad = self.grad.astype(dtype)
        self.velocity = self.velocity.astype(dtype)


def init_rng(seed, name, shape):
    return np.random.default_rng([int(seed), zlib.crc32(name.encode('utf-8')), *shape])


def initial_value(seed, name, param):
    """Initial tensor for ``param`` registered under ``name``."""
    if param.init == ZEROS:
        return np.zeros(param.shape)
    if param.init == ONES:
        return np.ones(param.shape)
    # He scaling for convolutions followed by relu, unit fan-in scaling otherwise.
    gain = 2.0 if param.init == HE else 1.0
    std = np.sqrt(gain / param.fan_in)
    return init_rng(seed, name, param.shape).normal(0.0, std, size=param.shape)
