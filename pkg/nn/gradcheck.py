"""
Central finite-difference gradient verification.

Two errors are reported per tensor. ``errors`` (and ``max_error``, which
``passed`` tests) scale max |analytic - numeric| by the largest gradient
magnitude in the tensor. ``entry_errors`` (and ``max_entry_error``) take the
relative error of every checked entry, |analytic - numeric| / max(|analytic|,
|numeric|), with magnitudes below 1e-6 treated as 1e-6.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from treesegnet.exceptions import DataError

from .modules import MaxPool2, Module

logger = logging.getLogger(__name__)

_FLOOR = 1e-12
# Gradients smaller than this are compared in absolute terms.
_ENTRY_FLOOR = 1e-6


@dataclass
class GradCheckResult:
    max_error: float
    errors: dict = field(default_factory=dict)
    skipped: bool = False
    reason: str = ''
    max_entry_error: float = float('nan')
    entry_errors: dict = field(default_factory=dict)

    def passed(self, tolerance):
        return not self.skipped and self.max_error <= tolerance


def _as_tuple(value):
    return tuple(value) if isinstance(value, (tuple, list)) else (value,)


def _random_projection(rng):
    weights = {}

    def loss(outputs):
        if not weights:
            weights['w'] = tuple(rng.standard_normal(out.shape) for out in outputs)
        value = sum(float((out * w).sum()) for out, w in zip(outputs, weights['w']))
        return value, weights['w']

    return loss


def _pool_ties(layer):
    if not isinstance(layer, Module):
        return 0
    return sum(module.ties for module in layer.modules() if isinstance(module, MaxPool2))


def _entries(size, limit, rng):
    if limit is None or limit >= size:
        return np.arange(size)
    return np.sort(rng.choice(size, size=limit, replace=False))


def grad_check(layer, inputs, eps=1e-3, loss=None, max_entries_per_tensor=None, seed=0):
    """Compare ``layer.backward`` with central differences over inputs and parameters.

    ``loss`` maps the tuple of outputs to ``(value, douts)``; by default it is
    a fixed random projection of the outputs. Runs must be in 64-bit mode.
    A check touching a max-pool window with tied maxima is skipped.
    """
    inputs = _as_tuple(inputs)
    params = list(layer.named_parameters()) if isinstance(layer, Module) else []
    for tensor in (*inputs, *(param.value for _, param in params)):
        if tensor.dtype != np.float64:
            raise DataError(f'Gradient checks run in 64-bit mode, got {tensor.dtype}', code='precision')

    rng = np.random.default_rng(seed)
    loss = loss or _random_projection(rng)
    buffers = {}
    if isinstance(layer, Module):
        buffers = {name: (module, local, module._buffers[local].copy()) for name, module, local in layer.named_buffers()}

    def restore_buffers():
        for module, local, saved in buffers.values():
            module._buffers[local][...] = saved

    def objective():
        return loss(_as_tuple(layer.forward(*inputs)))[0]

    outputs = _as_tuple(layer.forward(*inputs))
    ties = _pool_ties(layer)
    if ties:
        restore_buffers()
        return GradCheckResult(float('nan'), skipped=True, reason=f'{ties} pooling windows have tied maxima')

    _, douts = loss(outputs)
    douts = _as_tuple(douts)
    if isinstance(layer, Module):
        layer.zero_grad()
    grads = _as_tuple(layer.backward(douts if len(outputs) > 1 else douts[0]))

    targets = [(f'input{k}', tensor, grads[k]) for k, tensor in enumerate(inputs) if k < len(grads) and grads[k] is not None]
    targets += [(name, param.value, param.grad.copy()) for name, param in params]

    errors = {}
    entry_errors = {}
    for name, tensor, analytic in targets:
        checked = _entries(tensor.size, max_entries_per_tensor, rng)
        numeric = np.empty(len(checked))
        for slot, flat_index in enumerate(checked):
            index = np.unravel_index(flat_index, tensor.shape)
            old = tensor[index]
            tensor[index] = old + eps
            plus = objective()
            tensor[index] = old - eps
            minus = objective()
            tensor[index] = old
            numeric[slot] = (plus - minus) / (2 * eps)
        exact = analytic.reshape(-1)[checked]
        scale = max(np.abs(exact).max(initial=0.0), np.abs(numeric).max(initial=0.0), _FLOOR)
        errors[name] = float(np.abs(exact - numeric).max(initial=0.0) / scale)
        magnitude = np.maximum(np.maximum(np.abs(exact), np.abs(numeric)), _ENTRY_FLOOR)
        entry_errors[name] = float((np.abs(exact - numeric) / magnitude).max(initial=0.0))

    restore_buffers()
    if isinstance(layer, Module):
        layer.zero_grad()
    max_error = max(errors.values(), default=0.0)
    max_entry_error = max(entry_errors.values(), default=0.0)
    logger.debug('Gradient check error %.3e (per entry %.3e) over %d tensors', max_error, max_entry_error, len(errors))
    return GradCheckResult(max_error, errors, max_entry_error=max_entry_error, entry_errors=entry_errors)
