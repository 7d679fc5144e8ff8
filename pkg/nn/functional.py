"""
Forward and backward passes for the layer primitives.

Every ``*_forward`` returns ``(out, cache)`` and the matching ``*_backward``
takes ``(dout, cache)``. Tensors are (N, C, H, W).
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from treesegnet.exceptions import DataError, LabelError, ShapeError

BN_MOMENTUM = 0.9
BN_EPS = 1e-5


def _check_4d(name, x):
    if x.ndim != 4:
        raise ShapeError(f'{name} expects an (N, C, H, W) tensor, got shape {x.shape}')


def conv2d_forward(x, w, b, groups=1):
    """
    Same-padded stride-1 cross-correlation.

    Inputs:
    - x: (N, C_in, H, W)
    - w: (C_out, C_in / groups, k, k) with k odd
    - b: (C_out,)

    Channel block g of the input only feeds output block g.
    """
    _check_4d('conv2d', x)
    n, c_in, height, width = x.shape
    c_out, c_group, k, k2 = w.shape
    if k != k2 or k % 2 == 0:
        raise ShapeError(f'Kernel must be square with odd side, got {k}x{k2}')
    if groups < 1 or c_in % groups or c_out % groups:
        raise ShapeError(f'Channels {c_in}->{c_out} are not divisible into {groups} groups')
    if c_group != c_in // groups:
        raise ShapeError(f'Weight expects {c_group * groups} input channels, got {c_in}')

    pad = k // 2
    xp = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad))) if pad else x
    windows = sliding_window_view(xp, (k, k), axis=(2, 3))
    o_group = c_out // groups
    out = np.empty((n, c_out, height, width), dtype=np.result_type(x, w))
    for g in range(groups):
        xg = windows[:, g * c_group:(g + 1) * c_group]
        wg = w[g * o_group:(g + 1) * o_group]
        out[:, g * o_group:(g + 1) * o_group] = np.tensordot(xg, wg, axes=([1, 4, 5], [1, 2, 3])).transpose(0, 3, 1, 2)
    out += b[None, :, None, None]
    return out, (x, w, groups)


def conv2d_backward(dout, cache):
    x, w, groups = cache
    n, c_in, height, width = x.shape
    c_out, c_group, k, _ = w.shape
    pad = k // 2
    o_group = c_out // groups

    xp = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad))) if pad else x
    windows = sliding_window_view(xp, (k, k), axis=(2, 3))
    dw = np.empty_like(w)
    dxp = np.zeros(xp.shape, dtype=np.result_type(dout, w))
    for g in range(groups):
        in_block = slice(g * c_group, (g + 1) * c_group)
        out_block = slice(g * o_group, (g + 1) * o_group)
        dout_g = dout[:, out_block]
        dw[out_block] = np.tensordot(dout_g, windows[:, in_block], axes=([0, 2, 3], [0, 2, 3]))
        # (N, H, W, C_group, k, k) contributions scattered back over the padded input
        dcols = np.tensordot(dout_g, w[out_block], axes=([1], [0]))
        for i in range(k):
            for j in range(k):
                dxp[:, in_block, i:i + height, j:j + width] += dcols[..., i, j].transpose(0, 3, 1, 2)
    db = dout.sum(axis=(0, 2, 3))
    dx = dxp[:, :, pad:pad + height, pad:pad + width] if pad else dxp
    return dx, dw, db


def relu_forward(x):
    return np.maximum(x, 0), x


def relu_backward(dout, cache):
    return dout * (cache > 0)


def maxpool2_forward(x):
    """2x2 stride-2 max pooling; ties route to the first maximum in row-major order."""
    _check_4d('maxpool2', x)
    n, c, height, width = x.shape
    if height % 2 or width % 2:
        raise ShapeError(f'maxpool2 needs even spatial dims, got {height}x{width}')
    windows = x.reshape(n, c, height // 2, 2, width // 2, 2).transpose(0, 1, 2, 4, 3, 5).reshape(n, c, height // 2, width // 2, 4)
    index = windows.argmax(axis=-1)
    out = np.take_along_axis(windows, index[..., None], axis=-1)[..., 0]
    ties = int(((windows == out[..., None]).sum(axis=-1) > 1).sum())
    return out, (x.shape, index, ties)


def maxpool2_backward(dout, cache):
    shape, index, _ = cache
    n, c, height, width = shape
    dwindows = np.zeros((n, c, height // 2, width // 2, 4), dtype=dout.dtype)
    np.put_along_axis(dwindows, index[..., None], dout[..., None], axis=-1)
    return dwindows.reshape(n, c, height // 2, width // 2, 2, 2).transpose(0, 1, 2, 4, 3, 5).reshape(shape)


def upsample2_forward(x):
    """Nearest-neighbour 2x upsampling."""
    _check_4d('upsample2', x)
    return x.repeat(2, axis=2).repeat(2, axis=3), x.shape


def upsample2_backward(dout, cache):
    n, c, height, width = cache
    return dout.reshape(n, c, height, 2, width, 2).sum(axis=(3, 5))


def add_forward(a, b):
    if a.shape != b.shape:
        raise ShapeError(f'Cannot add shapes {a.shape} and {b.shape}')
    return a + b, None


def add_backward(dout, cache):
    return dout, dout


def concat_forward(tensors):
    """Stack tensors along channels in argument order."""
    if not tensors:
        raise ShapeError('concat needs at least one tensor')
    for tensor in tensors:
        _check_4d('concat', tensor)
    first = tensors[0].shape
    for tensor in tensors[1:]:
        if tensor.shape[0] != first[0] or tensor.shape[2:] != first[2:]:
            raise ShapeError(f'Cannot concatenate shapes {first} and {tensor.shape}')
    sizes = [tensor.shape[1] for tensor in tensors]
    return np.concatenate(tensors, axis=1), sizes


def concat_backward(dout, cache):
    return np.split(dout, np.cumsum(cache)[:-1], axis=1)


def batchnorm_forward(x, gamma, beta, running_mean, running_var, training, momentum=BN_MOMENTUM, eps=BN_EPS):
    """
    Per-channel batch normalization over (N, H, W).

    In training mode the batch statistics normalize the input and the running
    statistics are updated in place as ``momentum * running + (1 - momentum) *
    batch``; in eval mode the running statistics are used.
    """
    _check_4d('batch_norm', x)
    axes = (0, 2, 3)
    if training:
        count = x.shape[0] * x.shape[2] * x.shape[3]
        if count < 2:
            raise DataError('Batch norm in training mode needs at least 2 values per channel', code='degenerate_batch')
        mean = x.mean(axis=axes)
        var = x.var(axis=axes)
        running_mean *= momentum
        running_mean += (1 - momentum) * mean
        running_var *= momentum
        running_var += (1 - momentum) * var
    else:
        mean, var = running_mean, running_var

    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = (x - mean[None, :, None, None]) * inv_std[None, :, None, None]
    out = gamma[None, :, None, None] * xhat + beta[None, :, None, None]
    return out, (xhat, gamma, inv_std, training)


def batchnorm_backward(dout, cache):
    xhat, gamma, inv_std, training = cache
    axes = (0, 2, 3)
    dbeta = dout.sum(axis=axes)
    dgamma = (dout * xhat).sum(axis=axes)
    dxhat = dout * gamma[None, :, None, None]
    if not training:
        return dxhat * inv_std[None, :, None, None], dgamma, dbeta
    count = xhat.shape[0] * xhat.shape[2] * xhat.shape[3]
    dx = (
        inv_std[None, :, None, None] / count
        * (count * dxhat - dxhat.sum(axis=axes)[None, :, None, None]
           - xhat * (dxhat * xhat).sum(axis=axes)[None, :, None, None])
    )
    return dx, dgamma, dbeta


def softmax(logits, axis=1):
    shifted = logits - logits.max(axis=axis, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=axis, keepdims=True)


def softmax_ce_loss(logits, targets):
    """
    Pixel-averaged softmax cross-entropy.

    Inputs:
    - logits: (N, C, H, W)
    - targets: (N, H, W) labels in 1..C

    Returns (loss, dlogits) with dlogits = (softmax - onehot) / pixel count.
    """
    _check_4d('softmax_ce_loss', logits)
    n, classes, height, width = logits.shape
    targets = np.asarray(targets)
    if targets.shape != (n, height, width):
        raise ShapeError(f'Targets {targets.shape} do not match logits {logits.shape}')
    if targets.size and (targets.min() < 1 or targets.max() > classes):
        raise LabelError(f'Targets must lie in 1..{classes}, got {targets.min()}..{targets.max()}')

    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    index = (targets.astype(np.int64) - 1)[:, None]
    pixels = n * height * width
    loss = -np.take_along_axis(log_probs, index, axis=1).sum() / pixels

    dlogits = np.exp(log_probs)
    np.put_along_axis(dlogits, index, np.take_along_axis(dlogits, index, axis=1) - 1, axis=1)
    dlogits /= pixels
    return float(loss), dlogits
