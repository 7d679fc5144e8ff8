"""
Stateful layers built on the functional primitives.

A module caches what its backward pass needs during ``forward`` and
accumulates parameter gradients in ``backward``. One module instance serves
one forward/backward at a time.
"""

from collections import OrderedDict

import numpy as np

from treesegnet.exceptions import CheckpointError, ShapeError

from . import functional as F
from .params import HE, ONES, UNIT, ZEROS, Parameter, initial_value


class Module:
    """Base class: registers child modules, parameters and buffers by attribute name."""

    def __init__(self):
        object.__setattr__(self, '_modules', OrderedDict())
        object.__setattr__(self, '_params', OrderedDict())
        object.__setattr__(self, '_buffers', OrderedDict())
        object.__setattr__(self, 'training', True)

    def __setattr__(self, name, value):
        if isinstance(value, Parameter):
            self._params[name] = value
        elif isinstance(value, Module):
            self._modules[name] = value
        object.__setattr__(self, name, value)

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)

    def forward(self, *args):
        raise NotImplementedError

    def backward(self, dout):
        raise NotImplementedError

    def add_module(self, name, module):
        setattr(self, name, module)
        return module

    def register_buffer(self, name, value):
        self._buffers[name] = value
        object.__setattr__(self, name, value)

    def named_modules(self, prefix=''):
        yield prefix, self
        for name, module in self._modules.items():
            yield from module.named_modules(f'{prefix}.{name}' if prefix else name)

    def modules(self):
        return [module for _, module in self.named_modules()]

    def named_parameters(self, prefix=''):
        for module_name, module in self.named_modules(prefix):
            for name, param in module._params.items():
                yield (f'{module_name}.{name}' if module_name else name), param

    def parameters(self):
        return [param for _, param in self.named_parameters()]

    def named_buffers(self, prefix=''):
        for module_name, module in self.named_modules(prefix):
            for name in module._buffers:
                yield (f'{module_name}.{name}' if module_name else name), module, name

    def initialize(self, seed, prefix=''):
        for name, param in self.named_parameters(prefix):
            param.set_value(initial_value(seed, name, param))
        for _, module, name in self.named_buffers(prefix):
            module._buffers[name][...] = 1.0 if name == 'running_var' else 0.0
        return self

    def train(self, mode=True):
        for module in self.modules():
            object.__setattr__(module, 'training', mode)
        return self

    def eval(self):
        return self.train(False)

    def zero_grad(self):
        for param in self.parameters():
            param.zero_grad()

    def reset_velocity(self):
        for param in self.parameters():
            param.reset_velocity()

    def astype(self, dtype):
        for param in self.parameters():
            param.astype(dtype)
        for _, module, name in self.named_buffers():
            module.register_buffer(name, module._buffers[name].astype(dtype))
        return self

    def num_parameters(self):
        return sum(param.size for param in self.parameters())

    def state_dict(self, prefix=''):
        """Parameter values and buffers by full dotted name."""
        state = OrderedDict()
        for name, param in self.named_parameters(prefix):
            state[name] = param.value
        for name, module, local in self.named_buffers(prefix):
            state[name] = module._buffers[local]
        return state

    def load_state_dict(self, state, prefix='', strict=True):
        own = self.state_dict(prefix)
        if strict:
            missing = sorted(set(own) - set(state))
            unexpected = sorted(set(state) - set(own))
            if missing or unexpected:
                raise CheckpointError(
                    f'State mismatch: missing {missing[:5]}, unexpected {unexpected[:5]}', code='state_keys'
                )
        for name, target in own.items():
            if name not in state:
                continue
            value = np.asarray(state[name])
            if value.shape != target.shape:
                raise CheckpointError(
                    f'{name} has shape {value.shape}, expected {target.shape}', code='state_shape'
                )
            target[...] = value
        return self


class Conv2d(Module):
    def __init__(self, in_channels, out_channels, kernel=3, groups=1, relu_follows=True):
        super().__init__()
        if in_channels % groups or out_channels % groups:
            raise ShapeError(f'Channels {in_channels}->{out_channels} not divisible by {groups} groups')
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel = kernel
        self.groups = groups
        fan_in = in_channels // groups * kernel * kernel
        self.weight = Parameter(
            (out_channels, in_channels // groups, kernel, kernel), HE if relu_follows else UNIT, fan_in
        )
        self.bias = Parameter((out_channels,), ZEROS)
        self._cache = None

    def forward(self, x):
        out, self._cache = F.conv2d_forward(x, self.weight.value, self.bias.value, self.groups)
        return out

    def backward(self, dout):
        dx, dw, db = F.conv2d_backward(dout, self._cache)
        self.weight.grad += dw
        self.bias.grad += db
        return dx


class ReLU(Module):
    def forward(self, x):
        out, self._cache = F.relu_forward(x)
        return out

    def backward(self, dout):
        return F.relu_backward(dout, self._cache)


class MaxPool2(Module):
    def __init__(self):
        super().__init__()
        self.ties = 0

    def forward(self, x):
        out, self._cache = F.maxpool2_forward(x)
        self.ties = self._cache[2]
        return out

    def backward(self, dout):
        return F.maxpool2_backward(dout, self._cache)


class Upsample2(Module):
    def forward(self, x):
        out, self._cache = F.upsample2_forward(x)
        return out

    def backward(self, dout):
        return F.upsample2_backward(dout, self._cache)


class BatchNorm2d(Module):
    def __init__(self, channels, momentum=F.BN_MOMENTUM, eps=F.BN_EPS):
        super().__init__()
        self.channels = channels
        self.momentum = momentum
        self.eps = eps
        self.gamma = Parameter((channels,), ONES)
        self.beta = Parameter((channels,), ZEROS)
        self.register_buffer('running_mean', np.zeros(channels, dtype=np.float32))
        self.register_buffer('running_var', np.ones(channels, dtype=np.float32))

    def forward(self, x):
        out, self._cache = F.batchnorm_forward(
            x, self.gamma.value, self.beta.value, self._buffers['running_mean'], self._buffers['running_var'],
            self.training, self.momentum, self.eps,
        )
        return out

    def backward(self, dout):
        dx, dgamma, dbeta = F.batchnorm_backward(dout, self._cache)
        self.gamma.grad += dgamma
        self.beta.grad += dbeta
        return dx


class Add(Module):
    def forward(self, a, b):
        out, _ = F.add_forward(a, b)
        return out

    def backward(self, dout):
        return F.add_backward(dout, None)


class Concat(Module):
    def forward(self, *tensors):
        out, self._cache = F.concat_forward(list(tensors))
        return out

    def backward(self, dout):
        return tuple(F.concat_backward(dout, self._cache))


class Sequential(Module):
    """Chain of single-input modules named '0', '1', ..."""

    def __init__(self, *layers):
        super().__init__()
        for index, layer in enumerate(layers):
            self.add_module(str(index), layer)

    def forward(self, x):
        for layer in self._modules.values():
            x = layer.forward(x)
        return x

    def backward(self, dout):
        for layer in reversed(self._modules.values()):
            dout = layer.backward(dout)
        return dout
