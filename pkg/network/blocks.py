"""
Residual building blocks: DeepUNet Down/Up blocks and the ResNeXt unit.

Each block owns its layers and caches one forward pass. Residual adds use the
identity when channel counts match and a 1x1 projection otherwise.
"""

from nn import functional as F
from nn.modules import Conv2d, MaxPool2, Module, ReLU, Upsample2
from treesegnet.exceptions import ShapeError


def _projection(in_channels, out_channels):
    if in_channels == out_channels:
        return None
    return Conv2d(in_channels, out_channels, kernel=1, relu_follows=False)


class DownBlock(Module):
    """u = relu(conv(x)); v = conv(u); p = v + proj(x); returns (maxpool(p), p)."""

    def __init__(self, in_channels, out_channels):
        super().__init__()
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.conv1 = Conv2d(in_channels, out_channels, kernel=3)
        self.relu = ReLU()
        self.conv2 = Conv2d(out_channels, out_channels, kernel=3, relu_follows=False)
        self.proj = _projection(in_channels, out_channels)
        self.pool = MaxPool2()

    def forward(self, x):
        v = self.conv2(self.relu(self.conv1(x)))
        p = v + (self.proj(x) if self.proj else x)
        return self.pool(p), p

    def backward(self, douts):
        dpooled, dskip = douts
        dp = self.pool.backward(dpooled)
        if dskip is not None:
            dp = dp + dskip
        dx = self.conv1.backward(self.relu.backward(self.conv2.backward(dp)))
        return dx + (self.proj.backward(dp) if self.proj else dp)


class UpBlock(Module):
    """z = up(y); a = relu(conv(z ++ skip)); returns conv(a) + proj(z)."""

    def __init__(self, in_channels, skip_channels, out_channels):
        super().__init__()
        self.in_channels = in_channels
        self.skip_channels = skip_channels
        self.out_channels = out_channels
        self.up = Upsample2()
        self.conv1 = Conv2d(in_channels + skip_channels, out_channels, kernel=3)
        self.relu = ReLU()
        self.conv2 = Conv2d(out_channels, out_channels, kernel=3, relu_follows=False)
        self.proj = _projection(in_channels, out_channels)
        self._split = None

    def forward(self, y, skip):
        z = self.up(y)
        if skip.shape[0] != z.shape[0] or skip.shape[2:] != z.shape[2:]:
            raise ShapeError(f'Skip features {skip.shape} do not match upsampled {z.shape}')
        joined, self._split = F.concat_forward([z, skip])
        b = self.conv2(self.relu(self.conv1(joined)))
        return b + (self.proj(z) if self.proj else z)

    def backward(self, dout):
        djoined = self.conv1.backward(self.relu.backward(self.conv2.backward(dout)))
        dz, dskip = F.concat_backward(djoined, self._split)
        dz = dz + (self.proj.backward(dout) if self.proj else dout)
        return self.up.backward(dz), dskip


class ResNeXtUnit(Module):
    """Bottleneck unit with a grouped 3x3 convolution and a residual add."""

    def __init__(self, in_channels, cardinality, bottleneck_channels, out_channels):
        super().__init__()
        if bottleneck_channels % cardinality:
            raise ShapeError(
                f'Bottleneck width {bottleneck_channels} is not divisible by cardinality {cardinality}'
            )
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.reduce = Conv2d(in_channels, bottleneck_channels, kernel=1)
        self.reduce_relu = ReLU()
        self.group = Conv2d(bottleneck_channels, bottleneck_channels, kernel=3, groups=cardinality)
        self.group_relu = ReLU()
        self.expand = Conv2d(bottleneck_channels, out_channels, kernel=1)
        self.proj = _projection(in_channels, out_channels)
        self.out_relu = ReLU()

    def forward(self, x):
        y = self.expand(self.group_relu(self.group(self.reduce_relu(self.reduce(x)))))
        return self.out_relu(y + (self.proj(x) if self.proj else x))

    def backward(self, dout):
        dsum = self.out_relu.backward(dout)
        dx = self.reduce.backward(
            self.reduce_relu.backward(self.group.backward(self.group_relu.backward(self.expand.backward(dsum))))
        )
        return dx + (self.proj.backward(dsum) if self.proj else dsum)

    def weight_count(self):
        return sum(module.weight.size for module in self.modules() if isinstance(module, Conv2d))
