"""
Mini DeepUNet: first convolution, Down/Up block ladder and the bridge norm.
"""

from nn.modules import BatchNorm2d, Conv2d, Module, ReLU
from treesegnet.exceptions import ShapeError

from .blocks import DownBlock, UpBlock


class SegmentationNet(Module):
    """Encoder-decoder over (B, in_channels, T, T) tiles.

    ``forward`` returns the bridge-normalized decoder features together with
    the first convolution's K maps, which the tree block reuses.
    """

    def __init__(self, spec):
        super().__init__()
        self.depth = spec.depth
        self.stem = Conv2d(spec.in_channels, spec.first_channels, kernel=3)
        self.stem_relu = ReLU()
        widths = (spec.first_channels, *spec.base_channels)
        for level in range(spec.depth):
            self.add_module(f'down{level + 1}', DownBlock(widths[level], widths[level + 1]))
        # up1 sits at the bottom of the ladder and consumes the deepest skip.
        for level in range(spec.depth):
            deep = spec.depth - level
            self.add_module(
                f'up{level + 1}', UpBlock(widths[deep], widths[deep], widths[max(deep - 1, 1)])
            )
        self.bridge = BatchNorm2d(spec.feature_channels)

    @property
    def downs(self):
        return [getattr(self, f'down{level + 1}') for level in range(self.depth)]

    @property
    def ups(self):
        return [getattr(self, f'up{level + 1}') for level in range(self.depth)]

    def forward(self, x):
        divisor = 2 ** self.depth
        if x.ndim != 4 or x.shape[2] % divisor or x.shape[3] % divisor:
            raise ShapeError(f'Input {x.shape} must be (B, C, H, W) with H, W divisible by {divisor}')
        stem = self.stem_relu(self.stem(x))
        h = stem
        skips = []
        for down in self.downs:
            h, p = down(h)
            skips.append(p)
        for up, skip in zip(self.ups, reversed(skips)):
            h = up(h, skip)
        return self.bridge(h), stem

    def backward(self, dfeatures, dstem=None):
        dh = self.bridge.backward(dfeatures)
        dskips = [None] * self.depth
        for level in range(self.depth - 1, -1, -1):
            dh, dskips[self.depth - 1 - level] = self.ups[level].backward(dh)
        for level in range(self.depth - 1, -1, -1):
            dh = self.downs[level].backward((dh, dskips[level]))
        if dstem is not None:
            dh = dh + dstem
        return self.stem.backward(self.stem_relu.backward(dh))
