"""
Network hyperparameters and their JSON form.
"""

import json
from dataclasses import asdict, dataclass, field, replace

from treecut.tree import parse_tree, serialize_tree
from treesegnet.exceptions import ConfigError, FormatError

IN_CHANNELS = 5


@dataclass(frozen=True)
class NetworkSpec:
    """Shape of a TreeSegNet network.

    ``first_channels`` (K) is the width of the first convolution, which is
    also the width of the concatenating connection into every tree unit.
    ``class_tree`` None builds the no-tree baseline.
    """

    depth: int = 3
    first_channels: int = 64
    base_channels: tuple = (16, 32, 64)
    cardinality: int = 8
    bottleneck_channels: int = 32
    unit_channels: int = 32
    num_classes: int = 6
    class_tree: object = field(default=None, compare=True)
    in_channels: int = IN_CHANNELS
    dsm_scale: float = 10.0

    def __post_init__(self):
        object.__setattr__(self, 'base_channels', tuple(int(c) for c in self.base_channels))
        if self.depth < 1:
            raise ConfigError(f'depth must be >= 1, got {self.depth}')
        if len(self.base_channels) != self.depth:
            raise ConfigError(f'{len(self.base_channels)} base channel widths for depth {self.depth}')
        if min(self.first_channels, self.unit_channels, self.bottleneck_channels, *self.base_channels) < 1:
            raise ConfigError('Channel counts must be >= 1')
        if self.bottleneck_channels % self.cardinality:
            raise ConfigError(
                f'Bottleneck width {self.bottleneck_channels} is not divisible by cardinality {self.cardinality}'
            )
        if self.num_classes < 2:
            raise ConfigError(f'Need at least 2 classes, got {self.num_classes}')
        if self.dsm_scale <= 0:
            raise ConfigError(f'dsm_scale must be positive, got {self.dsm_scale}')
        if self.class_tree is not None and self.class_tree.classes != frozenset(range(1, self.num_classes + 1)):
            raise ConfigError(
                f'Tree leaves {sorted(self.class_tree.classes)} are not the classes 1..{self.num_classes}',
                code='leaf_mismatch',
            )

    @property
    def feature_channels(self):
        """Width of the decoder output and of the bridge norm."""
        return self.base_channels[0]

    @property
    def divisor(self):
        return 2 ** self.depth

    def with_tree(self, class_tree):
        return replace(self, class_tree=class_tree)

    def to_dict(self):
        data = asdict(self)
        data['base_channels'] = list(self.base_channels)
        data['class_tree'] = serialize_tree(self.class_tree) if self.class_tree is not None else None
        return data

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        known = {name for name in cls.__dataclass_fields__}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f'Unknown network spec keys: {", ".join(unknown)}')
        tree = data.get('class_tree')
        if isinstance(tree, str):
            data['class_tree'] = parse_tree(tree)
        return cls(**data)

    @classmethod
    def from_json(cls, text):
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise FormatError(f'Network spec is not valid JSON: {exc.msg}', position=f'line {exc.lineno}')
