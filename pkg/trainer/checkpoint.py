"""
Pass checkpoints: network weights plus the run's pass history.
"""

from network.model import TreeSegNet
from network.spec import NetworkSpec
from nn.checkpoint import load_checkpoint, save_checkpoint
from treesegnet.exceptions import CheckpointError

from .config import TrainConfig
from .loop import PassRecord


def save_pass_checkpoint(path, network, config, history):
    meta = {
        'pass': history[-1].index,
        'spec': network.spec.to_dict(),
        'config': config.to_dict(),
        'history': [record.to_dict() for record in history],
    }
    return save_checkpoint(path, network.state_dict(), meta)


def load_pass_checkpoint(path):
    """Return (network, history, config) from a pass checkpoint."""
    state, meta = load_checkpoint(path)
    try:
        spec = NetworkSpec.from_dict(meta['spec'])
        config = TrainConfig.from_dict(meta['config'])
        history = [PassRecord.from_dict(item) for item in meta['history']]
    except KeyError as exc:
        raise CheckpointError(f'{path} is missing {exc.args[0]!r} in its header', code='checkpoint_meta')
    if not history or history[-1].index != meta.get('pass'):
        raise CheckpointError(f'{path} has an inconsistent pass history', code='checkpoint_meta')
    network = TreeSegNet(spec).load_state_dict(state)
    return network, history, config
