"""
Step learning-rate schedule.
"""

from treesegnet.exceptions import DataError

DECAY = 10.0


def lr_at(step, total_steps, initial=0.01):
    """``initial`` for the first half of the steps, /10 until three quarters, /100 after."""
    if total_steps < 1 or not 0 <= step < total_steps:
        raise DataError(f'Step {step} is outside [0, {total_steps})', code='schedule_step')
    if 2 * step < total_steps:
        return initial
    if 4 * step < 3 * total_steps:
        return initial / DECAY
    return initial / (DECAY * DECAY)
