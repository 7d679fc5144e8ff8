"""
Per-pixel correctness rendering.
"""

import numpy as np

from treesegnet.exceptions import ShapeError

CORRECT_COLOR = (0, 255, 0)
WRONG_COLOR = (255, 0, 0)


def render_error_map(reference, prediction):
    """Green where prediction equals reference, red elsewhere; H x W x 3 uint8."""
    reference = np.asarray(reference)
    prediction = np.asarray(prediction)
    if reference.shape != prediction.shape or reference.ndim != 2:
        raise ShapeError(
            f'Error map needs two equal 2-D label maps, got {reference.shape} and {prediction.shape}'
        )
    image = np.empty(reference.shape + (3,), dtype=np.uint8)
    image[...] = WRONG_COLOR
    image[reference == prediction] = CORRECT_COLOR
    return image
