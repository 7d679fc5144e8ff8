"""
Stochastic gradient descent with momentum.
"""

from treesegnet.exceptions import ShapeError

DEFAULT_MOMENTUM = 0.9


def sgd_momentum_step(params, grads, lr, momentum=DEFAULT_MOMENTUM):
    """v <- momentum * v + g, then w <- w - lr * v, for each parameter in place."""
    params = list(params)
    grads = list(grads)
    if len(params) != len(grads):
        raise ShapeError(f'{len(params)} parameters but {len(grads)} gradients')
    for param, grad in zip(params, grads):
        if grad.shape != param.shape:
            raise ShapeError(f'Gradient {grad.shape} does not match parameter {param.shape}')
        param.velocity *= momentum
        param.velocity += grad
        param.value -= lr * param.velocity


class SGD:
    def __init__(self, params, lr, momentum=DEFAULT_MOMENTUM):
        self.params = list(params)
        self.lr = lr
        self.momentum = momentum

    def step(self):
        sgd_momentum_step(self.params, [param.grad for param in self.params], self.lr, self.momentum)

    def zero_grad(self):
        for param in self.params:
            param.zero_grad()

    def reset(self):
        """Drop accumulated momentum."""
        for param in self.params:
            param.reset_velocity()
