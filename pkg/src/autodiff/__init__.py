"""Reverse-mode automatic differentiation over dense 2-D float matrices."""

from .gradcheck import FD_STEP, check_gradients, max_relative_error, numeric_gradient
from .nn import BatchNorm, Linear, batch_norm
from .optim import Adam, AdamConfig, AdamState, adam_step
from .tensor import (
    SecondOrderError,
    ShapeError,
    Tensor,
    add,
    concat,
    constant,
    exp,
    grad_enabled,
    gradient,
    gradient_values,
    leaky_relu,
    log,
    log_softmax,
    matmul,
    mul,
    no_grad,
    norm,
    parameter,
    reciprocal,
    reduce_mean,
    reduce_sum,
    row_norm,
    scalar_mul,
    slice_cols,
    slice_rows,
    softmax,
    softplus,
    sqrt,
    square,
    sub,
    tanh,
)

__all__ = [
    "FD_STEP",
    "Adam",
    "AdamConfig",
    "AdamState",
    "BatchNorm",
    "Linear",
    "SecondOrderError",
    "ShapeError",
    "Tensor",
    "adam_step",
    "add",
    "batch_norm",
    "check_gradients",
    "concat",
    "constant",
    "exp",
    "grad_enabled",
    "gradient",
    "gradient_values",
    "leaky_relu",
    "log",
    "log_softmax",
    "matmul",
    "max_relative_error",
    "mul",
    "no_grad",
    "norm",
    "numeric_gradient",
    "parameter",
    "reciprocal",
    "reduce_mean",
    "reduce_sum",
    "row_norm",
    "scalar_mul",
    "slice_cols",
    "slice_rows",
    "softmax",
    "softplus",
    "sqrt",
    "square",
    "sub",
    "tanh",
]
