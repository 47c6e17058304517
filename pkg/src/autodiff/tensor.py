from __future__ import annotations

import threading
from contextlib import contextmanager
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

Shape = Tuple[int, int]

_state = threading.local()


def grad_enabled() -> bool:
    return bool(getattr(_state, "enabled", True))


@contextmanager
def no_grad() -> Iterator[None]:
    """Suppress tape recording on the current thread."""
    prev = grad_enabled()
    _state.enabled = False
    try:
        yield
    finally:
        _state.enabled = prev


@contextmanager
def _grad_mode(enabled: bool) -> Iterator[None]:
    prev = grad_enabled()
    _state.enabled = enabled
    try:
        yield
    finally:
        _state.enabled = prev


class ShapeError(ValueError):
    """Operand shapes do not fit the operation."""

    def __init__(self, op: str, *shapes: Shape) -> None:
        self.op = op
        self.shapes = tuple(shapes)
        joined = " vs ".join(f"{s[0]}x{s[1]}" for s in shapes)
        super().__init__(f"{op}: incompatible shapes {joined}")


class SecondOrderError(ValueError):
    """create_graph was requested through an op without a differentiable backward."""

    def __init__(self, op: str) -> None:
        self.op = op
        super().__init__(f"second-order gradients are not supported through op '{op}'")


def _as_matrix(values: object) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim == 0:
        return arr.reshape(1, 1)
    if arr.ndim == 1:
        return arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError(f"Tensor values must be at most 2-D, got ndim={arr.ndim}")
    return arr


class Tensor:
    """Dense real matrix that records the operations producing it.

    Every tensor is 2-D; scalars are 1x1. A tensor produced by an op while recording is
    enabled keeps a reference to the op and its parents, so the set of tensors reachable from
    an output forms the tape that ``gradient`` walks in reverse.
    """

    __slots__ = ("values", "requires_grad", "name", "_op", "_parents")

    def __init__(
        self, values: object, requires_grad: bool = False, name: Optional[str] = None
    ) -> None:
        self.values = _as_matrix(values)
        self.requires_grad = bool(requires_grad)
        self.name = name
        self._op: Optional[Op] = None
        self._parents: Tuple[Tensor, ...] = ()

    @property
    def shape(self) -> Shape:
        r, c = self.values.shape
        return int(r), int(c)

    @property
    def is_leaf(self) -> bool:
        return self._op is None

    @property
    def op_name(self) -> Optional[str]:
        return self._op.name if self._op is not None else None

    @property
    def T(self) -> Tensor:  # noqa: N802
        return apply(Transpose(), self)

    def numpy(self) -> np.ndarray:
        return self.values.copy()

    def item(self) -> float:
        if self.shape != (1, 1):
            raise ValueError(f"item() needs a 1x1 tensor, got {self.shape}")
        return float(self.values[0, 0])

    def detach(self) -> Tensor:
        return Tensor(self.values.copy())

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        op = f" op={self.op_name}" if self._op is not None else ""
        return f"Tensor(shape={self.shape}{label}{op} requires_grad={self.requires_grad})"

    # operators
    def __add__(self, other: object) -> Tensor:
        return add(self, other)

    def __radd__(self, other: object) -> Tensor:
        return add(other, self)

    def __sub__(self, other: object) -> Tensor:
        return sub(self, other)

    def __rsub__(self, other: object) -> Tensor:
        return sub(other, self)

    def __mul__(self, other: object) -> Tensor:
        return mul(self, other)

    def __rmul__(self, other: object) -> Tensor:
        return mul(other, self)

    def __truediv__(self, other: object) -> Tensor:
        if isinstance(other, Tensor):
            return mul(self, reciprocal(other))
        return scalar_mul(self, 1.0 / float(other))  # type: ignore[arg-type]

    def __neg__(self) -> Tensor:
        return apply(Neg(), self)

    def __matmul__(self, other: Tensor) -> Tensor:
        return matmul(self, other)

    def sum(self, axis: Optional[int] = None) -> Tensor:
        return reduce_sum(self, axis)

    def mean(self, axis: Optional[int] = None) -> Tensor:
        return reduce_mean(self, axis)


def constant(values: object) -> Tensor:
    return Tensor(values, requires_grad=False)


def parameter(values: object, name: Optional[str] = None) -> Tensor:
    return Tensor(values, requires_grad=True, name=name)


def _lift(x: object) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


class Op:
    """One differentiable operation.

    ``forward`` works on raw arrays. ``vjp`` receives the upstream gradient as a Tensor and
    returns one gradient Tensor (or None) per input. Ops whose ``vjp`` is written in terms of
    Tensor ops set ``second_order``; their backward pass is itself recorded when
    ``gradient(..., create_graph=True)`` runs.
    """

    name = "op"
    second_order = False

    def forward(self, *xs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def vjp(self, grad: Tensor, out: Tensor, *inputs: Tensor) -> Tuple[Optional[Tensor], ...]:
        raise NotImplementedError


def apply(op: Op, *inputs: Tensor) -> Tensor:
    values = op.forward(*(t.values for t in inputs))
    record = grad_enabled() and any(t.requires_grad for t in inputs)
    out = Tensor(values, requires_grad=record)
    if record:
        out._op = op
        out._parents = tuple(inputs)
    return out


def _broadcast_shape(op: str, a: Shape, b: Shape) -> Shape:
    dims = []
    for da, db in zip(a, b):
        if da == db or db == 1:
            dims.append(da)
        elif da == 1:
            dims.append(db)
        else:
            raise ShapeError(op, a, b)
    return dims[0], dims[1]


def _unbroadcast(grad: Tensor, shape: Shape) -> Tensor:
    out = grad
    if out.shape[0] != shape[0]:
        out = reduce_sum(out, axis=0)
    if out.shape[1] != shape[1]:
        out = reduce_sum(out, axis=1)
    return out


def _expand(grad: Tensor, shape: Shape) -> Tensor:
    if grad.shape == shape:
        return grad
    return add(Tensor(np.zeros(shape)), grad)


class MatMul(Op):
    name = "matmul"
    second_order = True

    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.shape[1] != b.shape[0]:
            raise ShapeError(self.name, a.shape, b.shape)  # type: ignore[arg-type]
        return a @ b

    def vjp(self, grad: Tensor, out: Tensor, *inputs: Tensor) -> Tuple[Optional[Tensor], ...]:
        a, b = inputs
        return matmul(grad, b.T), matmul(a.T, grad)


class Transpose(Op):
    name = "transpose"
    second_order = True

    def forward(self, a: np.ndarray) -> np.ndarray:
        return a.T.copy()

    def vjp(self, grad: Tensor, out: Tensor, *inputs: Tensor) -> Tuple[Optional[Tensor], ...]:
        return (grad.T,)


class Add(Op):
    name = "add"
    second_order = True

    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        _broadcast_shape(self.name, a.shape, b.shape)  # type: ignore[arg-type]
        return a + b

    def vjp(self, grad: Tensor, out: Tensor, *inputs: Tensor) -> Tuple[Optional[Tensor], ...]:
        a, b = inputs
        return _unbroadcast(grad, a.shape), _unbroadcast(grad, b.shape)


class Sub(Op):
    name = "sub"
    second_order = True

    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        _broadcast_shape(self.name, a.shape, b.shape)  # type: ignore[arg-type]
        return a - b

    def vjp(self, grad: Tensor, out: Tensor, *inputs: Tensor) -> Tuple[Optional[Tensor], ...]:
        a, b = inputs
        return _unbroadcast(grad, a.shape), _unbroadcast(-grad, b.shape)


class Neg(Op):
    name = "neg"
    second_order = True

    def forward(self, a: np.ndarray) -> np.ndarray:
        return -a

    def vjp(self, grad: Tensor, out: Tensor, *inputs: Tensor) -> Tuple[Optional[Tensor], ...]:
        return (-grad,)


class Mul(Op):
    name = "mul"
    second_order = True

    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        _broadcast_shape(self.name, a.shape, b.shape)  # type: ignore[arg-type]
        return a * b

    def vjp(self, grad: Tensor, out: Tensor, *inputs: Tensor) -> Tuple[Optional[Tensor], ...]:
        a, b = inputs
        ga = _unbroadcast(mul(grad, b), a.shape) if a.requires_grad else None
        gb = _unbroadcast(mul(grad, a), b.shape) if b.requires_grad else None
        return ga, gb


class ScalarMul(Op):
    name = "scalar_mul"
    second_order = True

    def __init__(self, c: float) -> None:
        self.c = float(c)

    def forward(self, a: np.ndarray) -> np.ndarray:
        return a * self.c

    def vjp(self, grad: Tensor, out: Tensor, *inputs: Tensor) -> Tuple[Optional[Tensor], ...]:
        return (scalar_mul(grad, self.c),)


class LeakyRelu(Op):
    name = "leaky_relu"
    second_order = True

    def __init__(self, slope: float) -> None:
        self.slope = float(slope)

    def forward(self, a: np.ndarray) -> np.ndarray:
        return np.where(a > 0, a, a * self.slope)

    def vjp(self, grad: Tensor, out: Tensor, *inputs: Tensor) -> Tuple[Optional[Tensor], ...]:
        (a,) = inputs
        mask = Tensor(np.where(a.values > 0, 1.0, self.slope))
        return (mul(grad, mask),)


class Square(Op):
    name = "square"
    second_order = True

    def forward(self, a: np.ndarray) -> np.ndarray:
        return a * a

    def vjp(self, grad: Tensor, out: Tensor, *inputs: Tensor) -> Tuple[Optional[Tensor], ...]:
        (a,) = inputs
        return (scalar_mul(mul(grad, a), 2.0),)


class Sqrt(Op):
    name = "sqrt"
    second_order = True

    def forward(self, a: np.ndarray) -> np.ndarray:
        return np.sqrt(a)

    def vjp(self, grad: Tensor, out: Tensor, *inputs: Tensor) -> Tuple[Optional[Tensor], ...]:
        return (scalar_mul(mul(grad, reciprocal(out)), 0.5),)


class Reciprocal(Op):
    name = "reciprocal"
    second_order = True

    def forward(self, a: np.ndarray) -> np.ndarray:
        return 1.0 / a

    def vjp(self, grad: Tensor, out: Tensor, *inputs: Tensor) -> Tuple[Optional[Tensor], ...]:
        return (-mul(grad, square(out)),)


class ReduceSum(Op):
    name = "reduce_sum"
    second_order = True

    def __init__(self, axis: Optional[int]) -> None:
        if axis not in (None, 0, 1):
            raise ValueError(f"reduce axis must be None, 0 or 1, got {axis!r}")
        self.axis = axis

    def forward(self, a: np.ndarray) -> np.ndarray:
        if self.axis is None:
            return np.array([[a.sum()]])
        return a.sum(axis=self.axis, keepdims=True)

    def vjp(self, grad: Tensor, out: Tensor, *inputs: Tensor) -> Tuple[Optional[Tensor], ...]:
        (a,) = inputs
        return (_expand(grad, a.shape),)


class ReduceMean(Op):
    name = "reduce_mean"
    second_order = True

    def __init__(self, axis: Optional[int]) -> None:
        if axis not in (None, 0, 1):
            raise ValueError(f"reduce axis must be None, 0 or 1, got {axis!r}")
        self.axis = axis

    def _count(self, shape: Shape) -> int:
        if self.axis is None:
            return shape[0] * shape[1]
        return shape[self.axis]

    def forward(self, a: np.ndarray) -> np.ndarray:
        if a.size == 0:
            raise ValueError("reduce_mean over an empty tensor")
        if self.axis is None:
            return np.array([[a.mean()]])
        return a.mean(axis=self.axis, keepdims=True)

    def vjp(self, grad: Tensor, out: Tensor, *inputs: Tensor) -> Tuple[Optional[Tensor], ...]:
        (a,) = inputs
        return (_expand(scalar_mul(grad, 1.0 / self._count(a.shape)), a.shape),)


# First-order only: their backward is computed on raw arrays.


class Tanh(Op):
    name = "tanh"

    def forward(self, a: np.ndarray) -> np.ndarray:
        return np.tanh(a)

    def vjp(self, grad: Tensor, out: Tensor, *inputs: Tensor) -> Tuple[Optional[Tensor], ...]:
        return (Tensor(grad.values * (1.0 - out.values**2)),)


class Exp(Op):
    name = "exp"

    def forward(self, a: np.ndarray) -> np.ndarray:
        return np.exp(a)

    def vjp(self, grad: Tensor, out: Tensor, *inputs: Tensor) -> Tuple[Optional[Tensor], ...]:
        return (Tensor(grad.values * out.values),)


class Log(Op):
    name = "log"

    def forward(self, a: np.ndarray) -> np.ndarray:
        return np.log(a)

    def vjp(self, grad: Tensor, out: Tensor, *inputs: Tensor) -> Tuple[Optional[Tensor], ...]:
        (a,) = inputs
        return (Tensor(grad.values / a.values),)


class Softplus(Op):
    name = "softplus"

    def forward(self, a: np.ndarray) -> np.ndarray:
        return np.logaddexp(0.0, a)

    def vjp(self, grad: Tensor, out: Tensor, *inputs: Tensor) -> Tuple[Optional[Tensor], ...]:
        (a,) = inputs
        sig = np.exp(-np.logaddexp(0.0, -a.values))
        return (Tensor(grad.values * sig),)


class Softmax(Op):
    """Row-wise softmax."""

    name = "softmax"

    def forward(self, a: np.ndarray) -> np.ndarray:
        shifted = a - a.max(axis=1, keepdims=True)
        e = np.exp(shifted)
        return e / e.sum(axis=1, keepdims=True)

    def vjp(self, grad: Tensor, out: Tensor, *inputs: Tensor) -> Tuple[Optional[Tensor], ...]:
        s = out.values
        g = grad.values
        return (Tensor(s * (g - (g * s).sum(axis=1, keepdims=True))),)


class LogSoftmax(Op):
    """Row-wise log-softmax."""

    name = "log_softmax"

    def forward(self, a: np.ndarray) -> np.ndarray:
        shifted = a - a.max(axis=1, keepdims=True)
        return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))

    def vjp(self, grad: Tensor, out: Tensor, *inputs: Tensor) -> Tuple[Optional[Tensor], ...]:
        g = grad.values
        return (Tensor(g - np.exp(out.values) * g.sum(axis=1, keepdims=True)),)


class Concat(Op):
    name = "concat"

    def __init__(self, axis: int) -> None:
        if axis not in (0, 1):
            raise ValueError(f"concat axis must be 0 or 1, got {axis!r}")
        self.axis = axis
        self._sizes: Tuple[int, ...] = ()

    def forward(self, *xs: np.ndarray) -> np.ndarray:
        other = 1 - self.axis
        ref = xs[0].shape[other]
        for x in xs[1:]:
            if x.shape[other] != ref:
                raise ShapeError(self.name, xs[0].shape, x.shape)  # type: ignore[arg-type]
        self._sizes = tuple(int(x.shape[self.axis]) for x in xs)
        return np.concatenate(xs, axis=self.axis)

    def vjp(self, grad: Tensor, out: Tensor, *inputs: Tensor) -> Tuple[Optional[Tensor], ...]:
        cuts = np.cumsum(self._sizes)[:-1]
        parts = np.split(grad.values, cuts, axis=self.axis)
        return tuple(Tensor(p) for p in parts)


class Slice(Op):
    name = "slice"

    def __init__(self, rows: slice, cols: slice) -> None:
        self.rows = rows
        self.cols = cols

    def forward(self, a: np.ndarray) -> np.ndarray:
        out = a[self.rows, self.cols]
        return out.copy()

    def vjp(self, grad: Tensor, out: Tensor, *inputs: Tensor) -> Tuple[Optional[Tensor], ...]:
        (a,) = inputs
        full = np.zeros(a.shape)
        full[self.rows, self.cols] = grad.values
        return (Tensor(full),)


# functional API


def matmul(a: Tensor, b: Tensor) -> Tensor:
    return apply(MatMul(), a, b)


def add(a: object, b: object) -> Tensor:
    return apply(Add(), _lift(a), _lift(b))


def sub(a: object, b: object) -> Tensor:
    return apply(Sub(), _lift(a), _lift(b))


def mul(a: object, b: object) -> Tensor:
    if not isinstance(a, Tensor):
        return scalar_mul(_lift(b), float(a))  # type: ignore[arg-type]
    if not isinstance(b, Tensor):
        return scalar_mul(a, float(b))  # type: ignore[arg-type]
    return apply(Mul(), a, b)


def scalar_mul(a: Tensor, c: float) -> Tensor:
    return apply(ScalarMul(c), a)


def leaky_relu(a: Tensor, slope: float = 0.2) -> Tensor:
    return apply(LeakyRelu(slope), a)


def square(a: Tensor) -> Tensor:
    return apply(Square(), a)


def sqrt(a: Tensor) -> Tensor:
    return apply(Sqrt(), a)


def reciprocal(a: Tensor) -> Tensor:
    return apply(Reciprocal(), a)


def reduce_sum(a: Tensor, axis: Optional[int] = None) -> Tensor:
    return apply(ReduceSum(axis), a)


def reduce_mean(a: Tensor, axis: Optional[int] = None) -> Tensor:
    return apply(ReduceMean(axis), a)


def tanh(a: Tensor) -> Tensor:
    return apply(Tanh(), a)


def exp(a: Tensor) -> Tensor:
    return apply(Exp(), a)


def log(a: Tensor) -> Tensor:
    return apply(Log(), a)


def softplus(a: Tensor) -> Tensor:
    return apply(Softplus(), a)


def softmax(a: Tensor) -> Tensor:
    return apply(Softmax(), a)


def log_softmax(a: Tensor) -> Tensor:
    return apply(LogSoftmax(), a)


def concat(tensors: Sequence[Tensor], axis: int = 1) -> Tensor:
    if not tensors:
        raise ValueError("concat needs at least one tensor")
    if len(tensors) == 1:
        return tensors[0]
    return apply(Concat(axis), *tensors)


def slice_cols(a: Tensor, start: int, stop: int) -> Tensor:
    if not (0 <= start < stop <= a.shape[1]):
        raise ShapeError("slice", a.shape, (a.shape[0], stop - start))
    return apply(Slice(slice(None), slice(start, stop)), a)


def slice_rows(a: Tensor, start: int, stop: int) -> Tensor:
    if not (0 <= start <= stop <= a.shape[0]):
        raise ShapeError("slice", a.shape, (stop - start, a.shape[1]))
    return apply(Slice(slice(start, stop), slice(None)), a)


def norm(a: Tensor, axis: Optional[int] = None, eps: float = 0.0) -> Tensor:
    """Euclidean norm over all entries (axis=None) or per row/column; built from sqrt/sum/square."""
    s = reduce_sum(square(a), axis)
    if eps:
        s = add(s, eps)
    return sqrt(s)


def row_norm(a: Tensor, eps: float = 1e-12) -> Tensor:
    return norm(a, axis=1, eps=eps)


# reverse mode


def _tape_order(root: Tensor) -> List[Tensor]:
    """Nodes reachable from root through grad-requiring edges, parents before children."""
    order: List[Tensor] = []
    seen: set[int] = set()
    stack: List[Tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if parent.requires_grad and id(parent) not in seen:
                stack.append((parent, False))
    return order


def gradient(
    output: Tensor,
    params: Sequence[Tensor],
    create_graph: bool = False,
    allow_unused: bool = False,
) -> List[Tensor]:
    """Reverse-mode gradients of a 1x1 ``output`` w.r.t. each leaf in ``params``.

    Every tape node is visited once in reverse topological order; gradients reaching a node
    through several paths are summed. With ``create_graph`` the backward computation is itself
    recorded, so the returned tensors can be differentiated again.
    """
    if output.shape != (1, 1):
        raise ValueError(f"gradient needs a scalar (1x1) output, got {output.shape}")
    for p in params:
        if not p.is_leaf:
            raise ValueError(f"gradient target {p!r} is not a leaf of the tape")

    order = _tape_order(output) if output.requires_grad else []
    on_tape = {id(n) for n in order}
    missing = [p for p in params if id(p) not in on_tape]
    if missing and not allow_unused:
        names = ", ".join(p.name or repr(p) for p in missing)
        raise ValueError(f"parameter not on the tape of this output: {names}")

    wanted = {id(p) for p in params}
    # nodes lying on some path between a wanted leaf and the output
    needed: set[int] = set()
    for node in order:
        if id(node) in wanted or any(id(p) in needed for p in node._parents):
            needed.add(id(node))

    grads: Dict[int, Tensor] = {id(output): Tensor(np.ones((1, 1)))}
    with _grad_mode(create_graph):
        for node in reversed(order):
            g = grads.get(id(node))
            if g is None or node._op is None or id(node) not in needed:
                continue
            if id(node) not in wanted:
                del grads[id(node)]
            if create_graph and not node._op.second_order:
                raise SecondOrderError(node._op.name)
            parent_grads = node._op.vjp(g, node, *node._parents)
            for parent, pg in zip(node._parents, parent_grads):
                if pg is None or id(parent) not in needed:
                    continue
                if pg.shape != parent.shape:
                    raise ShapeError(f"{node._op.name} backward", pg.shape, parent.shape)
                prev = grads.get(id(parent))
                grads[id(parent)] = pg if prev is None else add(prev, pg)

    out: List[Tensor] = []
    for p in params:
        g = grads.get(id(p))
        out.append(g if g is not None else Tensor(np.zeros(p.shape)))
    return out


def gradient_values(
    output: Tensor, params: Sequence[Tensor], allow_unused: bool = False
) -> List[np.ndarray]:
    grads = gradient(output, params, create_graph=False, allow_unused=allow_unused)
    return [g.values for g in grads]
