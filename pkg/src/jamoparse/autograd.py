"""Reverse-mode differentiation over dense numpy arrays.

A graph is assembled dynamically while the forward pass runs and is torn
down afterwards; only Parameter gradients survive a backward() call.
Vectors are 1-d arrays, weight matrices 2-d, scalars 0-d. A graph is
single-threaded; a finished parameter set may be shared read-only.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np


class ShapeMismatchError(ValueError):
    """Operands with incompatible shapes."""


class Node:
    """One value in the computation graph."""

    __slots__ = ("value", "grad", "parents", "backward_fn")

    def __init__(self, value, parents=(), backward_fn=None):
        self.value = value
        self.grad = None
        self.parents = parents
        self.backward_fn = backward_fn

    @property
    def shape(self):
        return self.value.shape

    def __repr__(self):
        return "Node(shape=%s)" % (self.value.shape,)


class Parameter(Node):
    """Named leaf tensor with a persistent, same-shaped gradient slot."""

    __slots__ = ("name",)

    def __init__(self, name: str, value: np.ndarray):
        super().__init__(value)
        self.name = name
        self.grad = np.zeros_like(value)

    def __repr__(self):
        return "Parameter(%r, shape=%s)" % (self.name, self.value.shape)


def constant(value, dtype=np.float64) -> Node:
    """Wrap a plain array as a leaf node (no gradient tracking)."""
    return Node(np.asarray(value, dtype=dtype))


def _accumulate(node: Node, delta) -> None:
    if node.grad is None:
        node.grad = np.zeros_like(node.value)
    node.grad += delta


def add(a: Node, b: Node) -> Node:
    if a.value.shape != b.value.shape:
        raise ShapeMismatchError("add: %s vs %s" % (a.value.shape, b.value.shape))
    out = Node(a.value + b.value, (a, b))

    def backward_fn(grad):
        _accumulate(a, grad)
        _accumulate(b, grad)

    out.backward_fn = backward_fn
    return out


def sub(a: Node, b: Node) -> Node:
    if a.value.shape != b.value.shape:
        raise ShapeMismatchError("sub: %s vs %s" % (a.value.shape, b.value.shape))
    out = Node(a.value - b.value, (a, b))

    def backward_fn(grad):
        _accumulate(a, grad)
        _accumulate(b, -grad)

    out.backward_fn = backward_fn
    return out


def mul(a: Node, b: Node) -> Node:
    """Elementwise product."""
    if a.value.shape != b.value.shape:
        raise ShapeMismatchError("mul: %s vs %s" % (a.value.shape, b.value.shape))
    out = Node(a.value * b.value, (a, b))

    def backward_fn(grad):
        _accumulate(a, grad * b.value)
        _accumulate(b, grad * a.value)

    out.backward_fn = backward_fn
    return out


def scale(a: Node, factor: float) -> Node:
    out = Node(a.value * factor, (a,))

    def backward_fn(grad):
        _accumulate(a, grad * factor)

    out.backward_fn = backward_fn
    return out


def tanh(a: Node) -> Node:
    out = Node(np.tanh(a.value), (a,))

    def backward_fn(grad):
        _accumulate(a, grad * (1.0 - out.value * out.value))

    out.backward_fn = backward_fn
    return out


def sigmoid(a: Node) -> Node:
    x = a.value
    # branch keeps exp() off large positive arguments
    val = np.where(x >= 0, 1.0 / (1.0 + np.exp(-np.abs(x))),
                   np.exp(-np.abs(x)) / (1.0 + np.exp(-np.abs(x))))
    out = Node(val, (a,))

    def backward_fn(grad):
        _accumulate(a, grad * out.value * (1.0 - out.value))

    out.backward_fn = backward_fn
    return out


def matvec(w: Node, x: Node) -> Node:
    """2-d weight times 1-d vector."""
    if w.value.ndim != 2 or x.value.ndim != 1 or w.value.shape[1] != x.value.shape[0]:
        raise ShapeMismatchError("matvec: %s @ %s" % (w.value.shape, x.value.shape))
    out = Node(w.value @ x.value, (w, x))

    def backward_fn(grad):
        _accumulate(w, np.outer(grad, x.value))
        _accumulate(x, w.value.T @ grad)

    out.backward_fn = backward_fn
    return out


def concat(parts: Sequence[Node]) -> Node:
    parts = tuple(parts)
    out = Node(np.concatenate([p.value for p in parts]), parts)
    sizes = [p.value.shape[0] for p in parts]

    def backward_fn(grad):
        offset = 0
        for part, size in zip(parts, sizes):
            _accumulate(part, grad[offset:offset + size])
            offset += size

    out.backward_fn = backward_fn
    return out


def vslice(a: Node, start: int, stop: int) -> Node:
    out = Node(a.value[start:stop], (a,))

    def backward_fn(grad):
        if a.grad is None:
            a.grad = np.zeros_like(a.value)
        a.grad[start:stop] += grad

    out.backward_fn = backward_fn
    return out


def row(table: Node, index: int) -> Node:
    """Row lookup into a 2-d table (embedding access)."""
    out = Node(table.value[index], (table,))

    def backward_fn(grad):
        if table.grad is None:
            table.grad = np.zeros_like(table.value)
        table.grad[index] += grad

    out.backward_fn = backward_fn
    return out


def pick(a: Node, index: int) -> Node:
    """Single element of a vector, as a 0-d node."""
    out = Node(a.value[index], (a,))

    def backward_fn(grad):
        if a.grad is None:
            a.grad = np.zeros_like(a.value)
        a.grad[index] += grad

    out.backward_fn = backward_fn
    return out


def vsum(a: Node) -> Node:
    """Sum of all elements, as a 0-d node."""
    out = Node(np.sum(a.value), (a,))

    def backward_fn(grad):
        _accumulate(a, np.full_like(a.value, grad))

    out.backward_fn = backward_fn
    return out


def add_n(nodes: Sequence[Node]) -> Node:
    """Sum of same-shaped nodes; handy for accumulating loss terms."""
    nodes = tuple(nodes)
    if not nodes:
        raise ValueError("add_n needs at least one node")
    total = nodes[0].value
    for node in nodes[1:]:
        total = total + node.value
    out = Node(total, nodes)

    def backward_fn(grad):
        for node in nodes:
            _accumulate(node, grad)

    out.backward_fn = backward_fn
    return out


def affine(pairs: Sequence[tuple[Node, Node]], bias: Node) -> Node:
    """bias + sum of matrix @ vector over all pairs."""
    pairs = tuple(pairs)
    if bias.value.ndim != 1:
        raise ShapeMismatchError("affine: bias must be a vector, got %s" % (bias.value.shape,))
    pre = bias.value.copy()
    for i, (w, x) in enumerate(pairs):
        if (w.value.ndim != 2 or x.value.ndim != 1
                or w.value.shape[1] != x.value.shape[0]):
            raise ShapeMismatchError(
                "affine: pair %d has %s @ %s" % (i, w.value.shape, x.value.shape))
        if w.value.shape[0] != bias.value.shape[0]:
            raise ShapeMismatchError(
                "affine: pair %d rows %d != bias size %d"
                % (i, w.value.shape[0], bias.value.shape[0]))
        pre += w.value @ x.value
    parents = tuple(n for pair in pairs for n in pair) + (bias,)
    out = Node(pre, parents)

    def backward_fn(grad):
        for w, x in pairs:
            _accumulate(w, np.outer(grad, x.value))
            _accumulate(x, w.value.T @ grad)
        _accumulate(bias, grad)

    out.backward_fn = backward_fn
    return out


def affine_tanh(pairs: Sequence[tuple[Node, Node]], bias: Node) -> Node:
    """tanh of :func:`affine`; fused so the pre-activation is not retained."""
    pairs = tuple(pairs)
    linear = affine(pairs, bias)  # reuse shape checks
    out = Node(np.tanh(linear.value), linear.parents)

    def backward_fn(grad):
        grad_pre = grad * (1.0 - out.value * out.value)
        for w, x in pairs:
            _accumulate(w, np.outer(grad_pre, x.value))
            _accumulate(x, w.value.T @ grad_pre)
        _accumulate(bias, grad_pre)

    out.backward_fn = backward_fn
    return out


def _topological_order(root: Node) -> list[Node]:
    order: list[Node] = []
    visited: set[int] = set()
    stack: list[tuple[Node, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node.parents:
            if id(parent) not in visited:
                stack.append((parent, False))
    return order  # parents precede children


def backward(root: Node) -> None:
    """Fill gradients of every node reachable from ``root``.

    The root is seeded with ones (for a scalar loss this is d loss / d loss
    = 1). Parameter gradients accumulate across calls until cleared, so two
    separate losses backpropagated one after the other equal one summed pass.
    """
    order = _topological_order(root)
    if root.grad is None:
        root.grad = np.ones_like(root.value)
    else:
        root.grad = root.grad + np.ones_like(root.value)
    for node in reversed(order):
        if node.backward_fn is not None and node.grad is not None:
            node.backward_fn(node.grad)
