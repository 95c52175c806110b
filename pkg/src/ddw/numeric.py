"""Closed-form numeric function trees used by solution files.

Solution files assign each field component a function of the coordinates and
each flux component a function of coordinates and field values.  The trees
evaluate to floats and differentiate exactly with respect to field atoms;
coordinate derivatives are left to finite differencing by the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

from .expr import Variable

_FUNCTIONS = {
    "sin": (math.sin, "cos"),
    "cos": (math.cos, "sin"),
    "exp": (math.exp, "exp"),
}


@dataclass(frozen=True)
class Node:
    pass


@dataclass(frozen=True)
class Num(Node):
    value: float


@dataclass(frozen=True)
class Coord(Node):
    index: int


@dataclass(frozen=True)
class FieldVal(Node):
    var: Variable


@dataclass(frozen=True)
class Add(Node):
    args: Tuple[Node, ...]


@dataclass(frozen=True)
class Mul(Node):
    args: Tuple[Node, ...]


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exponent: int


@dataclass(frozen=True)
class Call(Node):
    fn: str
    arg: Node


ZERO = Num(0.0)
ONE = Num(1.0)


def evaluate(node: Node, x: Sequence[float], fields: Dict[Variable, float]) -> float:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Coord):
        return x[node.index]
    if isinstance(node, FieldVal):
        return fields[node.var]
    if isinstance(node, Add):
        return sum(evaluate(a, x, fields) for a in node.args)
    if isinstance(node, Mul):
        out = 1.0
        for a in node.args:
            out *= evaluate(a, x, fields)
        return out
    if isinstance(node, Pow):
        return evaluate(node.base, x, fields) ** node.exponent
    fn = _FUNCTIONS[node.fn][0]
    return fn(evaluate(node.arg, x, fields))


def diff_field(node: Node, var: Variable) -> Node:
    """Exact derivative with respect to one field atom."""
    if isinstance(node, (Num, Coord)):
        return ZERO
    if isinstance(node, FieldVal):
        return ONE if node.var == var else ZERO
    if isinstance(node, Add):
        return Add(tuple(diff_field(a, var) for a in node.args))
    if isinstance(node, Mul):
        pieces = []
        for i, a in enumerate(node.args):
            da = diff_field(a, var)
            if da == ZERO:
                continue
            pieces.append(Mul((da,) + node.args[:i] + node.args[i + 1:]))
        if not pieces:
            return ZERO
        return Add(tuple(pieces)) if len(pieces) > 1 else pieces[0]
    if isinstance(node, Pow):
        da = diff_field(node.base, var)
        if da == ZERO or node.exponent == 0:
            return ZERO
        return Mul((Num(float(node.exponent)),
                    Pow(node.base, node.exponent - 1), da))
    da = diff_field(node.arg, var)
    if da == ZERO:
        return ZERO
    if node.fn == "sin":
        outer: Node = Call("cos", node.arg)
    elif node.fn == "cos":
        outer = Mul((Num(-1.0), Call("sin", node.arg)))
    else:
        outer = Call("exp", node.arg)
    return Mul((outer, da))


def field_atoms(node: Node) -> set:
    if isinstance(node, FieldVal):
        return {node.var}
    if isinstance(node, (Add, Mul)):
        out = set()
        for a in node.args:
            out |= field_atoms(a)
        return out
    if isinstance(node, Pow):
        return field_atoms(node.base)
    if isinstance(node, Call):
        return field_atoms(node.arg)
    return set()
