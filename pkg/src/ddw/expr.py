"""Exact multivariate polynomial arithmetic over declared phase-space variables.

Coefficients are ``fractions.Fraction`` throughout; nothing in the symbolic
path ever touches a float.  Variables carry a kind tag, a base name and an
index tuple, and sort by (kind, base, indices) so that every expression has
one canonical written form.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Tuple, Union


class VarKind(IntEnum):
    COORDINATE = 0
    FIELD = 1
    MOMENTUM = 2
    JET = 3
    # kinds below appear only in emitted equations, never in phase-space algebra
    JET2 = 4
    MOMENTUM_JET = 5
    FLUX = 6
    FLUX_JET = 7
    FLUX_DERIV = 8


@dataclass(frozen=True, order=False)
class Variable:
    """A single scalar unknown: coordinate, field component, polymomentum or jet.

    ``indices`` holds spacetime index values.  For a polymomentum the first
    entry is the polymomentum index mu of p^mu_a and the rest are the field
    component indices; jets follow the same layout for d_mu applied to a
    component.
    """

    kind: VarKind
    base: str
    indices: Tuple[int, ...] = ()

    def sort_key(self):
        return (int(self.kind), self.base, self.indices)

    def __lt__(self, other: "Variable"):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        kind = self.kind
        idx = self.indices
        if kind == VarKind.COORDINATE:
            return "x[%d]" % idx[0]
        if kind == VarKind.FIELD:
            if not idx:
                return self.base
            return "%s[%s]" % (self.base, ",".join(str(i) for i in idx))
        if kind == VarKind.FLUX:
            return "%s[%d]" % (self.base, idx[0])
        if kind == VarKind.FLUX_JET:
            return "d(%s[%d],%d)" % (self.base, idx[1], idx[0])
        if kind == VarKind.FLUX_DERIV:
            comp = Variable(VarKind.FIELD, self.base, idx[1:])
            return "DS(%d,%s)" % (idx[0], comp)
        if kind == VarKind.MOMENTUM:
            comp = Variable(VarKind.FIELD, self.base, idx[1:])
            return "p(%s,%d)" % (comp, idx[0])
        if kind == VarKind.JET:
            comp = Variable(VarKind.FIELD, self.base, idx[1:])
            return "d(%s,%d)" % (comp, idx[0])
        if kind == VarKind.JET2:
            comp = Variable(VarKind.FIELD, self.base, idx[2:])
            return "d(d(%s,%d),%d)" % (comp, idx[0], idx[1])
        comp = Variable(VarKind.FIELD, self.base, idx[2:])
        return "d(p(%s,%d),%d)" % (comp, idx[1], idx[0])

    __repr__ = __str__


Monomial = Tuple[Tuple[Variable, int], ...]
Rational = Union[int, Fraction]

_ONE_MONO: Monomial = ()


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    merged = dict(a)
    for var, exp in b:
        merged[var] = merged.get(var, 0) + exp
    return tuple(sorted(merged.items(), key=lambda it: it[0].sort_key()))


def _mono_key(mono: Monomial):
    return tuple((v.sort_key(), e) for v, e in mono)


class Expression:
    """Sparse polynomial: a map from monomials to nonzero Fraction coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        clean = {}
        if terms:
            for mono, coeff in terms.items():
                if coeff:
                    clean[mono] = Fraction(coeff)
        self.terms: dict = clean

    # -- constructors -------------------------------------------------------

    @staticmethod
    def const(value: Rational) -> "Expression":
        value = Fraction(value)
        return Expression({_ONE_MONO: value} if value else {})

    @staticmethod
    def var(v: Variable) -> "Expression":
        return Expression({((v, 1),): Fraction(1)})

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and _ONE_MONO in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("expression is not constant: %s" % self)
        return self.terms.get(_ONE_MONO, Fraction(0))

    def variables(self) -> set:
        out = set()
        for mono in self.terms:
            for var, _ in mono:
                out.add(var)
        return out

    def total_degree(self) -> int:
        deg = 0
        for mono in self.terms:
            deg = max(deg, sum(e for _, e in mono))
        return deg

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other) -> "Expression":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for mono, coeff in other.terms.items():
            s = out.get(mono, Fraction(0)) + coeff
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        return Expression(out)

    __radd__ = __add__

    def __neg__(self) -> "Expression":
        return Expression({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Expression":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Expression":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "Expression":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _mono_mul(m1, m2)
                s = out.get(mono, Fraction(0)) + c1 * c2
                if s:
                    out[mono] = s
                else:
                    out.pop(mono, None)
        return Expression(out)

    __rmul__ = __mul__

    def __pow__(self, exp: int) -> "Expression":
        if exp < 0:
            raise ValueError("negative power of a polynomial")
        result = Expression.const(1)
        base = self
        while exp:
            if exp & 1:
                result = result * base
            base = base * base
            exp >>= 1
        return result

    def __eq__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset((self._hashable_mono(m), c) for m, c in self.terms.items()))

    @staticmethod
    def _hashable_mono(mono: Monomial):
        return mono

    # -- calculus and substitution ------------------------------------------

    def diff(self, var: Variable) -> "Expression":
        out: dict = {}
        for mono, coeff in self.terms.items():
            for i, (v, e) in enumerate(mono):
                if v == var:
                    rest = mono[:i] + ((v, e - 1),) + mono[i + 1:] if e > 1 else mono[:i] + mono[i + 1:]
                    s = out.get(rest, Fraction(0)) + coeff * e
                    if s:
                        out[rest] = s
                    else:
                        out.pop(rest, None)
                    break
        return Expression(out)

    def substitute(self, rules: Mapping[Variable, "Expression"], fixpoint: bool = False) -> "Expression":
        """Replace variables by expressions; optionally iterate to a fixpoint.

        With ``fixpoint`` the rule set must be terminating (the callers only
        ever build triangular rule systems).
        """
        current = self
        for _ in range(64):
            hit = False
            out = Expression.const(0)
            for mono, coeff in current.terms.items():
                factor = Expression.const(coeff)
                for var, exp in mono:
                    repl = rules.get(var)
                    if repl is not None:
                        hit = True
                        factor = factor * (repl ** exp)
                    else:
                        factor = factor * (Expression.var(var) ** exp)
                out = out + factor
            current = out
            if not hit or not fixpoint:
                return current
        raise RuntimeError("substitution did not reach a fixpoint")

    def evaluate(self, env: Mapping[Variable, float]) -> float:
        total = 0.0
        for mono, coeff in self.terms.items():
            val = float(coeff)
            for var, exp in mono:
                val *= env[var] ** exp
            total += val
        return total

    # -- printing -----------------------------------------------------------

    def sorted_terms(self) -> Iterator[Tuple[Monomial, Fraction]]:
        return iter(sorted(self.terms.items(), key=lambda it: _mono_key(it[0])))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, coeff in self.sorted_terms():
            factors = []
            for var, exp in mono:
                factors.append(str(var) if exp == 1 else "%s^%d" % (var, exp))
            body = "*".join(factors)
            if not body:
                frag = _frac_str(abs(coeff))
            elif abs(coeff) == 1:
                frag = body
            else:
                frag = "%s*%s" % (_frac_str(abs(coeff)), body)
            sign = "-" if coeff < 0 else "+"
            parts.append((sign, frag))
        first_sign, first = parts[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, frag in parts[1:]:
            text += " %s %s" % (sign, frag)
        return text

    __repr__ = __str__


def _frac_str(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return "%d/%d" % (value.numerator, value.denominator)


def _coerce(value) -> Expression | None:
    if isinstance(value, Expression):
        return value
    if isinstance(value, (int, Fraction)):
        return Expression.const(value)
    return None


ZERO = Expression.const(0)
ONE = Expression.const(1)


def expr_sum(items: Iterable[Expression]) -> Expression:
    total = ZERO
    for item in items:
        total = total + item
    return total
