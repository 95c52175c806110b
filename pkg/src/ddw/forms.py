"""Exterior calculus over a finite-dimensional polymomentum phase space.

A form is a finite sum of terms ``coeff * dY_1^...^dY_k ^ dx^{i_1}^...^dx^{i_m}``
where the vertical factors dY range over field and momentum variables, the
horizontal factors over coordinate differentials, and the coefficient is an
exact polynomial in phase-space variables.  Vertical factors are kept to the
left of horizontal ones, both blocks in canonical order; every wedge and
contraction tracks the resulting sign explicitly.

The Hodge star and its companions act on purely horizontal forms with respect
to a constant diagonal metric.  ``costar`` is the degree-weighted star used to
invert wedge products in the interior pairing ``bullet``; on Lorentzian
signatures it differs from the literal inverse star by an overall sign, which
is exactly what makes ``dx^a . u_b = +delta`` come out with a plus sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Tuple

from .expr import Expression, Variable, VarKind, ZERO

VertTuple = Tuple[Variable, ...]
HorizTuple = Tuple[int, ...]
TermKey = Tuple[VertTuple, HorizTuple]


@dataclass(frozen=True)
class Spacetime:
    """Dimension and diagonal metric signature, entries +1 or -1."""

    dim: int
    signature: Tuple[int, ...]

    def __post_init__(self):
        if len(self.signature) != self.dim:
            raise ValueError("signature length does not match dimension")
        if any(s not in (1, -1) for s in self.signature):
            raise ValueError("signature entries must be +1 or -1")

    def eta(self, i: int) -> int:
        """Diagonal metric entry; identical with upper or lower indices."""
        return self.signature[i]

    def dx(self, i: int) -> "Form":
        return Form(self, {((), (i,)): Expression.const(1)})

    def volume(self) -> "Form":
        return Form(self, {((), tuple(range(self.dim))): Expression.const(1)})

    def upsilon(self, alpha: int) -> "Form":
        """Contraction of the coordinate vector d/dx^alpha into the volume form."""
        rest = tuple(i for i in range(self.dim) if i != alpha)
        sign = Fraction((-1) ** alpha)
        return Form(self, {((), rest): Expression.const(sign)})

    def upsilon_sign(self, alpha: int) -> int:
        return (-1) ** alpha


def _sort_signed(items, key):
    """Insertion sort returning (sign, sorted tuple); None for a repeated item."""
    out = list(items)
    sign = 1
    for i in range(1, len(out)):
        j = i
        while j > 0 and key(out[j]) < key(out[j - 1]):
            out[j], out[j - 1] = out[j - 1], out[j]
            sign = -sign
            j -= 1
    for a, b in zip(out, out[1:]):
        if key(a) == key(b):
            return None
    return sign, tuple(out)


class Form:
    """Differential form with polynomial coefficients on one spacetime."""

    __slots__ = ("space", "terms")

    def __init__(self, space: Spacetime, terms: Mapping[TermKey, Expression] | None = None):
        self.space = space
        clean: Dict[TermKey, Expression] = {}
        if terms:
            for key, coeff in terms.items():
                if not coeff.is_zero():
                    clean[key] = coeff
        self.terms = clean

    @staticmethod
    def zero(space: Spacetime) -> "Form":
        return Form(space, {})

    @staticmethod
    def scalar(space: Spacetime, coeff: Expression) -> "Form":
        return Form(space, {((), ()): coeff})

    @staticmethod
    def vertical(space: Spacetime, var: Variable) -> "Form":
        """The vertical differential dY of a single field or momentum variable."""
        return Form(space, {((var,), ()): Expression.const(1)})

    # -- structure ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set:
        return {(len(v), len(h)) for v, h in self.terms}

    def coefficient(self, vert: VertTuple, horiz: HorizTuple) -> Expression:
        return self.terms.get((vert, horiz), ZERO)

    def map_coefficients(self, fn) -> "Form":
        return Form(self.space, {k: fn(c) for k, c in self.terms.items()})

    def variables(self) -> set:
        out = set()
        for (vert, _), coeff in self.terms.items():
            out.update(vert)
            out.update(coeff.variables())
        return out

    # -- linear operations --------------------------------------------------

    def _check(self, other: "Form"):
        if self.space != other.space:
            raise ValueError("forms live on different spacetimes")

    def __add__(self, other: "Form") -> "Form":
        self._check(other)
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            s = out.get(key, ZERO) + coeff
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
        return Form(self.space, out)

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __neg__(self) -> "Form":
        return Form(self.space, {k: -c for k, c in self.terms.items()})

    def __mul__(self, scalar) -> "Form":
        if isinstance(scalar, (int, Fraction)):
            scalar = Expression.const(scalar)
        if not isinstance(scalar, Expression):
            return NotImplemented
        return Form(self.space, {k: c * scalar for k, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self.space == other.space and self.terms == other.terms

    def __hash__(self):
        return hash((self.space, frozenset((k, hash(c)) for k, c in self.terms.items())))

    # -- multiplicative structure -------------------------------------------

    def wedge(self, other: "Form") -> "Form":
        self._check(other)
        out: Dict[TermKey, Expression] = {}
        for (v1, h1), c1 in self.terms.items():
            for (v2, h2), c2 in other.terms.items():
                # move the h1 block through the v2 block
                sign = Fraction((-1) ** (len(h1) * len(v2)))
                vs = _sort_signed(v1 + v2, key=lambda v: v.sort_key())
                if vs is None:
                    continue
                hs = _sort_signed(h1 + h2, key=lambda i: i)
                if hs is None:
                    continue
                sign *= vs[0] * hs[0]
                key = (vs[1], hs[1])
                s = out.get(key, ZERO) + sign * c1 * c2
                if s.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = s
        return Form(self.space, out)

    def vertical_differential(self) -> "Form":
        """Exterior derivative along field and momentum directions only."""
        out = Form.zero(self.space)
        for (vert, horiz), coeff in self.terms.items():
            for var in sorted(coeff.variables(), key=lambda v: v.sort_key()):
                if var.kind not in (VarKind.FIELD, VarKind.MOMENTUM):
                    continue
                partial = coeff.diff(var)
                if partial.is_zero():
                    continue
                vs = _sort_signed((var,) + vert, key=lambda v: v.sort_key())
                if vs is None:
                    continue
                term = Form(self.space, {(vs[1], horiz): Fraction(vs[0]) * partial})
                out = out + term
        return out

    def contract_coordinate(self, alpha: int) -> "Form":
        """Interior product with the coordinate vector d/dx^alpha."""
        out: Dict[TermKey, Expression] = {}
        for (vert, horiz), coeff in self.terms.items():
            if alpha not in horiz:
                continue
            pos = horiz.index(alpha)
            sign = Fraction((-1) ** (len(vert) + pos))
            key = (vert, horiz[:pos] + horiz[pos + 1:])
            s = out.get(key, ZERO) + sign * coeff
            if not s.is_zero():
                out[key] = s
            else:
                out.pop(key, None)
        return Form(self.space, out)

    def contract_vertical(self, vector: "VerticalVector") -> "Form":
        """Interior product with a vertical vector field."""
        out = Form.zero(self.space)
        for (vert, horiz), coeff in self.terms.items():
            for i, var in enumerate(vert):
                comp = vector.components.get(var)
                if comp is None or comp.is_zero():
                    continue
                sign = Fraction((-1) ** i)
                key = (vert[:i] + vert[i + 1:], horiz)
                out = out + Form(self.space, {key: sign * comp * coeff})
        return out

    def substitute_vertical(self, rules: Mapping[Variable, Expression]) -> "Form":
        """Apply affine variable rules to coefficients and vertical factors alike.

        A vertical factor dY is replaced by the differential of the rule image,
        so the rules must be affine in the remaining variables.
        """
        out = Form.zero(self.space)
        for (vert, horiz), coeff in self.terms.items():
            acc = Form.scalar(self.space, coeff.substitute(rules, fixpoint=True))
            for var in vert:
                if var in rules:
                    rhs = rules[var].substitute(rules, fixpoint=True)
                    image = Form.zero(self.space)
                    for w in sorted(rhs.variables(), key=lambda v: v.sort_key()):
                        slope = rhs.diff(w)
                        if not slope.is_constant():
                            raise ValueError(
                                "vertical substitution requires affine rules")
                        image = image + Form.vertical(self.space, w) * slope
                else:
                    image = Form.vertical(self.space, var)
                acc = acc.wedge(image)
                if acc.is_zero():
                    break
            if acc.is_zero():
                continue
            out = out + acc.wedge(Form(self.space, {((), horiz): Expression.const(1)}))
        return out

    # -- metric operations ---------------------------------------------------

    def hodge(self) -> "Form":
        """Hodge star on purely horizontal forms for the diagonal metric."""
        n = self.space.dim
        out: Dict[TermKey, Expression] = {}
        for (vert, horiz), coeff in self.terms.items():
            if vert:
                raise ValueError("hodge star applied to a form with vertical factors")
            comp = tuple(i for i in range(n) if i not in horiz)
            sign = Fraction(_perm_sign(horiz + comp))
            for i in horiz:
                sign *= self.space.eta(i)
            key = ((), comp)
            s = out.get(key, ZERO) + sign * coeff
            if not s.is_zero():
                out[key] = s
            else:
                out.pop(key, None)
        return Form(self.space, out)

    def costar(self) -> "Form":
        """Degree-weighted star: (-1)^{m(n-m)} times the star on each m-form term."""
        n = self.space.dim
        out = Form.zero(self.space)
        for (vert, horiz), coeff in self.terms.items():
            m = len(horiz)
            sign = Fraction((-1) ** (m * (n - m)))
            piece = Form(self.space, {(vert, horiz): sign * coeff}).hodge()
            out = out + piece
        return out

    # -- component extraction ------------------------------------------------

    def upsilon_components(self) -> list:
        """Write a vertical-degree-zero (n-1)-form as F^mu u_mu; return [F^0..F^{n-1}]."""
        n = self.space.dim
        comps = []
        seen = set()
        for mu in range(n):
            rest = tuple(i for i in range(n) if i != mu)
            coeff = self.terms.get(((), rest))
            seen.add(((), rest))
            if coeff is None:
                comps.append(ZERO)
            else:
                comps.append(Expression.const(self.space.upsilon_sign(mu)) * coeff)
        for key in self.terms:
            if key not in seen:
                raise ValueError("form is not a pure horizontal (n-1)-form")
        return comps

    @staticmethod
    def from_upsilon_components(space: Spacetime, comps) -> "Form":
        out = Form.zero(space)
        for mu, comp in enumerate(comps):
            out = out + space.upsilon(mu) * comp
        return out

    # -- printing ------------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (vert, horiz) in sorted(self.terms, key=_term_sort_key):
            coeff = self.terms[(vert, horiz)]
            factors = ["d%s" % v for v in vert] + ["dx%d" % i for i in horiz]
            body = "^".join(factors)
            ctext = str(coeff)
            if " " in ctext or ctext.startswith("-"):
                ctext = "(%s)" % ctext
            if body:
                parts.append("%s %s" % (ctext, body) if ctext != "1" else body)
            else:
                parts.append(ctext)
        return " + ".join(parts)

    __repr__ = __str__


def _perm_sign(seq) -> int:
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def _term_sort_key(key: TermKey):
    vert, horiz = key
    return (len(vert) + len(horiz), tuple(v.sort_key() for v in vert), horiz)


def bullet(a: Form, b: Form) -> Form:
    """Interior pairing a . b = costar(hodge(a) ^ hodge(b)) on horizontal forms."""
    return a.hodge().wedge(b.hodge()).costar()


@dataclass
class VerticalVector:
    """Vertical vector field: components along field and momentum directions."""

    space: Spacetime
    components: Dict[Variable, Expression] = field(default_factory=dict)

    def add(self, var: Variable, comp: Expression):
        cur = self.components.get(var, ZERO) + comp
        if cur.is_zero():
            self.components.pop(var, None)
        else:
            self.components[var] = cur


def form_sum(space: Spacetime, items: Iterable[Form]) -> Form:
    total = Form.zero(space)
    for item in items:
        total = total + item
    return total
