"""Parsers for model files, solution files, and emitted equation text.

Model files declare a dimension, a diagonal signature, a list of fields with
variance markers, and one Lagrangian density.  Named indices in the density
must appear exactly twice per expanded monomial; a repeated pair of equal
variance picks up the matching signature factor, a mixed pair sums plainly.
Solution files assign numeric function trees to field and flux components.
The phase dialect reads back the integer-indexed atoms that the text emitter
writes, which keeps emitted equations machine-checkable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Tuple

from . import numeric
from .equations import _partial_of_variable, _single_variable
from .expr import Expression, Variable, VarKind, ZERO
from .forms import Spacetime
from .model import Model, ModelField


class ParseError(Exception):
    """Input rejected, with the line and column of the offending token."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__("line %d, column %d: %s" % (line, col, message))
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str
    value: object
    line: int
    col: int


_SYMBOLS = set("+-*/^()[],;=_")


def _tokenize(text: str) -> List[Token]:
    out = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            col += 1
            i += 1
            continue
        if ch == "#":
            while i < len(text) and text[i] != "\n":
                i += 1
            continue
        start_col = col
        if ch.isdigit():
            j = i
            isfloat = False
            while j < len(text) and text[j].isdigit():
                j += 1
            if j < len(text) and text[j] == ".":
                isfloat = True
                j += 1
                while j < len(text) and text[j].isdigit():
                    j += 1
            if j < len(text) and text[j] in "eE":
                k = j + 1
                if k < len(text) and text[k] in "+-":
                    k += 1
                if k < len(text) and text[k].isdigit():
                    isfloat = True
                    j = k
                    while j < len(text) and text[j].isdigit():
                        j += 1
            word = text[i:j]
            if isfloat:
                out.append(Token("float", float(word), line, start_col))
            else:
                out.append(Token("int", int(word), line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha():
            j = i
            while j < len(text) and text[j].isalnum():
                j += 1
            out.append(Token("name", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if ch in _SYMBOLS:
            out.append(Token("sym", ch, line, start_col))
            col += 1
            i += 1
            continue
        raise ParseError("unexpected character %r" % ch, line, col)
    out.append(Token("end", None, line, col))
    return out


class _Stream:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "end":
            self.pos += 1
        return tok

    def at_sym(self, ch: str) -> bool:
        tok = self.peek()
        return tok.kind == "sym" and tok.value == ch

    def take_sym(self, ch: str) -> bool:
        if self.at_sym(ch):
            self.next()
            return True
        return False

    def expect_sym(self, ch: str) -> Token:
        tok = self.next()
        if tok.kind != "sym" or tok.value != ch:
            raise ParseError("expected %r" % ch, tok.line, tok.col)
        return tok

    def expect_name(self, what: str = "a name") -> Token:
        tok = self.next()
        if tok.kind != "name":
            raise ParseError("expected %s" % what, tok.line, tok.col)
        return tok

    def expect_int(self, what: str = "an integer") -> Token:
        tok = self.next()
        if tok.kind != "int":
            raise ParseError("expected %s" % what, tok.line, tok.col)
        return tok


# -- shared expression skeleton ---------------------------------------------


def _parse_expr(stream: _Stream, alg):
    value = _parse_term(stream, alg)
    while True:
        if stream.take_sym("+"):
            value = alg.add(value, _parse_term(stream, alg))
        elif stream.take_sym("-"):
            value = alg.add(value, alg.neg(_parse_term(stream, alg)))
        else:
            return value


def _parse_term(stream: _Stream, alg):
    value = _parse_factor(stream, alg)
    while True:
        if stream.take_sym("*"):
            value = alg.mul(value, _parse_factor(stream, alg))
        elif stream.at_sym("/"):
            tok = stream.next()
            value = alg.div(value, _parse_factor(stream, alg), tok)
        else:
            return value


def _parse_factor(stream: _Stream, alg):
    if stream.take_sym("-"):
        return alg.neg(_parse_factor(stream, alg))
    if stream.take_sym("+"):
        return _parse_factor(stream, alg)
    return _parse_power(stream, alg)


def _parse_power(stream: _Stream, alg):
    base = _parse_primary(stream, alg)
    if stream.at_sym("^"):
        tok = stream.next()
        exp = stream.expect_int("an integer exponent")
        return alg.pow(base, exp.value, tok)
    return base


def _parse_primary(stream: _Stream, alg):
    tok = stream.peek()
    if tok.kind in ("int", "float"):
        stream.next()
        return alg.number(tok)
    if stream.take_sym("("):
        value = _parse_expr(stream, alg)
        stream.expect_sym(")")
        return value
    if tok.kind == "name":
        return alg.atom(stream)
    raise ParseError("expected an expression", tok.line, tok.col)


def _parse_index_list(stream: _Stream, allow_names: bool) -> List[Tuple[object, Token]]:
    """Bracketed index list; entries are ints or, when allowed, names."""
    stream.expect_sym("[")
    out = []
    while True:
        tok = stream.next()
        if tok.kind == "int":
            out.append((tok.value, tok))
        elif tok.kind == "name" and allow_names:
            out.append((tok.value, tok))
        else:
            raise ParseError("expected an index", tok.line, tok.col)
        if stream.take_sym("]"):
            return out
        stream.expect_sym(",")


# -- model dialect -----------------------------------------------------------

# Intermediate tree nodes are tuples tagged by their first entry; atoms carry
# the token that introduced them for error reporting.


class _ModelAlgebra:
    def __init__(self, fields: Dict[str, ModelField]):
        self.fields = fields

    def number(self, tok: Token):
        if tok.kind == "float":
            raise ParseError("model files use exact rationals", tok.line, tok.col)
        return ("num", Fraction(tok.value))

    def add(self, a, b):
        return ("add", a, b)

    def mul(self, a, b):
        return ("mul", a, b)

    def neg(self, a):
        return ("neg", a)

    def pow(self, a, exp, tok):
        if exp < 0:
            raise ParseError("negative powers are not supported", tok.line, tok.col)
        return ("pow", a, exp)

    def div(self, a, b, tok):
        return ("div", a, b, tok)

    def atom(self, stream: _Stream):
        tok = stream.expect_name()
        if tok.value == "d":
            stream.expect_sym("(")
            inner = stream.expect_name("a field name")
            slots = self._field_slots(stream, inner)
            stream.expect_sym(",")
            dtok = stream.next()
            if dtok.kind not in ("int", "name"):
                raise ParseError("expected a derivative index", dtok.line, dtok.col)
            stream.expect_sym(")")
            return ("jet", inner.value, slots, (dtok.value, dtok), inner)
        self._known_field(tok)
        slots = self._field_slots(stream, tok)
        return ("field", tok.value, slots, tok)

    def _known_field(self, tok: Token):
        if tok.value not in self.fields:
            raise ParseError("unknown field %r" % tok.value, tok.line, tok.col)

    def _field_slots(self, stream: _Stream, tok: Token):
        self._known_field(tok)
        spec = self.fields[tok.value]
        slots = []
        if stream.at_sym("["):
            slots = _parse_index_list(stream, allow_names=True)
        if len(slots) != spec.rank:
            raise ParseError("field %s takes %d indices" % (tok.value, spec.rank),
                             tok.line, tok.col)
        return tuple(slots)


def _distribute(tree) -> List[Tuple[Fraction, tuple]]:
    """Expand a model tree into (coefficient, atom list) monomials."""
    tag = tree[0]
    if tag == "num":
        return [(tree[1], ())]
    if tag in ("field", "jet"):
        return [(Fraction(1), (tree,))]
    if tag == "add":
        return _distribute(tree[1]) + _distribute(tree[2])
    if tag == "neg":
        return [(-c, atoms) for c, atoms in _distribute(tree[1])]
    if tag == "mul":
        left = _distribute(tree[1])
        right = _distribute(tree[2])
        return [(c1 * c2, a1 + a2) for c1, a1 in left for c2, a2 in right]
    if tag == "pow":
        out = [(Fraction(1), ())]
        for _ in range(tree[2]):
            base = _distribute(tree[1])
            out = [(c1 * c2, a1 + a2) for c1, a1 in out for c2, a2 in base]
        return out
    # division: the denominator must collapse to a single constant
    num, den, tok = tree[1], tree[2], tree[3]
    total = Fraction(0)
    for c, atoms in _distribute(den):
        if atoms:
            raise ParseError("division only by constants", tok.line, tok.col)
        total += c
    if total == 0:
        raise ParseError("division by zero", tok.line, tok.col)
    return [(c / total, atoms) for c, atoms in _distribute(num)]


def _expand_monomials(monomials, fields: Dict[str, ModelField],
                      space: Spacetime) -> Expression:
    total = ZERO
    n = space.dim
    for coeff, atoms in monomials:
        # collect named index occurrences with variances
        occurrences: Dict[str, List[Tuple[str, Token]]] = {}

        def record(value, tok, variance):
            if isinstance(value, str):
                occurrences.setdefault(value, []).append((variance, tok))
            elif not 0 <= value < n:
                raise ParseError("index %d out of range" % value, tok.line, tok.col)

        for atom in atoms:
            spec = fields[atom[1]]
            slots = atom[2]
            for pos, (value, tok) in enumerate(slots):
                record(value, tok, spec.variances[pos])
            if atom[0] == "jet":
                dvalue, dtok = atom[3]
                record(dvalue, dtok, "_")
        for name, occ in occurrences.items():
            if len(occ) != 2:
                variance, tok = occ[0]
                raise ParseError(
                    "index %r appears %d times in a monomial; exactly two required"
                    % (name, len(occ)), tok.line, tok.col)
        names = sorted(occurrences)
        for values in product(range(n), repeat=len(names)):
            assignment = dict(zip(names, values))
            factor = coeff
            for name, value in zip(names, values):
                (v1, _), (v2, _) = occurrences[name]
                if v1 == v2:
                    factor *= space.eta(value)
            piece = Expression.const(factor)
            for atom in atoms:
                spec = fields[atom[1]]
                concrete = tuple(value if isinstance(value, int)
                                 else assignment[value]
                                 for value, _ in atom[2])
                canon, sign = spec.canonical_indices(concrete)
                if canon is None:
                    piece = ZERO
                    break
                if atom[0] == "jet":
                    dvalue = atom[3][0]
                    mu = dvalue if isinstance(dvalue, int) else assignment[dvalue]
                    var = Variable(VarKind.JET, atom[1], (mu,) + canon)
                else:
                    var = Variable(VarKind.FIELD, atom[1], canon)
                piece = piece * Expression.const(sign) * Expression.var(var)
            total = total + piece
    return total


def parse_model(text: str, name: str = "model") -> Model:
    stream = _Stream(_tokenize(text))
    dim: Optional[int] = None
    signature: Optional[Tuple[int, ...]] = None
    fields: Dict[str, ModelField] = {}
    order: List[ModelField] = []
    lagrangian: Optional[Expression] = None
    while stream.peek().kind != "end":
        tok = stream.expect_name("a statement")
        if tok.value == "dim":
            dim = stream.expect_int("the dimension").value
            stream.expect_sym(";")
        elif tok.value == "signature":
            signs = []
            while True:
                stok = stream.next()
                if stok.kind != "sym" or stok.value not in "+-":
                    raise ParseError("expected + or -", stok.line, stok.col)
                signs.append(1 if stok.value == "+" else -1)
                if stream.take_sym(";"):
                    break
                stream.take_sym(",")
            signature = tuple(signs)
        elif tok.value == "field":
            ftok = stream.expect_name("a field name")
            if ftok.value in fields:
                raise ParseError("field %r declared twice" % ftok.value,
                                 ftok.line, ftok.col)
            if ftok.value in ("x", "S", "d", "p", "DS"):
                raise ParseError("reserved name %r" % ftok.value, ftok.line, ftok.col)
            variances = []
            if stream.take_sym("["):
                while True:
                    vtok = stream.next()
                    if vtok.kind != "sym" or vtok.value not in "^_":
                        raise ParseError("expected ^ or _", vtok.line, vtok.col)
                    stream.expect_name("an index label")
                    variances.append(vtok.value)
                    if stream.take_sym("]"):
                        break
                    stream.expect_sym(",")
            symmetry = None
            nxt = stream.peek()
            if nxt.kind == "name" and nxt.value in ("antisymmetric", "symmetric"):
                stream.next()
                symmetry = nxt.value
                if len(variances) != 2:
                    raise ParseError("%s needs exactly two indices" % nxt.value,
                                     nxt.line, nxt.col)
            stream.expect_sym(";")
            spec = ModelField(ftok.value, tuple(variances), symmetry)
            fields[ftok.value] = spec
            order.append(spec)
        elif tok.value == "lagrangian":
            if dim is None or signature is None:
                raise ParseError("dim and signature must precede the lagrangian",
                                 tok.line, tok.col)
            space = Spacetime(dim, signature)
            tree = _parse_expr(stream, _ModelAlgebra(fields))
            stream.expect_sym(";")
            lagrangian = _expand_monomials(_distribute(tree), fields, space)
        else:
            raise ParseError("unknown statement %r" % tok.value, tok.line, tok.col)
    end = stream.peek()
    if dim is None or signature is None:
        raise ParseError("missing dim or signature", end.line, end.col)
    if lagrangian is None:
        raise ParseError("missing lagrangian", end.line, end.col)
    try:
        return Model(Spacetime(dim, signature), tuple(order), lagrangian, name)
    except ValueError as err:
        raise ParseError(str(err), end.line, end.col)


def render_model(model: Model) -> str:
    """Model back to source text; reparsing reproduces the same data."""
    signs = ",".join("+" if s > 0 else "-" for s in model.space.signature)
    lines = ["dim %d;" % model.space.dim, "signature %s;" % signs]
    for spec in model.fields:
        decl = "field %s" % spec.name
        if spec.variances:
            decl += "[%s]" % ",".join("%si%d" % (v, i)
                                      for i, v in enumerate(spec.variances))
        if spec.symmetry:
            decl += " %s" % spec.symmetry
        lines.append(decl + ";")
    lines.append("lagrangian %s;" % model.lagrangian)
    return "\n".join(lines) + "\n"


# -- phase dialect ------------------------------------------------------------


class _PhaseAlgebra:
    def number(self, tok: Token):
        if tok.kind == "float":
            raise ParseError("expected an exact rational", tok.line, tok.col)
        return Expression.const(tok.value)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def pow(self, a, exp, tok):
        if exp < 0:
            raise ParseError("negative powers are not supported", tok.line, tok.col)
        return a ** exp

    def div(self, a, b, tok):
        if not b.is_constant():
            raise ParseError("division only by constants", tok.line, tok.col)
        value = b.constant_value()
        if value == 0:
            raise ParseError("division by zero", tok.line, tok.col)
        return a * Expression.const(Fraction(1) / value)

    def atom(self, stream: _Stream):
        tok = stream.expect_name()
        if tok.value == "d":
            stream.expect_sym("(")
            inner = self.atom(stream)
            stream.expect_sym(",")
            itok = stream.expect_int("a derivative index")
            stream.expect_sym(")")
            try:
                var = _single_variable(inner)
                image = _partial_of_variable(var, itok.value)
                return Expression.var(_single_variable(image))
            except ValueError:
                raise ParseError("cannot differentiate this atom",
                                 tok.line, tok.col)
        if tok.value == "p":
            stream.expect_sym("(")
            inner = self.atom(stream)
            stream.expect_sym(",")
            itok = stream.expect_int("a momentum index")
            stream.expect_sym(")")
            var = self._field_atom(inner, tok)
            return Expression.var(Variable(VarKind.MOMENTUM, var.base,
                                           (itok.value,) + var.indices))
        if tok.value == "DS":
            stream.expect_sym("(")
            itok = stream.expect_int("a flux index")
            stream.expect_sym(",")
            inner = self.atom(stream)
            stream.expect_sym(")")
            var = self._field_atom(inner, tok)
            return Expression.var(Variable(VarKind.FLUX_DERIV, var.base,
                                           (itok.value,) + var.indices))
        indices: Tuple[int, ...] = ()
        if stream.at_sym("["):
            entries = _parse_index_list(stream, allow_names=False)
            indices = tuple(value for value, _ in entries)
        if tok.value == "x":
            if len(indices) != 1:
                raise ParseError("x takes one index", tok.line, tok.col)
            return Expression.var(Variable(VarKind.COORDINATE, "x", indices))
        if tok.value == "S":
            if len(indices) != 1:
                raise ParseError("S takes one index", tok.line, tok.col)
            return Expression.var(Variable(VarKind.FLUX, "S", indices))
        return Expression.var(Variable(VarKind.FIELD, tok.value, indices))

    def _field_atom(self, expr: Expression, tok: Token) -> Variable:
        try:
            var = _single_variable(expr)
        except ValueError:
            raise ParseError("expected a field component", tok.line, tok.col)
        if var.kind != VarKind.FIELD:
            raise ParseError("expected a field component", tok.line, tok.col)
        return var


def parse_phase_expression(text: str) -> Expression:
    """Integer-indexed expression in the vocabulary the text emitter writes."""
    stream = _Stream(_tokenize(text))
    value = _parse_expr(stream, _PhaseAlgebra())
    tok = stream.peek()
    if tok.kind != "end":
        raise ParseError("unexpected trailing input", tok.line, tok.col)
    return value


# -- solution dialect ---------------------------------------------------------


class _SolutionAlgebra:
    def number(self, tok: Token):
        return numeric.Num(float(tok.value))

    def add(self, a, b):
        return numeric.Add((a, b))

    def mul(self, a, b):
        return numeric.Mul((a, b))

    def neg(self, a):
        return numeric.Mul((numeric.Num(-1.0), a))

    def pow(self, a, exp, tok):
        if exp < 0:
            raise ParseError("negative powers are not supported", tok.line, tok.col)
        return numeric.Pow(a, exp)

    def div(self, a, b, tok):
        return numeric.Mul((a, numeric.Pow(b, -1)))

    def atom(self, stream: _Stream):
        tok = stream.expect_name()
        if tok.value in ("sin", "cos", "exp"):
            stream.expect_sym("(")
            arg = _parse_expr(stream, self)
            stream.expect_sym(")")
            return numeric.Call(tok.value, arg)
        indices: Tuple[int, ...] = ()
        if stream.at_sym("["):
            entries = _parse_index_list(stream, allow_names=False)
            indices = tuple(value for value, _ in entries)
        if tok.value == "x":
            if len(indices) != 1:
                raise ParseError("x takes one index", tok.line, tok.col)
            return numeric.Coord(indices[0])
        if tok.value == "S":
            raise ParseError("flux values cannot appear in expressions",
                             tok.line, tok.col)
        return numeric.FieldVal(Variable(VarKind.FIELD, tok.value, indices))


@dataclass
class Solution:
    """Assignments of numeric trees to field components and flux components."""

    fields: Dict[Variable, numeric.Node]
    fluxes: Dict[int, numeric.Node]


def parse_solution(text: str) -> Solution:
    stream = _Stream(_tokenize(text))
    fields: Dict[Variable, numeric.Node] = {}
    fluxes: Dict[int, numeric.Node] = {}
    while stream.peek().kind != "end":
        tok = stream.expect_name("a field or flux component")
        indices: Tuple[int, ...] = ()
        if stream.at_sym("["):
            entries = _parse_index_list(stream, allow_names=False)
            indices = tuple(value for value, _ in entries)
        stream.expect_sym("=")
        value = _parse_expr(stream, _SolutionAlgebra())
        stream.expect_sym(";")
        if tok.value == "S":
            if len(indices) != 1:
                raise ParseError("S takes one index", tok.line, tok.col)
            if indices[0] in fluxes:
                raise ParseError("S[%d] assigned twice" % indices[0],
                                 tok.line, tok.col)
            fluxes[indices[0]] = value
        else:
            var = Variable(VarKind.FIELD, tok.value, indices)
            if var in fields:
                raise ParseError("%s assigned twice" % var, tok.line, tok.col)
            if numeric.field_atoms(value):
                raise ParseError("field values must depend on coordinates only",
                                 tok.line, tok.col)
            fields[var] = value
    return Solution(fields, fluxes)
