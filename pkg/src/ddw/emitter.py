"""Render a derivation record as delimited text, LaTeX, or JSON.

The JSON layout is fixed by the schema shipped in ``ddw/schema``; equations
are serialized as operator trees so downstream consumers never re-parse
strings.  Output is deterministic: stages, entries, and keys are emitted in
canonical order and JSON keys are sorted.
"""

import json
from fractions import Fraction
from typing import Dict, List, Optional

from .equations import Equation
from .expr import Expression, Variable, VarKind
from .forms import Form
from .parser import render_model
from .pipeline import DerivedSystem, STAGE_NAMES

SCHEMA_VERSION = "1.0.0"

FORMATS = ("text", "latex", "json")

_KIND_NAMES = {
    VarKind.COORDINATE: "coordinate",
    VarKind.FIELD: "field",
    VarKind.MOMENTUM: "momentum",
    VarKind.JET: "jet",
    VarKind.JET2: "jet2",
    VarKind.MOMENTUM_JET: "momentum_jet",
    VarKind.FLUX: "flux",
    VarKind.FLUX_JET: "flux_jet",
    VarKind.FLUX_DERIV: "flux_deriv",
}

_GREEK = {"phi": r"\phi", "psi": r"\psi", "chi": r"\chi", "theta": r"\theta",
          "sigma": r"\sigma", "rho": r"\rho", "pi": r"\pi"}


def variable_json(var: Variable) -> dict:
    """Structured encoding of one variable: kind, base name, index tuple."""
    return {"kind": _KIND_NAMES[var.kind], "name": var.base,
            "indices": list(var.indices)}


def _rational_node(value: Fraction) -> dict:
    return {"op": "rational", "value": str(Fraction(value))}


def expression_tree(expr: Expression) -> dict:
    """Expression as an (op, args) tree with sorted, canonical term order."""
    terms = []
    for mono, coeff in expr.sorted_terms():
        factors: List[dict] = []
        if coeff != 1 or not mono:
            factors.append(_rational_node(coeff))
        for var, power in mono:
            node = {"op": "var", "var": variable_json(var)}
            if power != 1:
                node = {"op": "pow", "args": [node, _rational_node(Fraction(power))]}
            factors.append(node)
        terms.append(factors[0] if len(factors) == 1
                     else {"op": "mul", "args": factors})
    if not terms:
        return _rational_node(Fraction(0))
    if len(terms) == 1:
        return terms[0]
    return {"op": "add", "args": terms}


def _form_term_key(key):
    vert, horiz = key
    return (len(vert) + len(horiz), tuple(v.sort_key() for v in vert), horiz)


def form_json(form: Form) -> dict:
    """Form as a list of terms, each a vertical/horizontal factor split."""
    terms = []
    for key in sorted(form.terms, key=_form_term_key):
        vert, horiz = key
        terms.append({"vertical": [variable_json(v) for v in vert],
                      "horizontal": list(horiz),
                      "coeff": expression_tree(form.terms[key])})
    return {"terms": terms}


def equation_json(eq: Equation) -> dict:
    return {"label": eq.label, "lhs": expression_tree(eq.lhs),
            "rhs": expression_tree(eq.rhs)}


def _rules_json(rules: Dict[Variable, Expression]) -> List[dict]:
    out = []
    for var in sorted(rules, key=lambda v: v.sort_key()):
        out.append({"variable": variable_json(var),
                    "value": expression_tree(rules[var])})
    return out


def _stage_payloads(system: DerivedSystem) -> Dict[str, object]:
    model = system.model
    legendre = system.legendre
    classification = system.classification
    reduction = system.reduction
    feqs = system.field_eqs
    hj = system.hj

    payloads: Dict[str, object] = {}
    payloads["parse"] = {
        "name": model.name,
        "dim": model.space.dim,
        "signature": list(model.space.signature),
        "fields": [{"name": f.name, "variances": list(f.variances),
                    "symmetry": f.symmetry} for f in model.fields],
        "lagrangian": expression_tree(model.lagrangian),
        "source": render_model(model),
    }
    payloads["polymomenta"] = [
        {"momentum": variable_json(var),
         "value": expression_tree(legendre.momentum_defs[var])}
        for var in sorted(legendre.momentum_defs, key=lambda v: v.sort_key())]
    payloads["constraints"] = [
        {"name": c.name, "component": variable_json(c.component),
         "form": form_json(c.form)} for c in legendre.constraints]
    payloads["hamiltonian"] = {
        "raw": expression_tree(legendre.hamiltonian),
        "reduced": expression_tree(reduction.hamiltonian),
    }
    payloads["omega"] = form_json(system.omega)

    names = [c.name for c in classification.constraints]
    matrix = classification.matrix
    payloads["bracket_matrix"] = {
        "names": names,
        "entries": [[form_json(entry) for entry in row] for row in matrix]
        if matrix is not None else [],
    }
    payloads["classification"] = {
        "status": classification.status,
        "reason": classification.reason,
        "tags": [{"component": variable_json(c.component),
                  "tag": classification.tags[c.component]}
                 for c in classification.constraints],
    }

    pinv = reduction.pseudoinverse
    if pinv is None:
        payloads["pseudoinverse"] = {"present": False}
    else:
        payloads["pseudoinverse"] = {
            "present": True,
            "blocks": [[form_json(b) for b in row] for row in pinv.blocks],
            "defining_relation": pinv.defining_relation,
            "left_identity": pinv.left_identity,
            "right_products": [[str(v) for v in row]
                               for row in pinv.right_products],
        }

    payloads["dirac_table"] = [
        {"first": first, "second": second, "value": form_json(value)}
        for first, second, value in system.dirac_table]

    certificate = {}
    for key, value in reduction.certificate.items():
        certificate[key] = value if isinstance(value, (bool, int, str)) else str(value)
    payloads["reduction"] = {
        "status": reduction.status,
        "eliminated": [variable_json(v) for v in reduction.eliminated],
        "surviving_fields": [variable_json(v) for v in reduction.surviving_fields],
        "surviving_momenta": [variable_json(v) for v in reduction.surviving_momenta],
        "rules": _rules_json(reduction.rules),
        "omega_reduced": form_json(reduction.omega_reduced),
        "certificate": certificate,
    }

    detail = {}
    for key, info in feqs.factor_trail.get("detail", {}).items():
        detail[key] = {"raw": expression_tree(info["raw"]),
                       "orbit_sum": expression_tree(info["orbit_sum"]),
                       "canonical": expression_tree(info["canonical"]),
                       "closes": info["closes"]}
    solution = feqs.momentum_solution
    payloads["field_equations"] = {
        "velocity": [equation_json(eq) for eq in feqs.velocity],
        "velocity_raw": [equation_json(eq) for eq in feqs.raw_velocity],
        "momentum": [equation_json(eq) for eq in feqs.momentum],
        "closed": [equation_json(eq) for eq in feqs.closed],
        "factor_trail": {"closed": feqs.factor_trail.get("closed", True),
                         "detail": detail},
        "solution_note": feqs.solution_note,
        "momentum_solution": {"present": solution is not None,
                              "entries": _rules_json(solution or {})},
    }
    payloads["hj_system"] = {
        "equation": equation_json(hj.equation),
        "conditions": [equation_json(eq) for eq in hj.conditions],
        "embedding": [equation_json(eq) for eq in hj.embedding],
    }
    return payloads


def _check_stage(stage: Optional[str]):
    if stage is not None and stage not in STAGE_NAMES:
        raise ValueError("unknown stage: %s" % stage)


def render_json(system: DerivedSystem, stage: Optional[str] = None) -> str:
    """Schema-conforming JSON document; byte-identical across runs."""
    _check_stage(stage)
    payloads = _stage_payloads(system)
    if stage is not None:
        payloads = {stage: payloads[stage]}
    doc = {"schema_version": SCHEMA_VERSION, "stages": payloads}
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def _nonzero_matrix_lines(names, matrix, pattern) -> List[str]:
    lines = []
    if matrix:
        for u, row in enumerate(matrix):
            for v, entry in enumerate(row):
                if not entry.is_zero():
                    lines.append(pattern % (names[u], names[v], entry))
    if not lines:
        lines.append("(none)")
    return lines


def _text_sections(system: DerivedSystem) -> Dict[str, List[str]]:
    model = system.model
    legendre = system.legendre
    classification = system.classification
    reduction = system.reduction
    feqs = system.field_eqs
    hj = system.hj
    names = [c.name for c in classification.constraints]

    sections: Dict[str, List[str]] = {}
    sections["parse"] = render_model(model).splitlines()
    sections["polymomenta"] = [
        "%s = %s" % (var, legendre.momentum_defs[var])
        for var in sorted(legendre.momentum_defs, key=lambda v: v.sort_key())]
    sections["constraints"] = (
        ["%s = %s" % (c.name, c.form) for c in legendre.constraints]
        or ["(none)"])
    sections["hamiltonian"] = ["H = %s" % legendre.hamiltonian,
                               "H* = %s" % reduction.hamiltonian]
    sections["omega"] = ["Omega = %s" % system.omega]
    sections["bracket_matrix"] = _nonzero_matrix_lines(
        names, classification.matrix, "{%s, %s} = %s")
    class_lines = ["status: %s" % classification.status]
    if classification.reason:
        class_lines.append("reason: %s" % classification.reason)
    class_lines += ["%s: %s" % (c.name, classification.tags[c.component])
                    for c in classification.constraints]
    sections["classification"] = class_lines

    pinv = reduction.pseudoinverse
    if pinv is None:
        sections["pseudoinverse"] = ["(none)"]
    else:
        lines = _nonzero_matrix_lines(names, pinv.blocks, "N[%s, %s] = %s")
        lines.append("defining_relation: %s" % pinv.defining_relation)
        lines.append("left_identity: %s" % pinv.left_identity)
        sections["pseudoinverse"] = lines

    sections["dirac_table"] = (
        ["{%s, %s}* = %s" % entry for entry in system.dirac_table]
        or ["(none)"])

    red_lines = ["status: %s" % reduction.status]
    red_lines.append("eliminated: %s" % (
        ", ".join(str(v) for v in reduction.eliminated) or "(none)"))
    red_lines.append("surviving fields: %s" % (
        ", ".join(str(v) for v in reduction.surviving_fields) or "(none)"))
    red_lines.append("surviving momenta: %s" % (
        ", ".join(str(v) for v in reduction.surviving_momenta) or "(none)"))
    for var in sorted(reduction.rules, key=lambda v: v.sort_key()):
        red_lines.append("%s -> %s" % (var, reduction.rules[var]))
    red_lines.append("Omega_R = %s" % reduction.omega_reduced)
    for key in sorted(reduction.certificate):
        red_lines.append("certificate.%s: %s" % (key, reduction.certificate[key]))
    sections["reduction"] = red_lines

    feq_lines = [str(eq) for eq in feqs.velocity]
    feq_lines += [str(eq) for eq in feqs.raw_velocity]
    feq_lines += [str(eq) for eq in feqs.momentum]
    feq_lines += [str(eq) for eq in feqs.closed]
    feq_lines.append("factor_trail.closed: %s" % feqs.factor_trail.get("closed", True))
    if not feqs.factor_trail.get("closed", True):
        feq_lines.append("WARNING: velocity factor trail does not close; "
                         "raw and canonical right-hand sides disagree")
    if feqs.solution_note:
        feq_lines.append("note: %s" % feqs.solution_note)
    sections["field_equations"] = feq_lines

    sections["hj_system"] = ([str(hj.equation)]
                             + [str(eq) for eq in hj.conditions]
                             + [str(eq) for eq in hj.embedding])
    return sections


def render_text(system: DerivedSystem, stage: Optional[str] = None) -> str:
    """Delimited per-stage text; equation lines reparse with the phase grammar."""
    _check_stage(stage)
    sections = _text_sections(system)
    names = [stage] if stage is not None else STAGE_NAMES
    blocks = []
    for name in names:
        blocks.append("== %s ==" % name)
        blocks.extend(sections[name])
        blocks.append("")
    return "\n".join(blocks)


def latex_variable(var: Variable, model) -> str:
    """LaTeX for one variable, using declared index variances for fields."""
    def name_of(base: str) -> str:
        return _GREEK.get(base, base)

    def field_latex(base: str, indices) -> str:
        spec = model.spec(base) if base in model.field_map else None
        text = name_of(base)
        if not indices:
            return text
        if spec is not None and spec.variances:
            upper = "".join(str(i) for i, v in zip(indices, spec.variances)
                            if v == "^")
            lower = "".join(str(i) for i, v in zip(indices, spec.variances)
                            if v == "_")
            if upper:
                text += "^{%s}" % upper
            if lower:
                text += "_{%s}" % lower
            return text
        return text + "_{%s}" % "".join(str(i) for i in indices)

    kind = var.kind
    if kind == VarKind.COORDINATE:
        return "x^{%d}" % var.indices[0]
    if kind == VarKind.FIELD:
        return field_latex(var.base, var.indices)
    if kind == VarKind.MOMENTUM:
        return "p^{%d}_{%s}" % (var.indices[0],
                                field_latex(var.base, var.indices[1:]))
    if kind == VarKind.JET:
        return r"\partial_{%d} %s" % (var.indices[0],
                                      field_latex(var.base, var.indices[1:]))
    if kind == VarKind.JET2:
        return r"\partial_{%d}\partial_{%d} %s" % (
            var.indices[0], var.indices[1], field_latex(var.base, var.indices[2:]))
    if kind == VarKind.MOMENTUM_JET:
        return r"\partial_{%d} p^{%d}_{%s}" % (
            var.indices[0], var.indices[1], field_latex(var.base, var.indices[2:]))
    if kind == VarKind.FLUX:
        return "S^{%d}" % var.indices[0]
    if kind == VarKind.FLUX_JET:
        return r"\partial_{%d} S^{%d}" % (var.indices[0], var.indices[1])
    if kind == VarKind.FLUX_DERIV:
        comp = Variable(VarKind.FIELD, var.base, var.indices[1:])
        return r"\frac{\partial S^{%d}}{\partial %s}" % (
            var.indices[0], latex_variable(comp, model))
    raise ValueError("unrenderable variable kind: %r" % (kind,))


def _latex_fraction(value: Fraction) -> str:
    sign = "-" if value < 0 else ""
    value = abs(value)
    if value.denominator == 1:
        return "%s%d" % (sign, value.numerator)
    return r"%s\frac{%d}{%d}" % (sign, value.numerator, value.denominator)


def latex_expression(expr: Expression, model) -> str:
    """LaTeX for a polynomial expression in canonical term order."""
    parts = []
    for mono, coeff in expr.sorted_terms():
        factors = []
        for var, power in mono:
            body = latex_variable(var, model)
            if power != 1:
                body = r"\left(%s\right)^{%d}" % (body, power)
            factors.append(body)
        body = r" \, ".join(factors)
        mag = abs(coeff)
        if not factors:
            piece = _latex_fraction(mag)
        elif mag == 1:
            piece = body
        else:
            piece = r"%s \, %s" % (_latex_fraction(mag), body)
        if not parts:
            parts.append(piece if coeff >= 0 else "-%s" % piece)
        else:
            parts.append(("+ %s" if coeff >= 0 else "- %s") % piece)
    if not parts:
        return "0"
    return " ".join(parts)


def latex_form(form: Form, model) -> str:
    """LaTeX for a form as a sum of coefficient-times-basis terms."""
    if form.is_zero():
        return "0"
    parts = []
    for key in sorted(form.terms, key=_form_term_key):
        vert, horiz = key
        coeff = form.terms[key]
        factors = [r"\mathrm{d}%s" % latex_variable(v, model) for v in vert]
        factors += [r"\mathrm{d}x^{%d}" % i for i in horiz]
        body = r" \wedge ".join(factors)
        ctext = latex_expression(coeff, model)
        if ctext == "1" and body:
            piece = body
        elif body:
            piece = r"\left(%s\right) %s" % (ctext, body)
        else:
            piece = ctext
        parts.append(piece)
    return " + ".join(parts)


def latex_equation(eq: Equation, model) -> str:
    return "%s &= %s" % (latex_expression(eq.lhs, model),
                         latex_expression(eq.rhs, model))


def _latex_sections(system: DerivedSystem) -> Dict[str, List[str]]:
    model = system.model
    legendre = system.legendre
    classification = system.classification
    reduction = system.reduction
    feqs = system.field_eqs
    hj = system.hj
    names = [c.name for c in classification.constraints]

    def align(lines: List[str]) -> List[str]:
        if not lines:
            return [r"\textit{(none)}", ""]
        return ([r"\begin{align*}"]
                + ["%s \\\\" % line for line in lines[:-1]]
                + [lines[-1], r"\end{align*}", ""])

    def matrix_lines(matrix, pattern):
        lines = []
        if matrix:
            for u, row in enumerate(matrix):
                for v, entry in enumerate(row):
                    if not entry.is_zero():
                        lines.append(pattern % (names[u], names[v],
                                                latex_form(entry, model)))
        return lines

    sections: Dict[str, List[str]] = {}
    sections["parse"] = [r"\begin{verbatim}", render_model(model),
                         r"\end{verbatim}", "",
                         r"Lagrangian density: $%s$."
                         % latex_expression(model.lagrangian, model), ""]
    sections["polymomenta"] = align(
        ["%s &= %s" % (latex_variable(var, model),
                       latex_expression(legendre.momentum_defs[var], model))
         for var in sorted(legendre.momentum_defs, key=lambda v: v.sort_key())])
    sections["constraints"] = align(
        [r"C_{%s} &= %s" % (latex_variable(c.component, model),
                            latex_form(c.form, model))
         for c in legendre.constraints])
    sections["hamiltonian"] = align(
        ["H &= %s" % latex_expression(legendre.hamiltonian, model),
         "H^* &= %s" % latex_expression(reduction.hamiltonian, model)])
    sections["omega"] = [r"\[ \Omega = %s \]" % latex_form(system.omega, model), ""]
    sections["bracket_matrix"] = align(
        matrix_lines(classification.matrix,
                     r"\left\{%s, %s\right\} &= %s"))
    sections["classification"] = (
        ["Status: %s." % classification.status.replace("_", " "), ""]
        + [r"\begin{itemize}"]
        + [r"\item $C_{%s}$: %s" % (latex_variable(c.component, model),
                                    classification.tags[c.component].replace("_", " "))
           for c in classification.constraints]
        + [r"\end{itemize}", ""]
        if classification.constraints
        else ["No constraints.", ""])

    pinv = reduction.pseudoinverse
    if pinv is None:
        sections["pseudoinverse"] = ["Not applicable.", ""]
    else:
        sections["pseudoinverse"] = align(
            matrix_lines(pinv.blocks, r"C^{\sim 1}\left[%s, %s\right] &= %s"))
    sections["dirac_table"] = align(
        [r"\left\{%s, %s\right\}^* &= %s"
         % (first.replace("[", "_{").replace("]", "}"),
            second.replace("[", "_{").replace("]", "}"),
            latex_form(value, model))
         for first, second, value in system.dirac_table])
    sections["reduction"] = (
        ["Status: %s." % reduction.status.replace("_", " "), ""]
        + [r"\[ \Omega_R = %s \]" % latex_form(reduction.omega_reduced, model),
           "",
           r"\[ H^* = %s \]" % latex_expression(reduction.hamiltonian, model),
           ""])
    sections["field_equations"] = align(
        [latex_equation(eq, model)
         for eq in feqs.velocity + feqs.momentum + feqs.closed])
    hj_lines = [
        r"The flux functions $S^\mu(x, y)$ satisfy",
        r"\[ \partial_\mu S^\mu"
        r" + H^*\!\left(p^\mu_a = \frac{\partial S^\mu}{\partial y^a}\right)"
        r" = 0 , \]",
        "which expands to", ""]
    hj_lines += align([latex_equation(hj.equation, model)]
                      + [latex_equation(eq, model) for eq in hj.conditions]
                      + [latex_equation(eq, model) for eq in hj.embedding])
    sections["hj_system"] = hj_lines
    return sections


def render_latex(system: DerivedSystem, stage: Optional[str] = None) -> str:
    """Standalone LaTeX document covering the requested stages."""
    _check_stage(stage)
    sections = _latex_sections(system)
    names = [stage] if stage is not None else STAGE_NAMES
    lines = [r"\documentclass{article}",
             r"\usepackage{amsmath}",
             r"\usepackage[margin=2.5cm]{geometry}",
             r"\setlength{\parindent}{0pt}",
             r"\begin{document}",
             r"\section*{%s}" % system.model.name.replace("_", r"\_"), ""]
    for name in names:
        lines.append(r"\subsection*{%s}" % name.replace("_", r"\_"))
        lines.extend(sections[name])
    lines.append(r"\end{document}")
    return "\n".join(lines) + "\n"


def render(system: DerivedSystem, fmt: str, stage: Optional[str] = None) -> str:
    """Render the record in one of the supported formats."""
    _check_stage(stage)
    if fmt == "text":
        return render_text(system, stage)
    if fmt == "latex":
        return render_latex(system, stage)
    if fmt == "json":
        return render_json(system, stage)
    raise ValueError("unknown format: %s" % fmt)
