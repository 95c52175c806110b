"""Exact sparse linear algebra over the rationals.

Matrices are dictionaries of sparse rows; row and column keys are arbitrary
hashables so callers can index equations and unknowns by structured labels.
Everything runs over ``Fraction`` with no pivots lost to rounding.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

SparseVec = Dict[Hashable, Fraction]
SparseMat = Dict[Hashable, SparseVec]


def transpose(rows: SparseMat) -> SparseMat:
    out: SparseMat = {}
    for r, row in rows.items():
        for c, val in row.items():
            if val:
                out.setdefault(c, {})[r] = val
    return out


def mat_vec(rows: SparseMat, vec: SparseVec) -> SparseVec:
    out: SparseVec = {}
    for r, row in rows.items():
        total = Fraction(0)
        for c, val in row.items():
            v = vec.get(c)
            if v:
                total += val * v
        if total:
            out[r] = total
    return out


def mat_mul(a: SparseMat, b: SparseMat) -> SparseMat:
    """Product a.b of sparse row maps: (a.b)[r][c] = sum_k a[r][k] b[k][c]."""
    out: SparseMat = {}
    for r, row in a.items():
        acc: SparseVec = {}
        for k, av in row.items():
            brow = b.get(k)
            if not brow:
                continue
            for c, bv in brow.items():
                s = acc.get(c, Fraction(0)) + av * bv
                if s:
                    acc[c] = s
                else:
                    acc.pop(c, None)
        if acc:
            out[r] = acc
    return out


def gram(rows: SparseMat) -> SparseMat:
    """A.At as a sparse map keyed by row labels on both axes."""
    cols = transpose(rows)
    out: SparseMat = {}
    for r1, row in rows.items():
        acc: SparseVec = {}
        for c, val in row.items():
            for r2, v2 in cols[c].items():
                s = acc.get(r2, Fraction(0)) + val * v2
                if s:
                    acc[r2] = s
                else:
                    acc.pop(r2, None)
        if acc:
            out[r1] = acc
    return out


def solve(rows: SparseMat, rhs_columns: Dict[Hashable, SparseVec]) -> Optional[Dict[Hashable, SparseVec]]:
    """Solve rows . x = rhs for each rhs column; free unknowns are set to zero.

    Returns a map rhs-label -> sparse solution, or None if any system is
    inconsistent.  One elimination pass serves all right-hand sides.
    """
    work: List[Tuple[SparseVec, Dict[Hashable, Fraction]]] = []
    for r, row in rows.items():
        vec = {c: v for c, v in row.items() if v}
        rline = {label: col.get(r, Fraction(0)) for label, col in rhs_columns.items()}
        rline = {k: v for k, v in rline.items() if v}
        work.append((vec, rline))

    pivots: List[Tuple[Hashable, SparseVec, Dict[Hashable, Fraction]]] = []
    for vec, rline in work:
        vec = dict(vec)
        rline = dict(rline)
        for pcol, pvec, prline in pivots:
            f = vec.get(pcol)
            if not f:
                continue
            for c, v in pvec.items():
                s = vec.get(c, Fraction(0)) - f * v
                if s:
                    vec[c] = s
                else:
                    vec.pop(c, None)
            for label, v in prline.items():
                s = rline.get(label, Fraction(0)) - f * v
                if s:
                    rline[label] = s
                else:
                    rline.pop(label, None)
        if not vec:
            if rline:
                return None
            continue
        pcol = min(vec, key=_key_order)
        inv = Fraction(1) / vec[pcol]
        vec = {c: v * inv for c, v in vec.items()}
        rline = {label: v * inv for label, v in rline.items()}
        pivots.append((pcol, vec, rline))

    # back substitution, newest pivots first
    solutions: Dict[Hashable, SparseVec] = {label: {} for label in rhs_columns}
    for i in range(len(pivots) - 1, -1, -1):
        pcol, vec, rline = pivots[i]
        for label in rhs_columns:
            total = rline.get(label, Fraction(0))
            for c, v in vec.items():
                if c == pcol:
                    continue
                xv = solutions[label].get(c)
                if xv:
                    total -= v * xv
            if total:
                solutions[label][pcol] = total
    return solutions


def _key_order(key):
    return (repr(type(key)), repr(key))


def solve_min_norm(rows: SparseMat, rhs: SparseVec) -> Optional[SparseVec]:
    """Minimum-norm exact solution of rows . x = rhs, or None if inconsistent.

    Works through the symmetric system (A.At) lam = rhs and returns At.lam,
    which is independent of the particular lam chosen.
    """
    g = gram(rows)
    sol = solve(g, {"rhs": rhs})
    if sol is None:
        return None
    lam = sol["rhs"]
    residual = dict(rhs)
    achieved = mat_vec(g, lam)
    for k, v in achieved.items():
        s = residual.get(k, Fraction(0)) - v
        if s:
            residual[k] = s
        else:
            residual.pop(k, None)
    if residual:
        return None
    return mat_vec(transpose(rows), lam)


def solve_min_norm_blocked(rows: SparseMat, rhs: SparseVec) -> Optional[SparseVec]:
    """Minimum-norm solution split over connected blocks of shared unknowns.

    Rows that touch disjoint unknown sets form independent subsystems, so the
    global minimum-norm solution is the union of per-block ones; blocks with a
    zero right-hand side contribute nothing.
    """
    parent: Dict[Hashable, Hashable] = {}

    def find(key):
        root = key
        while parent[root] != root:
            root = parent[root]
        while parent[key] != root:
            parent[key], key = root, parent[key]
        return root

    supports = {}
    for label, row in rows.items():
        keys = [c for c, v in row.items() if v]
        supports[label] = keys
        if not keys:
            if rhs.get(label):
                return None
            continue
        for c in keys:
            parent.setdefault(c, c)
        anchor = find(keys[0])
        for c in keys[1:]:
            parent[find(c)] = anchor

    groups: Dict[Hashable, List[Hashable]] = {}
    for label, keys in supports.items():
        if keys:
            groups.setdefault(find(keys[0]), []).append(label)

    solution: SparseVec = {}
    for labels in groups.values():
        block_rhs = {lab: rhs[lab] for lab in labels if rhs.get(lab)}
        if not block_rhs:
            continue
        part = solve_min_norm({lab: rows[lab] for lab in labels}, block_rhs)
        if part is None:
            return None
        solution.update(part)
    return solution


def pseudoinverse(rows: SparseMat, col_keys: Sequence[Hashable]) -> SparseMat:
    """Moore-Penrose inverse of a sparse rational matrix, keyed [col][row].

    Uses x = S y with S = At.A and S.S y = At e_r, which lands the minimum
    norm least-squares solution for every unit right-hand side.
    """
    at = transpose(rows)
    s = mat_mul(at, rows)
    s2 = mat_mul(s, s)
    # right-hand sides: columns of At, one per original row label
    rhs_cols: Dict[Hashable, SparseVec] = {r: {} for r in rows}
    for c, col in at.items():
        for r, v in col.items():
            rhs_cols[r][c] = v
    full_s2 = {c: s2.get(c, {}) for c in col_keys}
    ys = solve(full_s2, rhs_cols)
    if ys is None:
        raise RuntimeError("normal equations unexpectedly inconsistent")
    out: SparseMat = {}
    for r, y in ys.items():
        x = mat_vec(s, y)
        for c, v in x.items():
            if v:
                out.setdefault(c, {})[r] = v
    return out


def rank(rows: SparseMat) -> int:
    pivots: List[Tuple[Hashable, SparseVec]] = []
    for row in rows.values():
        vec = {c: v for c, v in row.items() if v}
        for pcol, pvec in pivots:
            f = vec.get(pcol)
            if not f:
                continue
            for c, v in pvec.items():
                s = vec.get(c, Fraction(0)) - f * v
                if s:
                    vec[c] = s
                else:
                    vec.pop(c, None)
        if vec:
            pcol = min(vec, key=_key_order)
            inv = Fraction(1) / vec[pcol]
            pivots.append((pcol, {c: v * inv for c, v in vec.items()}))
    return len(pivots)
