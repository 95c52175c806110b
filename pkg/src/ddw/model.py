"""Field content of a first-order model: multiplets, index symmetry, variables.

A model couples a spacetime to a list of field multiplets and a Lagrangian
density, already expanded into explicit components.  Antisymmetric and
symmetric multiplets store only canonical components (strictly increasing or
non-decreasing index tuples); the helpers here map arbitrary index tuples to
a canonical variable and a sign, with sign 0 for identically zero slots.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Tuple

from .expr import Expression, Variable, VarKind
from .forms import Spacetime


@dataclass(frozen=True)
class ModelField:
    """One declared multiplet: name, index variances ('^' or '_'), optional symmetry."""

    name: str
    variances: Tuple[str, ...] = ()
    symmetry: Optional[str] = None

    @property
    def rank(self) -> int:
        return len(self.variances)

    def canonical_indices(self, indices: Tuple[int, ...]) -> Tuple[Optional[Tuple[int, ...]], int]:
        """Map an index tuple to (canonical tuple, sign); (None, 0) if the slot vanishes."""
        if len(indices) != self.rank:
            raise ValueError("field %s takes %d indices, got %r" % (self.name, self.rank, indices))
        if self.symmetry is None:
            return indices, 1
        idx = list(indices)
        sign = 1
        for i in range(1, len(idx)):
            j = i
            while j > 0 and idx[j] < idx[j - 1]:
                idx[j], idx[j - 1] = idx[j - 1], idx[j]
                sign = -sign
                j -= 1
        if self.symmetry == "antisymmetric":
            if any(a == b for a, b in zip(idx, idx[1:])):
                return None, 0
            return tuple(idx), sign
        if self.symmetry == "symmetric":
            return tuple(idx), 1
        raise ValueError("unknown symmetry %r" % self.symmetry)

    def component_tuples(self, dim: int) -> List[Tuple[int, ...]]:
        """Canonical component index tuples in lexicographic order."""
        out = []
        for combo in product(range(dim), repeat=self.rank):
            canon, sign = self.canonical_indices(combo)
            if sign == 1 and canon == combo:
                out.append(combo)
        return out


@dataclass
class Model:
    """Spacetime, declared multiplets and the component-expanded Lagrangian."""

    space: Spacetime
    fields: List[ModelField]
    lagrangian: Expression
    name: str = "model"
    field_map: Dict[str, ModelField] = field(init=False)

    def __post_init__(self):
        self.field_map = {f.name: f for f in self.fields}
        if len(self.field_map) != len(self.fields):
            raise ValueError("duplicate field names")

    def spec(self, name: str) -> ModelField:
        try:
            return self.field_map[name]
        except KeyError:
            raise KeyError("unknown field %r" % name) from None

    # -- variable construction ----------------------------------------------

    def field_variable(self, name: str, indices: Tuple[int, ...]) -> Tuple[Optional[Variable], int]:
        canon, sign = self.spec(name).canonical_indices(indices)
        if canon is None:
            return None, 0
        return Variable(VarKind.FIELD, name, canon), sign

    def jet_variable(self, name: str, mu: int, indices: Tuple[int, ...]) -> Tuple[Optional[Variable], int]:
        canon, sign = self.spec(name).canonical_indices(indices)
        if canon is None:
            return None, 0
        return Variable(VarKind.JET, name, (mu,) + canon), sign

    def momentum_variable(self, name: str, mu: int, indices: Tuple[int, ...]) -> Tuple[Optional[Variable], int]:
        canon, sign = self.spec(name).canonical_indices(indices)
        if canon is None:
            return None, 0
        return Variable(VarKind.MOMENTUM, name, (mu,) + canon), sign

    # -- enumeration ---------------------------------------------------------

    def components(self) -> List[Variable]:
        """Every canonical field component, declaration order then lexicographic."""
        out = []
        for f in self.fields:
            for combo in f.component_tuples(self.space.dim):
                out.append(Variable(VarKind.FIELD, f.name, combo))
        return out

    def jets(self) -> List[Variable]:
        out = []
        for comp in self.components():
            for mu in range(self.space.dim):
                out.append(Variable(VarKind.JET, comp.base, (mu,) + comp.indices))
        return out

    def momenta(self) -> List[Variable]:
        out = []
        for comp in self.components():
            for mu in range(self.space.dim):
                out.append(Variable(VarKind.MOMENTUM, comp.base, (mu,) + comp.indices))
        return out

    def momentum_of_jet(self, jet: Variable) -> Variable:
        if jet.kind != VarKind.JET:
            raise ValueError("not a jet variable: %s" % jet)
        return Variable(VarKind.MOMENTUM, jet.base, jet.indices)

    def jet_of_momentum(self, mom: Variable) -> Variable:
        if mom.kind != VarKind.MOMENTUM:
            raise ValueError("not a momentum variable: %s" % mom)
        return Variable(VarKind.JET, mom.base, mom.indices)

    def component_of(self, var: Variable) -> Variable:
        """Underlying field component of a jet or momentum variable."""
        if var.kind in (VarKind.JET, VarKind.MOMENTUM):
            return Variable(VarKind.FIELD, var.base, var.indices[1:])
        if var.kind == VarKind.FIELD:
            return var
        raise ValueError("no field component for %s" % var)
