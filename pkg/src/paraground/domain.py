"""Pos and Con domains, and the encoding of monotone maps ``Con -> Pos``.

A monotone map ``phi`` from conjunctions of parameters to positive formulas
is represented by the single formula

    nabla(phi) = OR_g  BF(MM(g)) & phi(g)

over parameters and program variables.  Conjunction, disjunction,
projection and renaming of encoded maps are the plain Boolean operations on
the encodings, which is what lets the analysis run unchanged on parametric
input.  Instantiating an encoded result at ``g`` is a cofactor at the
minimum model of ``g``; no decoding is needed.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping
from weakref import WeakKeyDictionary

from .bdd import Manager, Ref


class DomainError(Exception):
    pass


@dataclass(frozen=True)
class PosFormula:
    """A node together with the variable scope it is read over.

    The only non-positive value admitted is FALSE, used as the bottom of the
    analysis lattice (nothing derived yet / unreachable).
    """

    node: Ref
    scope: frozenset[str]

    @property
    def mgr(self) -> Manager:
        return self.node.mgr

    @classmethod
    def of(cls, node: Ref, scope: Iterable[str] | None = None) -> "PosFormula":
        names = frozenset(scope) if scope is not None else frozenset(node.mgr.support(node))
        support = set(node.mgr.support(node))
        if not support <= names:
            raise DomainError(f"formula mentions {sorted(support - names)} outside its scope")
        return cls(node, names)

    @property
    def is_bottom(self) -> bool:
        return self.node.is_false

    def is_positive(self) -> bool:
        return self.mgr.is_positive(self.node, self.scope)

    def entails(self, other: "PosFormula") -> bool:
        return self.mgr.entails(self.node, other.node)

    def equiv(self, other: "PosFormula") -> bool:
        return self.node == other.node

    def __str__(self):
        from .formula import format_formula

        return format_formula(self.node)


def pos_and(a: PosFormula, b: PosFormula) -> PosFormula:
    return PosFormula(a.node & b.node, a.scope | b.scope)


def pos_or(a: PosFormula, b: PosFormula) -> PosFormula:
    return PosFormula(a.node | b.node, a.scope | b.scope)


def pos_project(a: PosFormula, names: Iterable[str], params: Iterable[str] = ()) -> PosFormula:
    """Hide ``names``; parameters listed in ``params`` must not be among them."""
    names = set(names)
    bad = names & set(params)
    if bad:
        raise DomainError(f"cannot project parameters {sorted(bad)} during analysis")
    return PosFormula(a.mgr.exists(names, a.node), a.scope - names)


def pos_rename(a: PosFormula, mapping: Mapping[str, str]) -> PosFormula:
    scope = frozenset(mapping.get(v, v) for v in a.scope)
    return PosFormula(a.mgr.rename(mapping, a.node), scope)


# -- Con -----------------------------------------------------------------------


@dataclass(frozen=True)
class ConElement:
    """The conjunction of a set of parameters (``1`` when empty)."""

    members: frozenset[str] = frozenset()

    @classmethod
    def of(cls, *names: str) -> "ConElement":
        return cls(frozenset(names))

    def formula(self, mgr: Manager) -> Ref:
        return mgr.conj(mgr.var(b) for b in sorted(self.members))

    def entails(self, other: "ConElement") -> bool:
        return self.members >= other.members

    def __str__(self):
        return " & ".join(sorted(self.members)) or "1"


def con_meet(g1: ConElement, g2: ConElement) -> ConElement:
    return ConElement(g1.members | g2.members)


def con_join(g1: ConElement, g2: ConElement) -> ConElement:
    return ConElement(g1.members & g2.members)


def con_elements(params: list[str]) -> list[ConElement]:
    """Every element of Con over ``params``, smallest subsets first."""
    return [ConElement(frozenset(c)) for k in range(len(params) + 1) for c in combinations(params, k)]


def mm(g: ConElement, params: Iterable[str]) -> dict[str, int]:
    """Minimum model of ``g``: exactly its members are true."""
    params = list(params)
    extra = g.members - set(params)
    if extra:
        raise DomainError(f"{sorted(extra)} are not parameters")
    return {b: int(b in g.members) for b in params}


def bf(mgr: Manager, assignment: Mapping[str, int]) -> Ref:
    """The formula whose only model (over the assignment's variables) is ``assignment``."""
    acc = mgr.true
    for name, value in assignment.items():
        v = mgr.var(name)
        acc = acc & (v if value else ~v)
    return acc


_MINTERMS: WeakKeyDictionary = WeakKeyDictionary()


def bm(mgr: Manager, g: ConElement, params: Iterable[str]) -> Ref:
    params = tuple(params)
    cache = _MINTERMS.setdefault(mgr, {})
    key = (g, params)
    if key not in cache:
        cache[key] = bf(mgr, mm(g, params))
    return cache[key]


# -- encoding of monotone maps -----------------------------------------------------

MonotoneMap = dict  # ConElement -> Ref, explicit representation for tests


def check_monotone(phi: Mapping[ConElement, Ref]) -> None:
    for g1, f1 in phi.items():
        for g2, f2 in phi.items():
            if g1.entails(g2) and not f1.mgr.entails(f1, f2):
                raise DomainError(f"map is not monotone: {g1} entails {g2} but values do not")


def nabla(phi: Mapping[ConElement, Ref], params: list[str], mgr: Manager) -> Ref:
    """Encode a monotone map as one formula over parameters and variables."""
    elements = con_elements(params)
    if set(phi) != set(elements):
        raise DomainError("map must be total on Con over the given parameters")
    check_monotone(phi)
    return mgr.disj(bm(mgr, g, params) & phi[g] for g in elements)


def nabla_inv(h: Ref, params: list[str]) -> dict[ConElement, Ref]:
    """Decode an encoding; raises if ``h`` is not the image of a monotone map."""
    mgr = h.mgr
    phi = {g: mgr.restrict(mm(g, params), h) for g in con_elements(params)}
    for g, f in phi.items():
        if not f.is_false and not mgr.is_positive(f):
            raise DomainError(f"value at {g} is not a positive formula")
    check_monotone(phi)
    if nabla(phi, params, mgr) != h:
        raise DomainError("formula is not an encoding of a monotone map")
    return phi


def implicational_form(phi: Mapping[ConElement, Ref], params: list[str], mgr: Manager) -> Ref:
    """``AND_g (g -> phi(g))``, an equivalent reading of ``nabla(phi)``."""
    return mgr.conj(g.formula(mgr).implies(phi[g]) for g in con_elements(params))


def encode_input(mgr: Manager, params: list[str]) -> Ref:
    """Encoding of the identity-like input map: ``AND_i (bi -> xi)``."""
    acc = mgr.true
    for i, b in enumerate(params, 1):
        acc = acc & mgr.var(b).implies(mgr.var(f"x{i}"))
    return acc


def instantiate(h: Ref, g: ConElement, params: Iterable[str]) -> Ref:
    """Value at ``g`` of the map encoded by ``h`` (a cofactor)."""
    return h.mgr.restrict(mm(g, params), h)


def instantiate_pos(h: PosFormula, g: ConElement, params: Iterable[str]) -> PosFormula:
    params = list(params)
    return PosFormula(instantiate(h.node, g, params), h.scope - set(params))
