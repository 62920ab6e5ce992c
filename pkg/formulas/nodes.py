"""
Formula syntax trees.

Nodes are frozen dataclasses. Trees may share subtrees (the rank formulas
of scott_gh are DAGs); every traversal in this package caches per node
identity, so shared subtrees are visited once.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Tuple

from structures.moduli import ModulusVector

from .exceptions import IllFormed


class Formula:
    """Base class of all formula nodes."""
    __slots__ = ()


# === Atomic formulas ===

@dataclass(frozen=True)
class Dist(Formula):
    left: str
    right: str
    truncated: bool = True


@dataclass(frozen=True)
class Atom(Formula):
    name: str
    args: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, 'args', tuple(self.args))


@dataclass(frozen=True)
class Const(Formula):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, 'value', Fraction(self.value))


# === Connectives ===

@dataclass(frozen=True)
class Add(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Sub(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Scale(Formula):
    factor: Fraction
    body: Formula

    def __post_init__(self):
        factor = Fraction(self.factor)
        if factor < 0:
            raise IllFormed(f"Negative scale factor {factor}")
        object.__setattr__(self, 'factor', factor)


@dataclass(frozen=True)
class Min(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Max(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Abs(Formula):
    body: Formula


# === Quantifiers ===

@dataclass(frozen=True)
class Sup(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Inf(Formula):
    var: str
    body: Formula


# === Countable families ===

@dataclass(frozen=True)
class FormulaFamily:
    """
    A finite prefix of a countable family sharing one declared modulus.

    ``lower_bound_only`` marks a prefix of a longer family: a Join over it
    only bounds the true value from below (a Meet from above).
    """
    members: Tuple[Formula, ...]
    declared: ModulusVector
    lower_bound_only: bool = False

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise IllFormed("A formula family needs at least one member")
        object.__setattr__(self, 'members', members)

    def truncated(self, length: int) -> 'FormulaFamily':
        return FormulaFamily(self.members[:length], self.declared, self.lower_bound_only)


@dataclass(frozen=True)
class Join(Formula):
    family: FormulaFamily


@dataclass(frozen=True)
class Meet(Formula):
    family: FormulaFamily


QUANTIFIERS = (Sup, Inf)
BINARY = (Add, Sub, Min, Max)
FAMILIES = (Join, Meet)


# === Builders ===

def max_chain(formulas: Sequence[Formula]) -> Formula:
    """Left-nested Max over a nonempty sequence."""
    result = formulas[0]
    for f in formulas[1:]:
        result = Max(result, f)
    return result


def min_chain(formulas: Sequence[Formula]) -> Formula:
    result = formulas[0]
    for f in formulas[1:]:
        result = Min(result, f)
    return result


def sup_over(variables: Iterable[str], body: Formula) -> Formula:
    """sup_{v0} sup_{v1} ... body, the first variable outermost."""
    for var in reversed(list(variables)):
        body = Sup(var, body)
    return body


def inf_over(variables: Iterable[str], body: Formula) -> Formula:
    for var in reversed(list(variables)):
        body = Inf(var, body)
    return body


MISSING = object()


class NodeCache:
    """Per-traversal cache keyed by node identity."""

    def __init__(self):
        self._store = {}

    def get(self, node, default=MISSING):
        entry = self._store.get(id(node))
        # the node is stored alongside its value so its id cannot be reused
        if entry is None or entry[0] is not node:
            return default
        return entry[1]

    def put(self, node, value):
        self._store[id(node)] = (node, value)
        return value

    def __len__(self):
        return len(self._store)


def children(f: Formula) -> Tuple[Formula, ...]:
    if isinstance(f, BINARY):
        return (f.left, f.right)
    if isinstance(f, (Scale, Abs) + QUANTIFIERS):
        return (f.body,)
    if isinstance(f, FAMILIES):
        return f.family.members
    return ()
