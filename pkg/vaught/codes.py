"""
Borel codes of bounded functions on structure codes.

A code is built from three node kinds:

- Basic(theta, support): a quantifier-free formula in z0 .. z{N-1},
  read at the first N entries of an index sequence y.
- SupFamily(members): pointwise max of finitely many codes.
- Neg(inner): pointwise negation.

Leaves are bounded by construction: theta may use truncated distances,
predicates, constants and connectives, but not raw distances, which have
no bound independent of the structure.

JSON form:

    {"basic": {"theta": "(dhat z0 z1)", "support": 2}}
    {"sup": [node, ...]}
    {"neg": node}
"""

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from formulas.analysis import free_variables, infer_modulus
from formulas.exceptions import FormulaError
from formulas.grammar import parse_formula, print_formula
from formulas.nodes import FAMILIES, QUANTIFIERS, Const, Dist, Formula, children, max_chain
from structures.codes import Signature
from structures.exceptions import StructureFormatError

from .exceptions import InvalidBorelCode


def leaf_variable(i: int) -> str:
    return f"z{i}"


def leaf_variables(support: int) -> List[str]:
    return [leaf_variable(i) for i in range(support)]


class BorelCode:
    """Base class of Borel code nodes."""

    @property
    def support(self) -> int:
        raise NotImplementedError

    @property
    def depth(self) -> int:
        raise NotImplementedError

    def bound(self, signature: Optional[Signature] = None) -> Fraction:
        """The overall bound M_A."""
        raise NotImplementedError


def _check_quantifier_free(f: Formula) -> None:
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, QUANTIFIERS + FAMILIES):
            raise InvalidBorelCode("Basic leaves must be quantifier-free")
        if isinstance(node, Dist) and not node.truncated:
            raise InvalidBorelCode("Basic leaves use dhat, not raw d")
        stack.extend(children(node))


@dataclass(frozen=True)
class Basic(BorelCode):
    theta: Formula
    support_size: int

    def __post_init__(self):
        if self.support_size < 0:
            raise InvalidBorelCode("Support must be a natural number")
        _check_quantifier_free(self.theta)
        stray = sorted(free_variables(self.theta) - set(leaf_variables(self.support_size)))
        if stray:
            raise InvalidBorelCode(
                f"Variable {stray[0]!r} is outside z0..z{self.support_size - 1}",
                variable=stray[0],
            )

    @property
    def support(self) -> int:
        return self.support_size

    @property
    def depth(self) -> int:
        return 1

    def bound(self, signature: Optional[Signature] = None) -> Fraction:
        try:
            return infer_modulus(self.theta, signature).value_bound
        except FormulaError as e:
            raise InvalidBorelCode(f"Leaf has no bound: {e}")


@dataclass(frozen=True)
class SupFamily(BorelCode):
    members: Tuple[BorelCode, ...]

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise InvalidBorelCode("A sup family needs at least one member")
        object.__setattr__(self, 'members', members)

    @property
    def support(self) -> int:
        return max(m.support for m in self.members)

    @property
    def depth(self) -> int:
        return 1 + max(m.depth for m in self.members)

    def bound(self, signature: Optional[Signature] = None) -> Fraction:
        return max(m.bound(signature) for m in self.members)


@dataclass(frozen=True)
class Neg(BorelCode):
    inner: BorelCode

    @property
    def support(self) -> int:
        return self.inner.support

    @property
    def depth(self) -> int:
        return 1 + self.inner.depth

    def bound(self, signature: Optional[Signature] = None) -> Fraction:
        return self.inner.bound(signature)


def negation_count(code: BorelCode) -> int:
    """Largest number of Neg nodes on a root-to-leaf path."""
    if isinstance(code, Neg):
        return 1 + negation_count(code.inner)
    if isinstance(code, SupFamily):
        return max(negation_count(m) for m in code.members)
    return 0


# === Standard codes ===

def constant_code(c) -> Basic:
    return Basic(Const(Fraction(c)), 0)


def diameter_code(n_max: int = 6) -> SupFamily:
    """
    sup over n of max_{i, j < n} dhat(z_i, z_j): on a dense sequence this is
    min(1, diam), an isomorphism-invariant function.
    """
    members = []
    for n in range(1, n_max + 1):
        if n == 1:
            theta = Dist(leaf_variable(0), leaf_variable(0))
        else:
            theta = max_chain([
                Dist(leaf_variable(i), leaf_variable(j))
                for i in range(n) for j in range(i + 1, n)
            ])
        members.append(Basic(theta, n))
    return SupFamily(tuple(members))


# === JSON ===

def borel_from_dict(data: Any, signature: Optional[Signature] = None) -> BorelCode:
    if not isinstance(data, dict) or len(data) != 1:
        raise StructureFormatError(f"Bad Borel code node: {data!r}")
    (kind, body), = data.items()
    if kind == 'basic':
        try:
            theta = parse_formula(body['theta'], signature)
            support = body['support']
        except (KeyError, TypeError) as e:
            raise StructureFormatError(f"Bad basic node: {e}")
        if not isinstance(support, int) or isinstance(support, bool):
            raise StructureFormatError("'support' must be an integer")
        return Basic(theta, support)
    if kind == 'sup':
        if not isinstance(body, list):
            raise StructureFormatError("'sup' must hold a list")
        return SupFamily(tuple(borel_from_dict(m, signature) for m in body))
    if kind == 'neg':
        return Neg(borel_from_dict(body, signature))
    raise StructureFormatError(f"Unknown Borel code node {kind!r}")


def borel_to_dict(code: BorelCode) -> Dict[str, Any]:
    if isinstance(code, Basic):
        return {'basic': {'theta': print_formula(code.theta), 'support': code.support}}
    if isinstance(code, SupFamily):
        return {'sup': [borel_to_dict(m) for m in code.members]}
    return {'neg': borel_to_dict(code.inner)}


def load_borel_code(path: Union[str, Path], signature: Optional[Signature] = None) -> BorelCode:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except FileNotFoundError:
        raise StructureFormatError(f"File not found: {path}", path=str(path))
    except json.JSONDecodeError as e:
        raise StructureFormatError(f"Invalid JSON in {path}: {e}", path=str(path))
    return borel_from_dict(data, signature)


def dump_borel_code(code: BorelCode, path: Union[str, Path]) -> None:
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(borel_to_dict(code), f, indent=2)
        f.write('\n')
