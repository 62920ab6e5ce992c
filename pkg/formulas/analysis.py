"""
Static analysis of formulas.

ARCHITECTURE OVERVIEW
=====================
infer_modulus computes, bottom-up, a Lipschitz constant per free variable
(w.r.t. the truncated metric) and an interval [lo, hi] containing every
value of the formula. The value bound is max(|lo|, |hi|).

Rules:
- (dhat x y): 1 per variable, range [0, 1]; (dhat x x) is constant 0.
- (d x y): needs a diameter bound D; constant max(1, D), range [0, D].
- (pred B ...): the declared constants, summed over repeated arguments;
  range [-bound, bound].
- add/sub: constants add; intervals by interval arithmetic.
- scale c: constants and interval times c.
- min/max: pointwise max of constants; interval endpoints by min/max.
- abs: same constants; interval folded at 0.
- sup/inf x: drop x.
- join/meet: the declared vector, after checking every member against it.

USAGE
=====
    from formulas.analysis import infer_modulus, check_wellformed

    modulus = infer_modulus(formula, signature=code.signature)
    report = check_wellformed(formula, free={'x0', 'x1'}, signature=code.signature)
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional

from structures.codes import Signature
from structures.moduli import ModulusVector

from .exceptions import (
    ArityMismatch,
    FormulaError,
    IllFormed,
    ModulusExceedsDeclared,
    UnboundVariable,
    UnknownPredicate,
)
from .nodes import (
    FAMILIES, MISSING, QUANTIFIERS,
    Abs, Add, Atom, Const, Dist, Formula, FormulaFamily, Join, Max,
    Min, NodeCache, Scale, Sub, children,
)

ONE = Fraction(1)
ZERO = Fraction(0)


# =============================================================================
# Variables
# =============================================================================

def free_variables(f: Formula, cache: Optional[NodeCache] = None) -> FrozenSet[str]:
    cache = NodeCache() if cache is None else cache

    def visit(node: Formula) -> FrozenSet[str]:
        hit = cache.get(node)
        if hit is not MISSING:
            return hit
        if isinstance(node, Dist):
            result = frozenset((node.left, node.right))
        elif isinstance(node, Atom):
            result = frozenset(node.args)
        elif isinstance(node, QUANTIFIERS):
            result = visit(node.body) - {node.var}
        else:
            result = frozenset().union(*(visit(child) for child in children(node)))
        return cache.put(node, result)

    return visit(f)


def substitute(f: Formula, mapping: Mapping[str, str]) -> Formula:
    """
    Rename free variables.

    Raises IllFormed if a new name would be captured by a quantifier.
    """
    if not mapping:
        return f
    if isinstance(f, Dist):
        return Dist(mapping.get(f.left, f.left), mapping.get(f.right, f.right), f.truncated)
    if isinstance(f, Atom):
        return Atom(f.name, tuple(mapping.get(a, a) for a in f.args))
    if isinstance(f, Const):
        return f
    if isinstance(f, (Add, Sub, Min, Max)):
        return type(f)(substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, Scale):
        return Scale(f.factor, substitute(f.body, mapping))
    if isinstance(f, Abs):
        return Abs(substitute(f.body, mapping))
    if isinstance(f, QUANTIFIERS):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        body_free = free_variables(f.body)
        if any(v == f.var and k in body_free for k, v in inner.items()):
            raise IllFormed(f"Renaming would capture {f.var!r}", variable=f.var)
        return type(f)(f.var, substitute(f.body, inner))
    if isinstance(f, FAMILIES):
        family = f.family
        declared = ModulusVector(
            {mapping.get(v, v): c for v, c in family.declared.lipschitz.items()},
            family.declared.value_bound,
        )
        members = tuple(substitute(m, mapping) for m in family.members)
        return type(f)(FormulaFamily(members, declared, family.lower_bound_only))
    raise IllFormed(f"Not a formula: {f!r}")


# =============================================================================
# Modulus inference
# =============================================================================

@dataclass
class Shape:
    """Lipschitz constants plus a value interval."""
    constants: Dict[str, Fraction]
    lo: Fraction
    hi: Fraction

    def modulus(self) -> ModulusVector:
        return ModulusVector(self.constants, max(abs(self.lo), abs(self.hi)))


def _summed(a: Dict[str, Fraction], b: Dict[str, Fraction]) -> Dict[str, Fraction]:
    result = dict(a)
    for v, c in b.items():
        result[v] = result.get(v, ZERO) + c
    return result


def _pointwise_max(a: Dict[str, Fraction], b: Dict[str, Fraction]) -> Dict[str, Fraction]:
    result = dict(a)
    for v, c in b.items():
        result[v] = max(result.get(v, ZERO), c)
    return result


class ModulusInference:
    """
    Bottom-up inference of constants and value ranges.

    One instance caches shapes by node identity, so shared subtrees are
    analysed once.
    """

    def __init__(self, signature: Optional[Signature] = None, diameter_bound: Optional[Fraction] = None):
        self.signature = signature
        self.diameter_bound = None if diameter_bound is None else Fraction(diameter_bound)
        self.cache = NodeCache()

    def shape(self, node: Formula) -> Shape:
        hit = self.cache.get(node)
        if hit is not MISSING:
            return hit
        return self.cache.put(node, self._compute(node))

    def modulus(self, node: Formula) -> ModulusVector:
        return self.shape(node).modulus()

    def _compute(self, node: Formula) -> Shape:
        if isinstance(node, Dist):
            return self._distance(node)
        if isinstance(node, Atom):
            return self._atom(node)
        if isinstance(node, Const):
            return Shape({}, node.value, node.value)
        if isinstance(node, Add):
            a, b = self.shape(node.left), self.shape(node.right)
            return Shape(_summed(a.constants, b.constants), a.lo + b.lo, a.hi + b.hi)
        if isinstance(node, Sub):
            a, b = self.shape(node.left), self.shape(node.right)
            return Shape(_summed(a.constants, b.constants), a.lo - b.hi, a.hi - b.lo)
        if isinstance(node, Scale):
            a = self.shape(node.body)
            c = node.factor
            return Shape({v: c * k for v, k in a.constants.items()}, c * a.lo, c * a.hi)
        if isinstance(node, (Min, Max)):
            a, b = self.shape(node.left), self.shape(node.right)
            pick = min if isinstance(node, Min) else max
            return Shape(_pointwise_max(a.constants, b.constants), pick(a.lo, b.lo), pick(a.hi, b.hi))
        if isinstance(node, Abs):
            a = self.shape(node.body)
            if a.lo >= 0:
                lo, hi = a.lo, a.hi
            elif a.hi <= 0:
                lo, hi = -a.hi, -a.lo
            else:
                lo, hi = ZERO, max(-a.lo, a.hi)
            return Shape(dict(a.constants), lo, hi)
        if isinstance(node, QUANTIFIERS):
            a = self.shape(node.body)
            constants = {v: c for v, c in a.constants.items() if v != node.var}
            return Shape(constants, a.lo, a.hi)
        if isinstance(node, FAMILIES):
            return self._family(node)
        raise IllFormed(f"Not a formula: {node!r}")

    def _distance(self, node: Dist) -> Shape:
        if node.left == node.right:
            return Shape({node.left: ZERO}, ZERO, ZERO)
        if node.truncated:
            return Shape({node.left: ONE, node.right: ONE}, ZERO, ONE)
        if self.diameter_bound is None:
            raise IllFormed("Raw distance needs a diameter bound for modulus inference")
        constant = max(ONE, self.diameter_bound)
        return Shape({node.left: constant, node.right: constant}, ZERO, self.diameter_bound)

    def _atom(self, node: Atom) -> Shape:
        symbol = self.signature.get(node.name) if self.signature is not None else None
        if symbol is None:
            raise UnknownPredicate(f"Unknown predicate {node.name!r}", name=node.name)
        if symbol.arity != len(node.args):
            raise ArityMismatch(
                f"{node.name} takes {symbol.arity} arguments, got {len(node.args)}",
                name=node.name, expected=symbol.arity, found=len(node.args),
            )
        constants: Dict[str, Fraction] = {}
        for var, c in zip(node.args, symbol.lipschitz):
            constants[var] = constants.get(var, ZERO) + c
        return Shape(constants, -symbol.bound, symbol.bound)

    def _family(self, node) -> Shape:
        family = node.family
        declared = family.declared
        shapes = []
        for index, member in enumerate(family.members):
            shape = self.shape(member)
            if not shape.modulus().dominated_by(declared):
                raise ModulusExceedsDeclared(index)
            shapes.append(shape)
        bound = declared.value_bound
        if isinstance(node, Join):
            return Shape(dict(declared.lipschitz), max(s.lo for s in shapes), bound)
        return Shape(dict(declared.lipschitz), -bound, min(s.hi for s in shapes))


def infer_modulus(
    f: Formula,
    signature: Optional[Signature] = None,
    diameter_bound: Optional[Fraction] = None,
) -> ModulusVector:
    """
    Per-free-variable Lipschitz constants and a value bound for ``f``.

    Raises IllFormed (ModulusExceedsDeclared for a family member above the
    declared modulus), UnknownPredicate or ArityMismatch.
    """
    return ModulusInference(signature, diameter_bound).modulus(f)


# =============================================================================
# Well-formedness
# =============================================================================

@dataclass
class WellformedReport:
    valid: bool
    errors: List[FormulaError] = field(default_factory=list)
    modulus: Optional[ModulusVector] = None

    def raise_for_errors(self) -> None:
        if self.errors:
            raise self.errors[0]

    def to_dict(self) -> dict:
        return {
            'valid': self.valid,
            'errors': [e.to_dict() for e in self.errors],
            'modulus': self.modulus.to_dict() if self.modulus is not None else None,
        }


def check_binding(f: Formula, outer_free: FrozenSet[str]) -> None:
    """Raise IllFormed if a quantifier rebinds a variable in scope or free in ``f``."""
    seen = set()

    def visit(node: Formula, scope: FrozenSet[str]) -> None:
        key = (id(node), scope)
        if key in seen:
            return
        seen.add(key)
        if isinstance(node, QUANTIFIERS):
            if node.var in scope or node.var in outer_free:
                raise IllFormed(f"Quantifier rebinds {node.var!r}", variable=node.var)
            visit(node.body, scope | {node.var})
            return
        for child in children(node):
            visit(child, scope)

    visit(f, frozenset())


def check_wellformed(
    f: Formula,
    free: Optional[Iterable[str]] = None,
    signature: Optional[Signature] = None,
    diameter_bound: Optional[Fraction] = None,
) -> WellformedReport:
    """
    Check variable binding and family moduli.

    ``free`` is the declared set of free variables; any other free variable
    is reported as UnboundVariable.
    """
    try:
        outer_free = free_variables(f)
        if free is not None:
            stray = sorted(outer_free - set(free))
            if stray:
                raise UnboundVariable(f"Unbound variable {stray[0]!r}", variable=stray[0])
        check_binding(f, outer_free)
        modulus = infer_modulus(f, signature, diameter_bound)
    except FormulaError as e:
        return WellformedReport(valid=False, errors=[e])
    return WellformedReport(valid=True, modulus=modulus)
