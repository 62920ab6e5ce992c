"""
Exact interpreter for formulas over a finite structure code.

ARCHITECTURE OVERVIEW
=====================
An Interpreter is bound to one structure. Formulas are compiled once into
closures over a mutable environment (variable -> point index); evaluation
is exact Fraction arithmetic.

- Before its first evaluation a formula is checked: no quantifier rebinds
  a variable, and every family member stays within its declared modulus
  under the structure's signature and diameter.
- sup/inf range over all code points of the structure.
- A quantifier whose variable is not free in its body is compiled to its
  body (the domain is never empty).
- Quantifier and family nodes memoize their value on the tuple of values
  of their free variables. Nested quantifiers of synthesized formulas
  re-evaluate the same inner subformula at the same arguments many
  times; the memo makes each evaluation happen once.

Every value carries a static exactness tag: a join over a prefix marked
lower-bound-only is a LOWER_BOUND of the full join, subtraction flips the
direction of its right operand, and mixing opposite directions gives
APPROXIMATE.

USAGE
=====
    interpreter = Interpreter(code)
    result = interpreter.evaluate(formula, {'x': 0, 'y': 2})
    result.value, result.exactness

    # one-off
    evaluate(formula, code, env)
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Mapping, Optional

from structures.codes import StructureCode
from structures.exceptions import IndexOutOfRange
from structures.moduli import ModulusVector
from structures.rationals import format_rational

from .analysis import ModulusInference, check_binding, free_variables
from .exceptions import ArityMismatch, IllFormed, UnboundVariable, UnknownPredicate
from .nodes import (
    FAMILIES, MISSING, QUANTIFIERS,
    Abs, Add, Atom, Const, Dist, Formula, Join, Max, Min, NodeCache, Scale, Sub, Sup,
)

ONE = Fraction(1)

Compiled = Callable[[Dict[str, int]], Fraction]


class Exactness(str, Enum):
    EXACT = 'exact'
    LOWER_BOUND = 'lower-bound'
    UPPER_BOUND = 'upper-bound'
    APPROXIMATE = 'approximate'


def combine(a: Exactness, b: Exactness) -> Exactness:
    """Tag of a monotone combination of two tagged values."""
    if a == b or b == Exactness.EXACT:
        return a
    if a == Exactness.EXACT:
        return b
    return Exactness.APPROXIMATE


def flip(a: Exactness) -> Exactness:
    if a == Exactness.LOWER_BOUND:
        return Exactness.UPPER_BOUND
    if a == Exactness.UPPER_BOUND:
        return Exactness.LOWER_BOUND
    return a


@dataclass(frozen=True)
class Evaluation:
    value: Fraction
    exactness: Exactness

    def to_dict(self) -> dict:
        return {'value': format_rational(self.value), 'exactness': self.exactness.value}


def exactness_of(f: Formula, cache: Optional[NodeCache] = None) -> Exactness:
    """Static exactness tag of a formula's value."""
    cache = NodeCache() if cache is None else cache

    def visit(node: Formula) -> Exactness:
        hit = cache.get(node)
        if hit is not MISSING:
            return hit
        if isinstance(node, (Const, Dist, Atom)):
            tag = Exactness.EXACT
        elif isinstance(node, Sub):
            tag = combine(visit(node.left), flip(visit(node.right)))
        elif isinstance(node, (Add, Min, Max)):
            tag = combine(visit(node.left), visit(node.right))
        elif isinstance(node, Scale):
            tag = Exactness.EXACT if node.factor == 0 else visit(node.body)
        elif isinstance(node, Abs):
            inner = visit(node.body)
            tag = inner if inner == Exactness.EXACT else Exactness.APPROXIMATE
        elif isinstance(node, QUANTIFIERS):
            tag = visit(node.body)
        elif isinstance(node, FAMILIES):
            tag = Exactness.EXACT
            for member in node.family.members:
                tag = combine(tag, visit(member))
            if node.family.lower_bound_only:
                direction = Exactness.LOWER_BOUND if isinstance(node, Join) else Exactness.UPPER_BOUND
                tag = combine(tag, direction)
        else:
            raise IllFormed(f"Not a formula: {node!r}")
        return cache.put(node, tag)

    return visit(f)


class Interpreter:
    """Evaluates formulas on one structure code; reuse it across formulas."""

    def __init__(self, structure: StructureCode):
        self.structure = structure
        self.points = range(structure.size)
        self._dist = [list(row) for row in structure.dist]
        self._dhat = [[v if v < ONE else ONE for v in row] for row in structure.dist]
        self._compiled = NodeCache()
        self._free = NodeCache()
        self._tags = NodeCache()
        self._checked = NodeCache()
        self._inference = ModulusInference(structure.signature, structure.diameter)

    def free(self, node: Formula) -> FrozenSet[str]:
        return free_variables(node, self._free)

    # === Public API ===

    def check(self, formula: Formula) -> ModulusVector:
        """
        Binding and family moduli of ``formula`` against this structure's
        signature and diameter; returns the inferred modulus.

        Raises IllFormed (ModulusExceedsDeclared for a family member above
        its declaration), UnknownPredicate or ArityMismatch.
        """
        hit = self._checked.get(formula)
        if hit is not MISSING:
            return hit
        check_binding(formula, self.free(formula))
        return self._checked.put(formula, self._inference.modulus(formula))

    def evaluate(self, formula: Formula, env: Optional[Mapping[str, int]] = None) -> Evaluation:
        """
        Value of ``formula`` under ``env``.

        Raises IllFormed for an ill-formed formula, UnboundVariable if env
        misses a free variable, IndexOutOfRange for a bad point index.
        """
        self.check(formula)
        env = dict(env or {})
        missing = sorted(self.free(formula) - set(env))
        if missing:
            raise UnboundVariable(f"No value for variable {missing[0]!r}", variable=missing[0])
        for var, index in env.items():
            if not isinstance(index, int) or not 0 <= index < self.structure.size:
                raise IndexOutOfRange(f"{var} -> {index!r} is not a point", variable=var, index=index)
        value = self.compile(formula)(env)
        return Evaluation(value, exactness_of(formula, self._tags))

    def value(self, formula: Formula, env: Optional[Mapping[str, int]] = None) -> Fraction:
        return self.evaluate(formula, env).value

    # === Compilation ===

    def compile(self, node: Formula) -> Compiled:
        hit = self._compiled.get(node)
        if hit is not MISSING:
            return hit
        return self._compiled.put(node, self._compile(node))

    def _compile(self, node: Formula) -> Compiled:
        if isinstance(node, Dist):
            table = self._dhat if node.truncated else self._dist
            left, right = node.left, node.right
            return lambda env: table[env[left]][env[right]]
        if isinstance(node, Atom):
            return self._atom(node)
        if isinstance(node, Const):
            value = node.value
            return lambda env: value
        if isinstance(node, Add):
            a, b = self.compile(node.left), self.compile(node.right)
            return lambda env: a(env) + b(env)
        if isinstance(node, Sub):
            a, b = self.compile(node.left), self.compile(node.right)
            return lambda env: a(env) - b(env)
        if isinstance(node, Min):
            a, b = self.compile(node.left), self.compile(node.right)
            return lambda env: min(a(env), b(env))
        if isinstance(node, Max):
            a, b = self.compile(node.left), self.compile(node.right)
            return lambda env: max(a(env), b(env))
        if isinstance(node, Scale):
            factor, body = node.factor, self.compile(node.body)
            return lambda env: factor * body(env)
        if isinstance(node, Abs):
            body = self.compile(node.body)
            return lambda env: abs(body(env))
        if isinstance(node, QUANTIFIERS):
            return self._quantifier(node)
        if isinstance(node, FAMILIES):
            return self._family(node)
        raise IllFormed(f"Not a formula: {node!r}")

    def _atom(self, node: Atom) -> Compiled:
        symbol = self.structure.signature.get(node.name)
        if symbol is None:
            raise UnknownPredicate(f"Unknown predicate {node.name!r}", name=node.name)
        if symbol.arity != len(node.args):
            raise ArityMismatch(
                f"{node.name} takes {symbol.arity} arguments, got {len(node.args)}",
                name=node.name, expected=symbol.arity, found=len(node.args),
            )
        table = self.structure.pred_tables[node.name]
        size = self.structure.size
        args = node.args
        if len(args) == 1:
            only = args[0]
            return lambda env: table[env[only]]
        if len(args) == 2:
            first, second = args
            return lambda env: table[env[first] * size + env[second]]

        def lookup(env):
            position = 0
            for var in args:
                position = position * size + env[var]
            return table[position]
        return lookup

    def _memoized(self, node: Formula, compute: Compiled) -> Compiled:
        keys = tuple(sorted(self.free(node)))
        memo: Dict[tuple, Fraction] = {}

        def run(env):
            key = tuple(env[v] for v in keys)
            value = memo.get(key)
            if value is None:
                value = memo[key] = compute(env)
            return value
        return run

    def _quantifier(self, node) -> Compiled:
        body = self.compile(node.body)
        if node.var not in self.free(node.body):
            return body
        var = node.var
        points = self.points
        pick = max if isinstance(node, Sup) else min

        def compute(env):
            saved = env.get(var, MISSING)
            values = []
            for i in points:
                env[var] = i
                values.append(body(env))
            if saved is MISSING:
                del env[var]
            else:
                env[var] = saved
            return pick(values)
        return self._memoized(node, compute)

    def _family(self, node) -> Compiled:
        members = [self.compile(m) for m in node.family.members]
        pick = max if isinstance(node, Join) else min

        def compute(env):
            return pick(member(env) for member in members)
        return self._memoized(node, compute)


def evaluate(formula: Formula, structure: StructureCode, env: Optional[Mapping[str, int]] = None) -> Evaluation:
    """Evaluate one formula on one structure."""
    return Interpreter(structure).evaluate(formula, env)
