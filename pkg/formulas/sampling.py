"""
Seeded generator of random well-formed formulas.

Bound variables get fresh names (q0, q1, ...) so generated formulas never
shadow. Family declarations are the pointwise max of the members' inferred
moduli, which makes every generated family well-formed.
"""

import itertools
import random
from fractions import Fraction
from typing import List, Optional, Sequence

from structures.codes import Signature
from structures.moduli import ModulusVector
from structures.sampling import SAMPLE_SIGNATURE

from .analysis import ModulusInference
from .nodes import (
    Abs, Add, Atom, Const, Dist, Formula, FormulaFamily, Inf, Join, Max, Meet,
    Min, Scale, Sub, Sup,
)

CONSTANTS = [Fraction(n, d) for n in range(-2, 3) for d in (1, 2, 3)]
SCALES = [Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3)]


class FormulaSampler:
    def __init__(
        self,
        rng: random.Random,
        signature: Optional[Signature] = SAMPLE_SIGNATURE,
        diameter_bound: Optional[Fraction] = None,
        families: bool = True,
        lower_bound_only: bool = False,
    ):
        self.rng = rng
        self.signature = signature
        self.diameter_bound = diameter_bound
        self.families = families
        self.lower_bound_only = lower_bound_only
        self.fresh = itertools.count()
        self.inference = ModulusInference(signature, diameter_bound)

    def formula(self, scope: Sequence[str], depth: int) -> Formula:
        if depth <= 0:
            return self.leaf(scope)
        kinds = ['leaf', 'add', 'sub', 'scale', 'min', 'max', 'abs', 'sup', 'inf']
        if self.families:
            kinds += ['join', 'meet']
        kind = self.rng.choice(kinds)
        if kind == 'leaf':
            return self.leaf(scope)
        if kind in ('add', 'sub', 'min', 'max'):
            node = {'add': Add, 'sub': Sub, 'min': Min, 'max': Max}[kind]
            return node(self.formula(scope, depth - 1), self.formula(scope, depth - 1))
        if kind == 'scale':
            return Scale(self.rng.choice(SCALES), self.formula(scope, depth - 1))
        if kind == 'abs':
            return Abs(self.formula(scope, depth - 1))
        if kind in ('sup', 'inf'):
            var = f"q{next(self.fresh)}"
            body = self.formula(list(scope) + [var], depth - 1)
            return (Sup if kind == 'sup' else Inf)(var, body)
        members = tuple(self.formula(scope, depth - 1) for _ in range(self.rng.randint(1, 3)))
        family = FormulaFamily(
            members,
            self.declaration(members),
            self.lower_bound_only and self.rng.random() < 0.5,
        )
        return (Join if kind == 'join' else Meet)(family)

    def declaration(self, members: Sequence[Formula]) -> ModulusVector:
        constants = {}
        bound = Fraction(0)
        for member in members:
            modulus = self.inference.modulus(member)
            for var, c in modulus.lipschitz.items():
                constants[var] = max(constants.get(var, Fraction(0)), c)
            bound = max(bound, modulus.value_bound)
        return ModulusVector(constants, bound)

    def leaf(self, scope: Sequence[str]) -> Formula:
        options = ['const']
        if scope:
            options += ['dhat', 'dhat']
            if self.diameter_bound is not None:
                options.append('d')
            if self.signature is not None and self.signature.predicates:
                options.append('pred')
        kind = self.rng.choice(options)
        if kind == 'const':
            return Const(self.rng.choice(CONSTANTS))
        if kind in ('dhat', 'd'):
            return Dist(self.rng.choice(scope), self.rng.choice(scope), truncated=(kind == 'dhat'))
        symbol = self.rng.choice(self.signature.predicates)
        return Atom(symbol.name, tuple(self.rng.choice(scope) for _ in range(symbol.arity)))


def random_formula(
    rng: random.Random,
    variables: Sequence[str] = ('x', 'y'),
    depth: int = 3,
    signature: Optional[Signature] = SAMPLE_SIGNATURE,
    diameter_bound: Optional[Fraction] = None,
    families: bool = True,
    lower_bound_only: bool = False,
) -> Formula:
    """A random well-formed formula whose free variables are among ``variables``."""
    sampler = FormulaSampler(rng, signature, diameter_bound, families, lower_bound_only)
    return sampler.formula(list(variables), depth)


def random_formulas(rng: random.Random, count: int, **options) -> List[Formula]:
    return [random_formula(rng, **options) for _ in range(count)]
