"""
Seeded generators of finitary Borel codes.

Leaves are quantifier-free formulas with values in [-1, 1] built from
truncated distances, the predicates of SAMPLE_SIGNATURE, constants,
min/max, abs and averages. ``max_negations`` caps the number of Neg nodes
on any root-to-leaf path; synthesized formulas for nested negations grow
quickly, so the large sweeps keep it at 1.
"""

import random
from fractions import Fraction
from typing import List, Optional

from formulas.nodes import Abs, Add, Atom, Const, Dist, Formula, Max, Min, Scale, Sub
from structures.codes import Signature
from structures.sampling import SAMPLE_SIGNATURE

from .codes import Basic, BorelCode, Neg, SupFamily, leaf_variable

HALF = Fraction(1, 2)
LEAF_CONSTANTS = [Fraction(n, 4) for n in range(-4, 5)]


def random_theta(
    rng: random.Random,
    support: int,
    depth: int = 2,
    signature: Optional[Signature] = SAMPLE_SIGNATURE,
) -> Formula:
    """A quantifier-free formula in z0..z{support-1} bounded by 1."""
    variables = [leaf_variable(i) for i in range(support)]

    def leaf() -> Formula:
        options = ['const']
        if variables:
            options += ['dhat', 'dhat']
            if signature is not None and signature.predicates:
                options.append('pred')
        kind = rng.choice(options)
        if kind == 'const':
            return Const(rng.choice(LEAF_CONSTANTS))
        if kind == 'dhat':
            return Dist(rng.choice(variables), rng.choice(variables))
        symbol = rng.choice([s for s in signature.predicates if s.bound <= 1])
        return Atom(symbol.name, tuple(rng.choice(variables) for _ in range(symbol.arity)))

    def build(level: int) -> Formula:
        if level <= 0 or rng.random() < 0.3:
            return leaf()
        kind = rng.choice(['min', 'max', 'abs', 'avg', 'half-diff'])
        if kind == 'min':
            return Min(build(level - 1), build(level - 1))
        if kind == 'max':
            return Max(build(level - 1), build(level - 1))
        if kind == 'abs':
            return Abs(build(level - 1))
        if kind == 'avg':
            return Scale(HALF, Add(build(level - 1), build(level - 1)))
        return Scale(HALF, Sub(build(level - 1), build(level - 1)))

    return build(depth)


def random_borel_code(
    rng: random.Random,
    depth: int,
    max_support: int = 2,
    max_negations: int = 1,
    signature: Optional[Signature] = SAMPLE_SIGNATURE,
) -> BorelCode:
    """A random code of exactly the given depth."""
    if depth <= 1:
        return _random_basic(rng, max_support, signature)
    if max_negations > 0 and rng.random() < 0.4:
        return Neg(random_borel_code(rng, depth - 1, max_support, max_negations - 1, signature))
    width = rng.randint(1, 3)
    deep = rng.randrange(width)
    members = []
    for i in range(width):
        member_depth = depth - 1 if i == deep else rng.randint(1, depth - 1)
        members.append(random_borel_code(rng, member_depth, max_support, max_negations, signature))
    return SupFamily(tuple(members))


def _random_basic(rng: random.Random, max_support: int, signature: Optional[Signature]) -> Basic:
    support = rng.randint(0, max_support)
    return Basic(random_theta(rng, support, signature=signature), support)


def random_corpus(
    rng: random.Random,
    count: int,
    max_depth: int = 4,
    max_support: int = 2,
    max_negations: int = 1,
) -> List[BorelCode]:
    """
    ``count`` codes cycling through depths 1..max_depth, always including a
    negated sup family.
    """
    corpus: List[BorelCode] = []
    for i in range(count):
        corpus.append(random_borel_code(rng, 1 + i % max_depth, max_support, max_negations))
    if max_negations > 0 and max_depth >= 3:
        corpus[-1] = Neg(SupFamily((
            random_borel_code(rng, 1, max_support, 0),
            random_borel_code(rng, 1, max_support, 0),
        )))
    return corpus
