"""
Seeded generators of random structure codes for tests and sweeps.

All generators take a ``random.Random`` so that every corpus is
reproducible from one seed.

Distances are drawn as multiples of a step (default 1/2) and closed under
shortest paths, so the result is a metric whose positive distances are
all at least one step. Predicates are built as infima of cones
v_a + L * dhat(x, a), which are L-Lipschitz for the truncated metric by
construction.
"""

import itertools
import random
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .codes import PredicateSymbol, Signature, StructureCode, reindex

HALF = Fraction(1, 2)

SAMPLE_SIGNATURE = Signature((
    PredicateSymbol('P', 1, (Fraction(1),), Fraction(1)),
    PredicateSymbol('R', 2, (Fraction(1), Fraction(1)), Fraction(1)),
))

EMPTY_SIGNATURE = Signature(())


def random_distance_table(
    rng: random.Random,
    size: int,
    step: Fraction = HALF,
    max_steps: int = 6,
) -> Tuple[Tuple[Fraction, ...], ...]:
    """A random metric on ``size`` points with positive distances >= step."""
    dist = [[Fraction(0)] * size for _ in range(size)]
    for i, j in itertools.combinations(range(size), 2):
        dist[i][j] = dist[j][i] = step * rng.randint(1, max_steps)
    # Floyd-Warshall closure keeps every entry a sum of steps.
    for k in range(size):
        for i in range(size):
            for j in range(size):
                through = dist[i][k] + dist[k][j]
                if through < dist[i][j]:
                    dist[i][j] = through
    return tuple(tuple(row) for row in dist)


def _cone_table(
    rng: random.Random,
    dist: Sequence[Sequence[Fraction]],
    symbol: PredicateSymbol,
    levels: int = 4,
) -> List[Fraction]:
    size = len(dist)
    dhat = [[min(v, Fraction(1)) for v in row] for row in dist]
    anchors = {
        u: symbol.bound * Fraction(rng.randint(0, levels), levels)
        for u in itertools.product(range(size), repeat=symbol.arity)
    }
    table = []
    for u in itertools.product(range(size), repeat=symbol.arity):
        table.append(min(
            value + sum(c * dhat[u[j]][a[j]] for j, c in enumerate(symbol.lipschitz))
            for a, value in anchors.items()
        ))
    return table


def random_structure(
    rng: random.Random,
    size: int,
    signature: Optional[Signature] = None,
    step: Fraction = HALF,
    max_steps: int = 6,
) -> StructureCode:
    """A valid, quotiented structure code over ``signature`` (default SAMPLE_SIGNATURE)."""
    signature = SAMPLE_SIGNATURE if signature is None else signature
    dist = random_distance_table(rng, size, step, max_steps)
    tables = {symbol.name: _cone_table(rng, dist, symbol) for symbol in signature.predicates}
    return StructureCode(signature, size, dist, tables)


def random_metric_space(
    rng: random.Random,
    size: int,
    step: Fraction = Fraction(1, 4),
    max_steps: int = 3,
) -> StructureCode:
    """A bare metric space (no predicates) with diameter < 1 for small sizes."""
    return random_structure(rng, size, EMPTY_SIGNATURE, step, max_steps)


def random_permutation(rng: random.Random, size: int) -> Tuple[int, ...]:
    order = list(range(size))
    rng.shuffle(order)
    return tuple(order)


def random_isomorphic_copy(rng: random.Random, code: StructureCode) -> Tuple[StructureCode, Tuple[int, ...]]:
    """
    A relabelled copy of ``code`` and the bijection sigma with
    copy ≅ code via point i of code -> sigma[i] of the copy.
    """
    y = random_permutation(rng, code.size)
    copy = reindex(code, y)
    # copy point j is code point y[j], so code point y[j] maps to j
    sigma = [0] * code.size
    for j, i in enumerate(y):
        sigma[i] = j
    return copy, tuple(sigma)


def with_duplicates(rng: random.Random, code: StructureCode, extra: int = 1) -> StructureCode:
    """A pseudo-metric code obtained by repeating some points of ``code``."""
    y = list(range(code.size)) + [rng.randrange(code.size) for _ in range(extra)]
    rng.shuffle(y)
    return reindex(code, y)
