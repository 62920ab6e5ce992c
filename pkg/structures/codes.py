"""
Codes for metric L-structures.

A structure code is a finite presentation of a metric structure: a
pseudo-metric table on N code points plus one table per predicate symbol.
The code points play the role of the dense sequence of a Polish structure;
at finite scale they are the whole space.

ARCHITECTURE OVERVIEW
=====================
- Signature / PredicateSymbol: the language. The distance symbol ``d`` is
  always present and never listed; every other symbol declares one
  Lipschitz constant per argument (w.r.t. the truncated metric
  min(d, 1)) and a bound on absolute values.
- StructureCode: immutable value holding the tables. Predicate tables are
  flat, row-major over index tuples, exactly as stored in JSON files.
- Operations: validation, truncated distance, quotient by zero distance,
  reindexing along an index sequence (the finite shadow of the map from
  dense sequences to isomorphic copies), isomorphism by backtracking, and
  the predicate encoding of function symbols.

USAGE
=====
    from structures.codes import validate_structure, quotient_zero_distance

    report = validate_structure(code)
    if not report.valid:
        print(report.errors[0])

    code = quotient_zero_distance(code)
    same = iso_check(code, reindex(code, (1, 0, 2))).isomorphic

DESIGN DECISIONS
================
1. Tables are tuples of Fractions; equality tests are exact.
2. Dimension errors are raised at construction (DimensionMismatch); the
   semantic invariants are reported by validate_structure.
3. Modulus compliance is checked on tuple pairs differing in one
   coordinate. The sum-form inequality for arbitrary pairs follows by
   walking from one tuple to the other a coordinate at a time.
4. validate_structure stops at the first violation, in the order:
   negativity, diagonal, symmetry, triangle, modulus, bound.
"""

import itertools
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .exceptions import (
    AsymmetricDistance,
    BoundViolation,
    DimensionMismatch,
    InconsistentPredicateOnClass,
    IndexOutOfRange,
    ModulusViolation,
    NegativeDistance,
    NonzeroDiagonal,
    SignatureError,
    StructureViolation,
    TriangleViolation,
)

logger = logging.getLogger(__name__)

DISTANCE_SYMBOL = 'd'
TRUNCATED_DISTANCE_SYMBOL = 'dhat'
RESERVED_NAMES = frozenset({DISTANCE_SYMBOL, TRUNCATED_DISTANCE_SYMBOL})

IDENTIFIER = re.compile(r'^[A-Za-z_][A-Za-z0-9_]*$')

ONE = Fraction(1)
ZERO = Fraction(0)


@dataclass(frozen=True)
class PredicateSymbol:
    """A predicate symbol with its declared modulus."""
    name: str
    arity: int
    lipschitz: Tuple[Fraction, ...]
    bound: Fraction

    def __post_init__(self):
        object.__setattr__(self, 'lipschitz', tuple(Fraction(c) for c in self.lipschitz))
        object.__setattr__(self, 'bound', Fraction(self.bound))


@dataclass(frozen=True)
class Signature:
    """
    The language of a structure.

    Contains the distinguished distance symbol implicitly; ``predicates``
    lists the other symbols.
    """
    predicates: Tuple[PredicateSymbol, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'predicates', tuple(self.predicates))
        seen = set()
        for symbol in self.predicates:
            if not IDENTIFIER.match(symbol.name):
                raise SignatureError(f"Bad predicate name: {symbol.name!r}")
            if symbol.name in RESERVED_NAMES:
                raise SignatureError(f"Reserved predicate name: {symbol.name!r}")
            if symbol.name in seen:
                raise SignatureError(f"Duplicate predicate name: {symbol.name!r}")
            seen.add(symbol.name)
            if symbol.arity < 1:
                raise SignatureError(f"Predicate {symbol.name} must have arity >= 1")
            if len(symbol.lipschitz) != symbol.arity:
                raise SignatureError(
                    f"Predicate {symbol.name} declares {len(symbol.lipschitz)} "
                    f"Lipschitz constants for arity {symbol.arity}"
                )
            if any(c < 0 for c in symbol.lipschitz) or symbol.bound < 0:
                raise SignatureError(f"Predicate {symbol.name} has a negative modulus")

    @property
    def symbols(self) -> Tuple[str, ...]:
        """All symbol names, the distance symbol first."""
        return (DISTANCE_SYMBOL,) + tuple(p.name for p in self.predicates)

    def get(self, name: str) -> Optional[PredicateSymbol]:
        for symbol in self.predicates:
            if symbol.name == name:
                return symbol
        return None

    def __contains__(self, name: str) -> bool:
        return name == DISTANCE_SYMBOL or self.get(name) is not None


@dataclass(frozen=True)
class StructureCode:
    """
    A finite presentation of a metric L-structure.

    Immutable after construction; safe to share between threads.
    """
    signature: Signature
    size: int
    dist: Tuple[Tuple[Fraction, ...], ...]
    pred_tables: Mapping[str, Tuple[Fraction, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if self.size < 1:
            raise DimensionMismatch("A structure code needs at least one point")
        rows = tuple(tuple(Fraction(v) for v in row) for row in self.dist)
        if len(rows) != self.size or any(len(row) != self.size for row in rows):
            raise DimensionMismatch(f"dist must be a {self.size}x{self.size} table")
        object.__setattr__(self, 'dist', rows)

        tables = {}
        for symbol in self.signature.predicates:
            if symbol.name not in self.pred_tables:
                raise DimensionMismatch(f"Missing table for predicate {symbol.name}")
            table = tuple(Fraction(v) for v in self.pred_tables[symbol.name])
            expected = self.size ** symbol.arity
            if len(table) != expected:
                raise DimensionMismatch(
                    f"Table for {symbol.name} has {len(table)} entries, expected {expected}"
                )
            tables[symbol.name] = table
        extra = set(self.pred_tables) - set(tables)
        if extra:
            raise DimensionMismatch(f"Tables for undeclared predicates: {sorted(extra)}")
        object.__setattr__(self, 'pred_tables', tables)

    def __hash__(self):
        return hash((self.signature, self.size, self.dist, tuple(sorted(self.pred_tables.items()))))

    # === Lookups ===

    def check_index(self, i: int) -> None:
        if not isinstance(i, int) or not 0 <= i < self.size:
            raise IndexOutOfRange(f"Index {i!r} outside 0..{self.size - 1}", index=i)

    def d(self, i: int, j: int) -> Fraction:
        return self.dist[i][j]

    def dhat(self, i: int, j: int) -> Fraction:
        value = self.dist[i][j]
        return value if value < ONE else ONE

    def value(self, name: str, indices: Sequence[int]) -> Fraction:
        """Value of predicate ``name`` at an index tuple."""
        return self.pred_tables[name][self.flat_index(indices)]

    def flat_index(self, indices: Sequence[int]) -> int:
        position = 0
        for i in indices:
            position = position * self.size + i
        return position

    def tuples(self, arity: int) -> Iterator[Tuple[int, ...]]:
        """All index tuples of the given arity, in row-major order."""
        return itertools.product(range(self.size), repeat=arity)

    @property
    def points(self) -> range:
        return range(self.size)

    @property
    def diameter(self) -> Fraction:
        return max(max(row) for row in self.dist)

    def min_positive_truncated_distance(self) -> Optional[Fraction]:
        """Smallest positive value of min(d, 1), or None if all distances are 0."""
        positive = [self.dhat(i, j) for i in self.points for j in self.points
                    if self.dist[i][j] > 0]
        return min(positive) if positive else None

    @property
    def is_metric(self) -> bool:
        """True if distinct points are at positive distance."""
        return all(self.dist[i][j] > 0 for i in self.points for j in self.points if i != j)


# =============================================================================
# Validation
# =============================================================================

@dataclass
class ValidationReport:
    """Outcome of validate_structure; ``errors`` holds the first violation."""
    valid: bool
    errors: List[StructureViolation] = field(default_factory=list)

    def raise_for_errors(self) -> None:
        if self.errors:
            raise self.errors[0]

    def to_dict(self) -> dict:
        return {
            'valid': self.valid,
            'errors': [e.to_dict() for e in self.errors],
        }


def _first_violation(code: StructureCode) -> Optional[StructureViolation]:
    n = code.size
    dist = code.dist

    # === Pseudo-metric axioms ===
    for i in range(n):
        for j in range(n):
            if dist[i][j] < 0:
                return NegativeDistance(f"d({i},{j}) < 0", i=i, j=j)
    for i in range(n):
        if dist[i][i] != 0:
            return NonzeroDiagonal(f"d({i},{i}) != 0", i=i)
    for i in range(n):
        for j in range(i + 1, n):
            if dist[i][j] != dist[j][i]:
                return AsymmetricDistance(i, j)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if dist[i][j] > dist[i][k] + dist[k][j]:
                    return TriangleViolation(i, j, k)

    # === Modulus compliance (one coordinate at a time) ===
    for symbol in code.signature.predicates:
        table = code.pred_tables[symbol.name]
        for u in code.tuples(symbol.arity):
            here = table[code.flat_index(u)]
            for position, constant in enumerate(symbol.lipschitz):
                for w in range(u[position] + 1, n):
                    v = u[:position] + (w,) + u[position + 1:]
                    there = table[code.flat_index(v)]
                    if abs(here - there) > constant * code.dhat(u[position], w):
                        return ModulusViolation(symbol.name, u, v)

    # === Value bounds ===
    for symbol in code.signature.predicates:
        table = code.pred_tables[symbol.name]
        for u in code.tuples(symbol.arity):
            if abs(table[code.flat_index(u)]) > symbol.bound:
                return BoundViolation(symbol.name, u)
    return None


def validate_structure(code: StructureCode) -> ValidationReport:
    """
    Check the pseudo-metric, modulus-compliance and bound invariants.

    Returns a report; the first violated constraint is reported with its
    witnesses.
    """
    violation = _first_violation(code)
    if violation is None:
        return ValidationReport(valid=True)
    logger.debug("Structure code rejected: %s", violation)
    return ValidationReport(valid=False, errors=[violation])


def truncated_distance(code: StructureCode, i: int, j: int) -> Fraction:
    """min(d(i, j), 1)."""
    code.check_index(i)
    code.check_index(j)
    return code.dhat(i, j)


# =============================================================================
# Quotient and reindexing
# =============================================================================

def zero_distance_classes(code: StructureCode) -> List[Tuple[int, ...]]:
    """Classes of points at distance 0, ordered by smallest member."""
    classes: List[Tuple[int, ...]] = []
    assigned = set()
    for i in code.points:
        if i in assigned:
            continue
        members = tuple(j for j in code.points if code.dist[i][j] == 0)
        assigned.update(members)
        classes.append(members)
    return classes


def class_indices(code: StructureCode) -> Tuple[int, ...]:
    """Position of each point's zero-distance class, i.e. its index in the quotient."""
    position = {}
    for index, members in enumerate(zero_distance_classes(code)):
        for i in members:
            position[i] = index
    return tuple(position[i] for i in code.points)


def quotient_zero_distance(code: StructureCode) -> StructureCode:
    """
    Merge points at distance 0.

    Raises InconsistentPredicateOnClass if some predicate separates two
    points of one class (impossible on validated codes).
    """
    classes = zero_distance_classes(code)
    if len(classes) == code.size:
        return code
    class_of = class_indices(code)
    representatives = tuple(members[0] for members in classes)

    merged = reindex(code, representatives)
    for symbol in code.signature.predicates:
        for u in code.tuples(symbol.arity):
            image = tuple(class_of[i] for i in u)
            if code.value(symbol.name, u) != merged.value(symbol.name, image):
                raise InconsistentPredicateOnClass(
                    f"Predicate {symbol.name} differs inside a zero-distance class at {u}",
                    predicate=symbol.name, u=u,
                )
    logger.debug("Quotient merged %d points into %d classes", code.size, len(classes))
    return merged


def reindex(code: StructureCode, y: Sequence[int]) -> StructureCode:
    """Pull every table back along the index sequence y."""
    y = tuple(y)
    if not y:
        raise IndexOutOfRange("reindex needs a nonempty index sequence")
    for i in y:
        code.check_index(i)
    m = len(y)
    dist = tuple(tuple(code.dist[y[i]][y[j]] for j in range(m)) for i in range(m))
    tables = {}
    for symbol in code.signature.predicates:
        table = code.pred_tables[symbol.name]
        tables[symbol.name] = tuple(
            table[code.flat_index(tuple(y[i] for i in u))]
            for u in itertools.product(range(m), repeat=symbol.arity)
        )
    return StructureCode(code.signature, m, dist, tables)


# =============================================================================
# Isomorphism
# =============================================================================

@dataclass
class IsoResult:
    """Outcome of iso_check; ``bijection[i]`` is the image of point i of a."""
    isomorphic: bool
    bijection: Optional[Tuple[int, ...]] = None


def iso_check(a: StructureCode, b: StructureCode) -> IsoResult:
    """
    Exact isomorphism test by backtracking over bijections.

    Both codes should be quotiented first; the search only prunes on the
    distance table and checks predicate tables on complete bijections.
    """
    if a.size != b.size or a.signature != b.signature:
        return IsoResult(False)
    n = a.size
    image: List[int] = []
    used = [False] * n

    def predicates_match() -> bool:
        for symbol in a.signature.predicates:
            for u in a.tuples(symbol.arity):
                mapped = tuple(image[i] for i in u)
                if a.value(symbol.name, u) != b.value(symbol.name, mapped):
                    return False
        return True

    def extend() -> bool:
        i = len(image)
        if i == n:
            return predicates_match()
        for j in range(n):
            if used[j]:
                continue
            if any(a.dist[i][k] != b.dist[j][image[k]] for k in range(i)):
                continue
            image.append(j)
            used[j] = True
            if extend():
                return True
            image.pop()
            used[j] = False
        return False

    if extend():
        return IsoResult(True, tuple(image))
    return IsoResult(False)


# =============================================================================
# Function symbols
# =============================================================================

def encode_function_symbol(code: StructureCode, f: Sequence[int], arity: int) -> Tuple[Fraction, ...]:
    """
    Predicate table of B_f(i_0, ..., i_{k-1}, r) = d(f(i_0, ..., i_{k-1}), r).

    ``f`` is the flat row-major table of the function over k-tuples.
    """
    f = tuple(f)
    if len(f) != code.size ** arity:
        raise DimensionMismatch(f"Function table needs {code.size ** arity} entries")
    for target in f:
        code.check_index(target)
    table = []
    for u in code.tuples(arity):
        target = f[code.flat_index(u)]
        for r in code.points:
            table.append(code.dist[target][r])
    return tuple(table)


def add_function_symbol(
    code: StructureCode,
    name: str,
    f: Sequence[int],
    arity: int,
    lipschitz: Optional[Sequence[Fraction]] = None,
) -> StructureCode:
    """
    Extend ``code`` with the predicate B_f for a function symbol.

    With D = max(1, diam), the declared constants are D * L_j for the
    function's arguments and D for r; the bound is the diameter.
    """
    lipschitz = tuple(Fraction(c) for c in (lipschitz or [1] * arity))
    if len(lipschitz) != arity:
        raise SignatureError(f"Function {name} declares {len(lipschitz)} constants for arity {arity}")
    scale = max(ONE, code.diameter)
    symbol = PredicateSymbol(
        name=name,
        arity=arity + 1,
        lipschitz=tuple(scale * c for c in lipschitz) + (scale,),
        bound=code.diameter,
    )
    signature = Signature(code.signature.predicates + (symbol,))
    tables: Dict[str, Tuple[Fraction, ...]] = dict(code.pred_tables)
    tables[name] = encode_function_symbol(code, f, arity)
    return StructureCode(signature, code.size, code.dist, tables)
