"""
Brute-force oracle for the Vaught transform A^{*k}.

ARCHITECTURE OVERVIEW
=====================
For a finite structure p the dense sequences of p are arbitrary sequences
of its points, and every code in scope denotes a continuous function that
reads finitely many coordinates. The category supremum then coincides with
the plain supremum, so

    A^{*k}(p, u) = max over y in points^s of A(y) - k * dhat(y, u)

with s = max(k, support), where dhat(y, u) is the max of truncated
distances over the common prefix (0 if either sequence is empty).

VaughtOracle caches A(y) per support prefix and answers queries for every
u of every length. The enumeration size points^s is checked against
TUPLE_BUDGET before any work is done.

USAGE
=====
    oracle = VaughtOracle(code, p)
    oracle.a_star(2, (0, 1))

    a_star_k_oracle(code, p, k=1, u=(3,))
    k_lipschitz_audit(code, p, k=2).valid
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from formulas.exceptions import LipschitzViolation
from formulas.interpreter import Interpreter
from structures.codes import StructureCode
from structures.conf import workbench_setting
from structures.exceptions import BudgetExceeded

from .codes import Basic, BorelCode, Neg, SupFamily, leaf_variable
from .exceptions import InsufficientPrefix

logger = logging.getLogger(__name__)

ONE = Fraction(1)
ZERO = Fraction(0)


def _check_indices(p: StructureCode, seq: Sequence[int]) -> None:
    for i in seq:
        p.check_index(i)


def seq_distance(p: StructureCode, y: Sequence[int], u: Sequence[int]) -> Fraction:
    """Max of dhat over the common prefix of y and u; 0 if either is empty."""
    _check_indices(p, y)
    _check_indices(p, u)
    return max((p.dhat(a, b) for a, b in zip(y, u)), default=ZERO)


def eval_borel(
    code: BorelCode,
    p: StructureCode,
    y: Sequence[int],
    interpreter: Optional[Interpreter] = None,
) -> Fraction:
    """Value of the coded function at the sequence y."""
    y = tuple(y)
    if len(y) < code.support:
        raise InsufficientPrefix(
            f"Sequence of length {len(y)} is shorter than support {code.support}",
            length=len(y), support=code.support,
        )
    _check_indices(p, y)
    interpreter = interpreter or Interpreter(p)
    return _eval(code, y, interpreter)


def _eval(code: BorelCode, y: Tuple[int, ...], interpreter: Interpreter) -> Fraction:
    if isinstance(code, Basic):
        env = {leaf_variable(i): y[i] for i in range(code.support)}
        return interpreter.value(code.theta, env)
    if isinstance(code, SupFamily):
        return max(_eval(m, y, interpreter) for m in code.members)
    if isinstance(code, Neg):
        return -_eval(code.inner, y, interpreter)
    raise TypeError(f"Not a Borel code: {code!r}")


class VaughtOracle:
    """
    Exhaustive A^{*k} for one code on one structure.

    ``length`` forces enumeration of sequences at least that long; the
    answer must not depend on it.
    """

    def __init__(
        self,
        code: BorelCode,
        p: StructureCode,
        length: Optional[int] = None,
        tuple_budget: Optional[int] = None,
    ):
        self.code = code
        self.p = p
        self.support = code.support
        self.length = max(self.support, length or 0)
        self.tuple_budget = workbench_setting('TUPLE_BUDGET', tuple_budget)
        self.interpreter = Interpreter(p)
        self._values: Dict[Tuple[int, ...], Fraction] = {}
        self._dhat = [[p.dhat(i, j) for j in p.points] for i in p.points]

    def value_at(self, y: Sequence[int]) -> Fraction:
        """A(y); only the first ``support`` entries matter."""
        key = tuple(y[:self.support])
        value = self._values.get(key)
        if value is None:
            value = self._values[key] = eval_borel(self.code, self.p, key, self.interpreter)
        return value

    def sequence_length(self, k: int) -> int:
        return max(k, self.length)

    def a_star(self, k: int, u: Sequence[int]) -> Fraction:
        u = tuple(u)
        if len(u) != k:
            raise InsufficientPrefix(f"u must have length k={k}, got {len(u)}", length=len(u), k=k)
        _check_indices(self.p, u)
        s = self.sequence_length(k)
        count = self.p.size ** s
        if count > self.tuple_budget:
            raise BudgetExceeded(
                f"{count} sequences exceed the tuple budget {self.tuple_budget}",
                tuples=count, budget=self.tuple_budget,
            )
        dhat = self._dhat
        best = None
        for y in itertools.product(self.p.points, repeat=s):
            penalty = max((dhat[a][b] for a, b in zip(y, u)), default=ZERO)
            value = self.value_at(y) - k * penalty
            if best is None or value > best:
                best = value
        return best

    def table(self, k: int) -> Dict[Tuple[int, ...], Fraction]:
        """A^{*k}(p, u) for every u of length k."""
        logger.debug(
            "Vaught oracle: k=%d, %d sequences per query, %d queries",
            k, self.p.size ** self.sequence_length(k), self.p.size ** k,
        )
        return {u: self.a_star(k, u) for u in itertools.product(self.p.points, repeat=k)}


def a_star_k_oracle(
    code: BorelCode,
    p: StructureCode,
    k: int,
    u: Sequence[int],
    tuple_budget: Optional[int] = None,
) -> Fraction:
    """A^{*k}(p, u) by exhaustive enumeration."""
    return VaughtOracle(code, p, tuple_budget=tuple_budget).a_star(k, u)


@dataclass
class KLipschitzReport:
    valid: bool
    k: int
    checked_pairs: int = 0
    errors: List[LipschitzViolation] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            'valid': self.valid,
            'k': self.k,
            'checked_pairs': self.checked_pairs,
            'errors': [e.to_dict() for e in self.errors],
        }


def _as_env(u: Tuple[int, ...]) -> Dict[str, int]:
    return {f"u{i}": j for i, j in enumerate(u)}


def k_lipschitz_audit(
    code: BorelCode,
    p: StructureCode,
    k: int,
    oracle: Optional[VaughtOracle] = None,
) -> KLipschitzReport:
    """Check |A^{*k}(p,u) - A^{*k}(p,u')| <= k * dhat(u, u') for all u, u'."""
    oracle = oracle or VaughtOracle(code, p)
    values = oracle.table(k)
    checked = 0
    for u, v in itertools.combinations(values, 2):
        checked += 1
        if abs(values[u] - values[v]) > k * seq_distance(p, u, v):
            return KLipschitzReport(False, k, checked, [LipschitzViolation(_as_env(u), _as_env(v))])
    return KLipschitzReport(True, k, checked)
