"""
Finite-rank Scott-style formulas of a finite metric space.

scott_formula(X, alpha, n, a) is a formula psi(y0, ..., y{n-1}) whose
value on any structure q at b equals the rank r_alpha(a, b) between X and
q. The sup over points of X becomes a finite Max, the quantifiers over q
stay Sup/Inf:

    psi_0(a)       = 1/2 * max_{i<k} |d(a_i, a_k) - d(y_i, y_k)|
    psi_{s+1}(a)   = max( max_x inf_{y_n} psi_s(ax), sup_{y_n} min_x psi_s(ax) )

with raw (untruncated) distances. Subformulas psi_s(ax) are built once and
shared, so the result is a DAG the interpreter evaluates once per
assignment of its free variables.
"""

import logging
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple

from formulas.nodes import Abs, Const, Dist, Formula, Inf, Max, Scale, Sub, Sup, max_chain, min_chain
from structures.conf import workbench_setting
from structures.exceptions import BudgetExceeded, IndexOutOfRange

from .exceptions import LengthMismatch
from .spaces import FiniteSpace

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


def tuple_variable(i: int) -> str:
    return f"y{i}"


class ScottFormulaBuilder:
    def __init__(self, X: FiniteSpace):
        self.X = X
        self._cache: Dict[Tuple[int, Tuple[int, ...]], Formula] = {}

    def build(self, alpha: int, a: Tuple[int, ...]) -> Formula:
        key = (alpha, a)
        formula = self._cache.get(key)
        if formula is None:
            formula = self._cache[key] = self._build(alpha, a)
        return formula

    def _base(self, a: Tuple[int, ...]) -> Formula:
        terms = [
            Abs(Sub(Const(self.X.d(a[i], a[k])), Dist(tuple_variable(i), tuple_variable(k), truncated=False)))
            for i in range(len(a)) for k in range(i + 1, len(a))
        ]
        if not terms:
            return Const(0)
        return Scale(HALF, max_chain(terms))

    def _build(self, alpha: int, a: Tuple[int, ...]) -> Formula:
        if alpha == 0:
            return self._base(a)
        fresh = tuple_variable(len(a))
        children = [self.build(alpha - 1, a + (x,)) for x in self.X.points]
        forth = max_chain([Inf(fresh, child) for child in children])
        back = Sup(fresh, min_chain(children))
        return Max(forth, back)


def formula_size(X: FiniteSpace, alpha: int) -> int:
    """Number of distinct rank subformulas below one scott_formula(X, alpha, n, a)."""
    return sum(X.size ** j for j in range(alpha + 1))


def scott_formula(
    X: FiniteSpace,
    alpha: int,
    n: int,
    a: Sequence[int],
    node_budget: Optional[int] = None,
    builder: Optional[ScottFormulaBuilder] = None,
) -> Formula:
    """
    psi with free variables y0..y{n-1}; pass one ``builder`` to share
    subformulas between calls.
    """
    a = tuple(a)
    if len(a) != n:
        raise LengthMismatch(f"Expected a tuple of length {n}, got {len(a)}", a=a, n=n)
    for i in a:
        if not isinstance(i, int) or not 0 <= i < X.size:
            raise IndexOutOfRange(f"Index {i!r} outside 0..{X.size - 1}", index=i)
    budget = workbench_setting('TUPLE_BUDGET', node_budget)
    size = formula_size(X, alpha)
    if size > budget:
        raise BudgetExceeded(f"{size} rank subformulas exceed the budget of {budget}", nodes=size, budget=budget)
    builder = builder or ScottFormulaBuilder(X)
    logger.debug("Scott formula for alpha=%d n=%d over %d points", alpha, n, X.size)
    return builder.build(alpha, a)
