"""
Exact Gromov-Hausdorff distances by correspondence search.

On finite spaces d_GH(X, Y) is half the least distortion

    dis(C) = max over (x, y), (x', y') in C of |d(x, x') - d(y, y')|

over correspondences C (relations total on both sides). A correspondence
containing the pinned pairs only needs one partner for every uncovered x
and then one for every y still uncovered, so the search assigns those
partners depth first, cheapest first, and cuts every branch whose running
distortion already reaches the best complete one.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from structures.conf import workbench_setting
from structures.exceptions import BudgetExceeded, IndexOutOfRange
from structures.rationals import format_rational

from .exceptions import LengthMismatch
from .spaces import FiniteSpace

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


@dataclass(frozen=True)
class Correspondence:
    pairs: Tuple[Pair, ...]
    distortion: Fraction

    def to_dict(self) -> dict:
        return {
            'pairs': [list(p) for p in self.pairs],
            'distortion': format_rational(self.distortion),
        }


def distortion(X: FiniteSpace, Y: FiniteSpace, pairs: Iterable[Pair]) -> Fraction:
    pairs = list(pairs)
    return max(
        (abs(X.d(x, x2) - Y.d(y, y2)) for x, y in pairs for x2, y2 in pairs),
        default=Fraction(0),
    )


def _check_pairs(X: FiniteSpace, Y: FiniteSpace, pairs: Sequence[Pair]) -> None:
    for x, y in pairs:
        for space, i in ((X, x), (Y, y)):
            if not isinstance(i, int) or not 0 <= i < space.size:
                raise IndexOutOfRange(f"Index {i!r} outside 0..{space.size - 1}", index=i)


class CorrespondenceSearch:
    """Branch-and-bound search for a least-distortion correspondence."""

    def __init__(self, X: FiniteSpace, Y: FiniteSpace, node_budget: Optional[int] = None):
        self.X, self.Y = X, Y
        self.node_budget = workbench_setting('CORRESPONDENCE_BUDGET', node_budget)
        self.nodes = 0
        self.best: Optional[Correspondence] = None

    def run(self, pinned: Sequence[Pair] = ()) -> Correspondence:
        chosen = sorted(set(pinned))
        self._search(chosen, distortion(self.X, self.Y, chosen))
        logger.debug(
            "Correspondence search on %dx%d points: %d nodes, distortion %s",
            self.X.size, self.Y.size, self.nodes, self.best.distortion,
        )
        return self.best

    def _added(self, chosen: List[Pair], x: int, y: int) -> Fraction:
        return max(
            (abs(self.X.d(x, a) - self.Y.d(y, b)) for a, b in chosen),
            default=Fraction(0),
        )

    def _next_slot(self, chosen: List[Pair]):
        covered_x = {x for x, _ in chosen}
        for x in self.X.points:
            if x not in covered_x:
                return [(x, y) for y in self.Y.points]
        covered_y = {y for _, y in chosen}
        for y in self.Y.points:
            if y not in covered_y:
                return [(x, y) for x in self.X.points]
        return None

    def _search(self, chosen: List[Pair], current: Fraction) -> None:
        self.nodes += 1
        if self.nodes > self.node_budget:
            raise BudgetExceeded(
                f"Correspondence search exceeded {self.node_budget} nodes",
                budget=self.node_budget,
            )
        if self.best is not None and current >= self.best.distortion:
            return
        slot = self._next_slot(chosen)
        if slot is None:
            self.best = Correspondence(tuple(sorted(chosen)), current)
            return
        options = sorted(
            (max(current, self._added(chosen, x, y)), (x, y)) for x, y in slot
        )
        for cost, pair in options:
            chosen.append(pair)
            self._search(chosen, cost)
            chosen.pop()


def optimal_correspondence(
    X: FiniteSpace,
    Y: FiniteSpace,
    pinned: Sequence[Pair] = (),
    node_budget: Optional[int] = None,
) -> Correspondence:
    """A least-distortion correspondence containing ``pinned``."""
    pinned = [tuple(p) for p in pinned]
    _check_pairs(X, Y, pinned)
    return CorrespondenceSearch(X, Y, node_budget).run(pinned)


def gh_bruteforce(X: FiniteSpace, Y: FiniteSpace, node_budget: Optional[int] = None) -> Fraction:
    return optimal_correspondence(X, Y, node_budget=node_budget).distortion / 2


def delta_k(
    X: FiniteSpace,
    Y: FiniteSpace,
    a: Sequence[int],
    b: Sequence[int],
    node_budget: Optional[int] = None,
) -> Fraction:
    """Half the least distortion of a correspondence pairing a_i with b_i."""
    if len(a) != len(b):
        raise LengthMismatch(f"Tuples of lengths {len(a)} and {len(b)}", a=tuple(a), b=tuple(b))
    return optimal_correspondence(X, Y, list(zip(a, b)), node_budget).distortion / 2
