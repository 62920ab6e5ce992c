"""
Back-and-forth ranks between two finite metric spaces.

ARCHITECTURE OVERVIEW
=====================
For tuples a in X^n and b in Y^n the ranks are

    r_0(a, b)     = max_{i,k<n} |d(a_i, a_k) - d(b_i, b_k)| / 2   (0 if n = 0)
    r_{s+1}(a, b) = max( max_x min_y r_s(ax, by), max_y min_x r_s(ax, by) )

Both sides depend only on the SET of pairs {(a_i, b_i)}, so a stage is
stored once for every subset S of X x Y, whatever the tuple length. With
the pairs numbered p = x * |Y| + y, a subset is a bitmask and a stage is
a numpy array indexed by mask. Values are stored as levels, indices into
the sorted list of all |d(x, x') - d(y, y')| / 2, which every rank value
belongs to.

One step is then a gather and two reductions:

    grid[S, x, y] = r_s[S | bit(x, y)]
    r_{s+1}[S]    = max(max_x min_y grid, max_y min_x grid)

Stages never decrease and take finitely many values, so they stabilize;
at the first stable stage the value at the empty set is the
Gromov-Hausdorff distance.

USAGE
=====
    game = BackAndForth(X, Y)
    game.value(2, (0, 1), (1, 1))

    table = rank_table(X, Y, alpha_max=3, n_max=2)
    table.write_csv(stream)

    stabilization_rank(X, Y)
    gh_rank(X, Y).to_dict()     # {'value': ..., 'scale_factor': ..., 'alpha_star': ...}
    result, expected = gh_cross_check(X, Y)

DESIGN DECISIONS
================
- Only finite stages; the ceiling ALPHA_CEILING is reported as
  BudgetExceeded instead of capping silently.
- n_probe limits which subsets take part in the stabilization test: those
  with at most n_probe pairs, i.e. the sets reachable by tuples of length
  <= n_probe. The default |X| * |Y| probes every subset.
"""

import csv
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from structures.conf import workbench_setting
from structures.exceptions import BudgetExceeded, IndexOutOfRange
from structures.rationals import format_rational

from .correspondences import gh_bruteforce
from .exceptions import LengthMismatch, MissingStage, RankInvariantViolation
from .spaces import FiniteSpace, rescale_pair

logger = logging.getLogger(__name__)

CSV_COLUMNS = ['alpha', 'n', 'a', 'b', 'value']


def _check_tuples(X: FiniteSpace, Y: FiniteSpace, a: Sequence[int], b: Sequence[int]) -> None:
    if len(a) != len(b):
        raise LengthMismatch(f"Tuples of lengths {len(a)} and {len(b)}", a=tuple(a), b=tuple(b))
    for space, seq in ((X, a), (Y, b)):
        for i in seq:
            if not isinstance(i, int) or not 0 <= i < space.size:
                raise IndexOutOfRange(f"Index {i!r} outside 0..{space.size - 1}", index=i)


def r0(X: FiniteSpace, Y: FiniteSpace, a: Sequence[int], b: Sequence[int]) -> Fraction:
    """Base rank: half the largest disagreement between inner distances."""
    _check_tuples(X, Y, a, b)
    n = len(a)
    return max(
        (abs(X.d(a[i], a[k]) - Y.d(b[i], b[k])) / 2 for i in range(n) for k in range(n)),
        default=Fraction(0),
    )


class BackAndForth:
    """All rank stages of one pair of spaces, computed on demand."""

    def __init__(self, X: FiniteSpace, Y: FiniteSpace, subset_budget: Optional[int] = None):
        self.X, self.Y = X, Y
        self.pairs = [(x, y) for x in X.points for y in Y.points]
        count = len(self.pairs)
        budget = workbench_setting('RANK_SUBSET_BUDGET', subset_budget)
        if 2 ** count > budget:
            raise BudgetExceeded(
                f"{2 ** count} pair-sets exceed the budget of {budget}",
                pairs=count, budget=budget,
            )

        gaps = {
            (p, q): abs(X.d(x, x2) - Y.d(y, y2)) / 2
            for p, (x, y) in enumerate(self.pairs)
            for q, (x2, y2) in enumerate(self.pairs)
        }
        self.levels: List[Fraction] = sorted(set(gaps.values()) | {Fraction(0)})
        level_of = {v: i for i, v in enumerate(self.levels)}
        self.gaps = np.zeros((count, count), dtype=np.int32)
        for (p, q), value in gaps.items():
            self.gaps[p, q] = level_of[value]

        self.bits = np.left_shift(1, np.arange(count, dtype=np.int64))
        self.masks = np.arange(2 ** count, dtype=np.int64)
        self.members = (self.masks[:, None] & self.bits[None, :]) != 0
        self.stages: List[np.ndarray] = [self._base()]
        logger.debug("Back-and-forth game on %dx%d points, %d levels", X.size, Y.size, len(self.levels))

    def _base(self) -> np.ndarray:
        base = np.zeros(len(self.masks), dtype=np.int32)
        for p in range(len(self.pairs)):
            against = np.where(self.members, self.gaps[p], 0).max(axis=1)
            base = np.maximum(base, np.where(self.members[:, p], against, 0))
        return base

    def step(self, values: np.ndarray) -> np.ndarray:
        """The next stage from ``values`` over every subset."""
        grid = values[self.masks[:, None] | self.bits[None, :]]
        grid = grid.reshape(len(self.masks), self.X.size, self.Y.size)
        forth = grid.min(axis=2).max(axis=1)
        back = grid.min(axis=1).max(axis=1)
        return np.maximum(forth, back)

    def stage(self, alpha: int) -> np.ndarray:
        while len(self.stages) <= alpha:
            self.stages.append(self.step(self.stages[-1]))
        return self.stages[alpha]

    def mask_of(self, a: Sequence[int], b: Sequence[int]) -> int:
        _check_tuples(self.X, self.Y, a, b)
        mask = 0
        for x, y in zip(a, b):
            mask |= 1 << (x * self.Y.size + y)
        return mask

    def value(self, alpha: int, a: Sequence[int], b: Sequence[int]) -> Fraction:
        return self.levels[int(self.stage(alpha)[self.mask_of(a, b)])]

    def stabilization(self, n_probe: Optional[int] = None, alpha_ceiling: Optional[int] = None) -> int:
        """Least alpha with stage alpha+1 equal to stage alpha on pair-sets of at most n_probe pairs."""
        n_probe = len(self.pairs) if n_probe is None else n_probe
        ceiling = workbench_setting('ALPHA_CEILING', alpha_ceiling)
        small = self.members.sum(axis=1) <= n_probe
        for alpha in range(ceiling + 1):
            if np.array_equal(self.stage(alpha)[small], self.stage(alpha + 1)[small]):
                logger.debug("Ranks stabilize at alpha=%d (n_probe=%d)", alpha, n_probe)
                return alpha
        raise BudgetExceeded(
            f"No stabilization up to alpha={ceiling}", alpha_ceiling=ceiling, n_probe=n_probe,
        )


# =============================================================================
# RANK TABLES
# =============================================================================

class RankTable:
    """r_{alpha,n}(a, b) for alpha <= alpha_max and tuples of length <= n_max."""

    def __init__(self, game: BackAndForth, alpha_max: int, n_max: int):
        self.game = game
        self.alpha_max = alpha_max
        self.n_max = n_max

    @property
    def X(self) -> FiniteSpace:
        return self.game.X

    @property
    def Y(self) -> FiniteSpace:
        return self.game.Y

    def value(self, alpha: int, a: Sequence[int], b: Sequence[int]) -> Fraction:
        if not 0 <= alpha <= self.alpha_max or len(a) > self.n_max:
            raise MissingStage(
                f"No stage {alpha} at length {len(a)} in a table up to "
                f"alpha={self.alpha_max}, n={self.n_max}",
                alpha=alpha, n=len(a),
            )
        return self.game.value(alpha, a, b)

    def tuples(self, n: int) -> Iterator[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
        for a in itertools.product(self.X.points, repeat=n):
            for b in itertools.product(self.Y.points, repeat=n):
                yield a, b

    def rows(self) -> Iterator[dict]:
        for alpha in range(self.alpha_max + 1):
            for n in range(self.n_max + 1):
                for a, b in self.tuples(n):
                    yield {
                        'alpha': alpha,
                        'n': n,
                        'a': ' '.join(map(str, a)),
                        'b': ' '.join(map(str, b)),
                        'value': format_rational(self.game.value(alpha, a, b)),
                    }

    def write_csv(self, stream: TextIO) -> int:
        writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS, lineterminator='\n')
        writer.writeheader()
        count = 0
        for row in self.rows():
            writer.writerow(row)
            count += 1
        return count


def table_size(X: FiniteSpace, Y: FiniteSpace, alpha_max: int, n_max: int) -> int:
    return (alpha_max + 1) * sum((X.size * Y.size) ** n for n in range(n_max + 1))


def rank_table(
    X: FiniteSpace,
    Y: FiniteSpace,
    alpha_max: int,
    n_max: int,
    tuple_budget: Optional[int] = None,
    subset_budget: Optional[int] = None,
) -> RankTable:
    """Compute and check the rank table up to (alpha_max, n_max)."""
    budget = workbench_setting('TUPLE_BUDGET', tuple_budget)
    cells = table_size(X, Y, alpha_max, n_max)
    if cells > budget:
        raise BudgetExceeded(f"{cells} table cells exceed the budget of {budget}", cells=cells, budget=budget)
    game = BackAndForth(X, Y, subset_budget)
    check_rank_invariants(game, alpha_max, n_max)
    return RankTable(game, alpha_max, n_max)


def lipschitz_witness(game: BackAndForth, alpha: int, n_max: Optional[int] = None) -> Optional[dict]:
    """
    A set of pairs where stage ``alpha`` is not 1-Lipschitz, or None.

    Replacing the pair (x, y) of a set by (x', y) may move the value by at
    most d(x, x'), and replacing it by (x, y') by at most d(y, y'). This is
    the tuple form of the property for the tuple listing the set once.
    Only sets of at most ``n_max`` pairs are checked.
    """
    values = np.array(game.levels, dtype=object)[game.stage(alpha)]
    masks = game.masks
    if n_max is not None:
        masks = masks[game.members.sum(axis=1) <= n_max]
    for p, (x, y) in enumerate(game.pairs):
        holding = masks[(masks & game.bits[p]) != 0]
        if not len(holding):
            continue
        for q, (x2, y2) in enumerate(game.pairs):
            if q == p or (x2 != x and y2 != y):
                continue
            step = game.X.d(x, x2) if y2 == y else game.Y.d(y, y2)
            moved = (holding & ~game.bits[p]) | game.bits[q]
            bad = np.flatnonzero(np.abs(values[holding] - values[moved]) > step)
            if len(bad):
                return {
                    'alpha': alpha,
                    'mask': int(holding[bad[0]]),
                    'moved': int(moved[bad[0]]),
                    'step': format_rational(step),
                }
    return None


def check_rank_invariants(game: BackAndForth, alpha_max: int, n_max: Optional[int] = None) -> None:
    """
    Stages 0..alpha_max never decrease and are 1-Lipschitz on sets of at
    most n_max pairs. Raises RankInvariantViolation with a witness.
    """
    for alpha in range(alpha_max + 1):
        if alpha:
            decreased = np.flatnonzero(game.stage(alpha) < game.stage(alpha - 1))
            if len(decreased):
                raise RankInvariantViolation(
                    f"Rank decreased at stage {alpha}", alpha=alpha, mask=int(decreased[0]),
                )
        witness = lipschitz_witness(game, alpha, n_max)
        if witness is not None:
            raise RankInvariantViolation(
                f"Rank moved by more than its pair at stage {alpha}", **witness,
            )


def rank_step(table: RankTable, alpha: int, n: int) -> Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], Fraction]:
    """
    Stage alpha+1 at length n, computed tuple by tuple from the stage-alpha
    values at length n+1 held in ``table``.
    """
    X, Y = table.X, table.Y
    result = {}
    for a, b in table.tuples(n):
        forth = max(
            min(table.value(alpha, a + (x,), b + (y,)) for y in Y.points) for x in X.points
        )
        back = max(
            min(table.value(alpha, a + (x,), b + (y,)) for x in X.points) for y in Y.points
        )
        result[(a, b)] = max(forth, back)
    return result


# =============================================================================
# STABILIZATION AND GROMOV-HAUSDORFF
# =============================================================================

@dataclass
class GHResult:
    """Gromov-Hausdorff distance in rescaled units plus the factor used."""
    value: Fraction
    scale_factor: Fraction
    alpha_star: int

    @property
    def unscaled(self) -> Fraction:
        return self.value / self.scale_factor

    def to_dict(self) -> dict:
        return {
            'value': format_rational(self.value),
            'scale_factor': format_rational(self.scale_factor),
            'alpha_star': self.alpha_star,
        }


def stabilization_rank(
    X: FiniteSpace,
    Y: FiniteSpace,
    n_probe: Optional[int] = None,
    alpha_ceiling: Optional[int] = None,
    subset_budget: Optional[int] = None,
) -> int:
    return BackAndForth(X, Y, subset_budget).stabilization(n_probe, alpha_ceiling)


def gh_rank(
    X: FiniteSpace,
    Y: FiniteSpace,
    n_probe: Optional[int] = None,
    alpha_ceiling: Optional[int] = None,
    subset_budget: Optional[int] = None,
) -> GHResult:
    """The stabilized rank r_{alpha*,0} after rescaling both diameters below 1."""
    X, Y, factor = rescale_pair(X, Y)
    game = BackAndForth(X, Y, subset_budget)
    alpha_star = game.stabilization(n_probe, alpha_ceiling)
    return GHResult(game.value(alpha_star, (), ()), factor, alpha_star)


def continuous_scott_rank(
    X: FiniteSpace,
    n_probe: Optional[int] = None,
    alpha_ceiling: Optional[int] = None,
    subset_budget: Optional[int] = None,
) -> int:
    """Stabilization rank of X against itself."""
    return stabilization_rank(X, X, n_probe, alpha_ceiling, subset_budget)


def gh_cross_check(
    X: FiniteSpace,
    Y: FiniteSpace,
    n_probe: Optional[int] = None,
    alpha_ceiling: Optional[int] = None,
    subset_budget: Optional[int] = None,
) -> Tuple[GHResult, Fraction]:
    """gh_rank next to the correspondence search, both in the rescaled units."""
    result = gh_rank(X, Y, n_probe, alpha_ceiling, subset_budget)
    scaled_x, scaled_y, _ = rescale_pair(X, Y)
    return result, gh_bruteforce(scaled_x, scaled_y)
