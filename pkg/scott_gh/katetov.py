"""
Bi-Katetov functions between two finite metric spaces.

A table f on X x Y is bi-Katetov when it is nonnegative, 1-Lipschitz in
each argument and

    d_X(x, w) <= f(x, y) + f(w, y)      d_Y(y, z) <= f(x, y) + f(x, z)

Tables are numpy object arrays of Fractions so that every inequality is
checked with exact arithmetic over broadcast grids.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np

from structures.exceptions import DimensionMismatch, IndexOutOfRange

from .exceptions import EmptySubspace, KatetovViolation
from .spaces import FiniteSpace

Table = Tuple[Tuple[Fraction, ...], ...]


def as_array(f: Sequence[Sequence[Fraction]], X: FiniteSpace, Y: FiniteSpace) -> np.ndarray:
    rows = [[Fraction(v) for v in row] for row in f]
    if len(rows) != X.size or any(len(row) != Y.size for row in rows):
        raise DimensionMismatch(f"Table must be {X.size}x{Y.size}")
    return np.array(rows, dtype=object).reshape(X.size, Y.size)


def as_table(values: np.ndarray) -> Table:
    return tuple(tuple(Fraction(v) for v in row) for row in values)


@dataclass
class KatetovReport:
    valid: bool
    errors: List[KatetovViolation] = field(default_factory=list)

    def raise_for_errors(self) -> None:
        if self.errors:
            raise self.errors[0]

    def to_dict(self) -> dict:
        return {'valid': self.valid, 'errors': [e.to_dict() for e in self.errors]}


def katetov_check(f: Sequence[Sequence[Fraction]], X: FiniteSpace, Y: FiniteSpace) -> KatetovReport:
    """Check every inequality; report the first witness of each kind."""
    F = as_array(f, X, Y)
    DX, DY = X.array(), Y.array()
    checks = [
        ('negative', F < 0),
        # (x, w, y)
        ('lipschitz-x', abs(F[:, None, :] - F[None, :, :]) > DX[:, :, None]),
        # (x, y, z)
        ('lipschitz-y', abs(F[:, :, None] - F[:, None, :]) > DY[None, :, :]),
        ('triangle-x', DX[:, :, None] > F[:, None, :] + F[None, :, :]),
        ('triangle-y', DY[None, :, :] > F[:, :, None] + F[:, None, :]),
    ]
    errors = []
    for kind, violated in checks:
        witnesses = np.argwhere(np.asarray(violated, dtype=bool))
        if len(witnesses):
            errors.append(KatetovViolation(kind, tuple(int(i) for i in witnesses[0])))
    return KatetovReport(valid=not errors, errors=errors)


def katetov_extend(
    f: Sequence[Sequence[Fraction]],
    X: FiniteSpace,
    Y: FiniteSpace,
    A0: Sequence[int],
    B0: Sequence[int],
) -> Table:
    """
    Amalgamate f on A0 x B0 to X x Y:

        f'(x, y) = min_{a, b} d_X(x, a) + f(a, b) + d_Y(b, y)
    """
    if not A0 or not B0:
        raise EmptySubspace("Both subspaces must be nonempty")
    for space, indices in ((X, A0), (Y, B0)):
        for i in indices:
            if not 0 <= i < space.size:
                raise IndexOutOfRange(f"Index {i!r} outside 0..{space.size - 1}", index=i)
    F0 = as_array(f, X.subspace(A0), Y.subspace(B0))
    to_a = X.array()[:, list(A0)]
    from_b = Y.array()[list(B0), :]
    total = to_a[:, :, None, None] + F0[None, :, :, None] + from_b[None, None, :, :]
    return as_table(total.reshape(X.size, len(A0) * len(B0), Y.size).min(axis=1))


def q_error(f: Sequence[Sequence[Fraction]], X: FiniteSpace, Y: FiniteSpace) -> Fraction:
    """max(max_x min_y f, max_y min_x f)."""
    F = as_array(f, X, Y)
    return max(F.min(axis=1).max(), F.min(axis=0).max())


def correspondence_function(
    pairs: Sequence[Tuple[int, int]],
    X: FiniteSpace,
    Y: FiniteSpace,
    c: Fraction,
) -> Table:
    """
    f(x, y) = min_{(a, b) in pairs} d_X(x, a) + c + d_Y(b, y).

    Bi-Katetov once c >= dis(pairs) / 2; for a correspondence its q_error
    is exactly c.
    """
    if not pairs:
        raise EmptySubspace("A correspondence needs at least one pair")
    to_a = X.array()[:, [a for a, _ in pairs]]
    from_b = Y.array()[[b for _, b in pairs], :]
    total = to_a[:, :, None] + Fraction(c) + from_b[None, :, :]
    return as_table(total.min(axis=1))
