"""
Finite metric spaces for the back-and-forth and Gromov-Hausdorff tools.

A FiniteSpace is the metric part of a structure code with positive
distances off the diagonal. Predicates of an input structure are dropped.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple

import numpy as np

from structures.codes import StructureCode, validate_structure
from structures.io import load_structure
from structures.sampling import EMPTY_SIGNATURE

from .exceptions import DegenerateSpace


@dataclass(frozen=True)
class FiniteSpace:
    dist: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(Fraction(v) for v in row) for row in self.dist)
        object.__setattr__(self, 'dist', rows)
        validate_structure(self.as_structure()).raise_for_errors()
        for i in self.points:
            for j in self.points:
                if i != j and rows[i][j] == 0:
                    raise DegenerateSpace(f"Points {i} and {j} are at distance 0", i=i, j=j)

    @classmethod
    def from_structure(cls, code: StructureCode) -> 'FiniteSpace':
        return cls(code.dist)

    def as_structure(self) -> StructureCode:
        return StructureCode(EMPTY_SIGNATURE, len(self.dist), self.dist)

    @property
    def size(self) -> int:
        return len(self.dist)

    @property
    def points(self) -> range:
        return range(len(self.dist))

    def d(self, i: int, j: int) -> Fraction:
        return self.dist[i][j]

    @property
    def diameter(self) -> Fraction:
        return max(max(row) for row in self.dist)

    def array(self) -> np.ndarray:
        """Distances as a numpy object array of Fractions."""
        return np.array(self.dist, dtype=object).reshape(self.size, self.size)

    def rescaled(self, factor: Fraction) -> 'FiniteSpace':
        return FiniteSpace(tuple(tuple(factor * v for v in row) for row in self.dist))

    def subspace(self, indices: Sequence[int]) -> 'FiniteSpace':
        return FiniteSpace(tuple(tuple(self.dist[i][j] for j in indices) for i in indices))


def rescale_pair(X: FiniteSpace, Y: FiniteSpace) -> Tuple[FiniteSpace, FiniteSpace, Fraction]:
    """
    Scale both spaces by 1 / (floor(max diameter) + 1) so that both
    diameters drop below 1. Spaces already below 1 keep factor 1.
    """
    factor = Fraction(1, math.floor(max(X.diameter, Y.diameter)) + 1)
    if factor == 1:
        return X, Y, factor
    return X.rescaled(factor), Y.rescaled(factor), factor


def load_space(path) -> FiniteSpace:
    """The metric part of a structure code file."""
    return FiniteSpace.from_structure(load_structure(path))
