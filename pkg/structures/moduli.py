"""
Moduli of continuity.

Moduli are restricted to per-variable Lipschitz constants with respect to
the truncated metric min(d, 1), plus a bound on absolute values.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Mapping


@dataclass(frozen=True)
class ModulusVector:
    """Per-variable Lipschitz constants and a value bound."""
    lipschitz: Mapping[str, Fraction] = field(default_factory=dict)
    value_bound: Fraction = Fraction(0)

    def __post_init__(self):
        constants = {v: Fraction(c) for v, c in self.lipschitz.items()}
        if any(c < 0 for c in constants.values()) or self.value_bound < 0:
            raise ValueError("Moduli must be nonnegative")
        object.__setattr__(self, 'lipschitz', constants)
        object.__setattr__(self, 'value_bound', Fraction(self.value_bound))

    @classmethod
    def uniform(cls, variables: Iterable[str], constant, bound) -> 'ModulusVector':
        """Same constant for every listed variable."""
        return cls({v: Fraction(constant) for v in variables}, Fraction(bound))

    def constant(self, variable: str) -> Fraction:
        return self.lipschitz.get(variable, Fraction(0))

    @property
    def variables(self):
        return frozenset(self.lipschitz)

    def dominated_by(self, other: 'ModulusVector') -> bool:
        """True if every constant and the bound are <= those of other."""
        if self.value_bound > other.value_bound:
            return False
        return all(c <= other.constant(v) for v, c in self.lipschitz.items())

    def __eq__(self, other):
        if not isinstance(other, ModulusVector):
            return NotImplemented
        return (dict(self.lipschitz) == dict(other.lipschitz)
                and self.value_bound == other.value_bound)

    def __hash__(self):
        return hash((tuple(sorted(self.lipschitz.items())), self.value_bound))

    def to_dict(self) -> Dict[str, str]:
        from .rationals import format_rational
        data = {v: format_rational(c) for v, c in sorted(self.lipschitz.items())}
        data['bound'] = format_rational(self.value_bound)
        return data
