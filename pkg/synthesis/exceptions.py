from fractions import Fraction

from structures.exceptions import WorkbenchError


class Mismatch(WorkbenchError):
    """Synthesized formula and oracle disagree."""

    code = 'MISMATCH'

    def __init__(self, lhs: Fraction, rhs: Fraction, **witnesses):
        self.lhs, self.rhs = lhs, rhs
        super().__init__(f"Mismatch({lhs}, {rhs})", lhs=lhs, rhs=rhs, **witnesses)
