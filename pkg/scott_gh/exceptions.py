from typing import Tuple

from structures.exceptions import StructureViolation, WorkbenchError


class LengthMismatch(WorkbenchError):
    code = 'LENGTH_MISMATCH'


class MissingStage(WorkbenchError):
    """A rank value outside the stages or tuple lengths a table holds."""

    code = 'MISSING_STAGE'


class DegenerateSpace(StructureViolation):
    """Two distinct points at distance 0."""

    code = 'DEGENERATE_SPACE'


class RankInvariantViolation(WorkbenchError):
    code = 'RANK_INVARIANT_VIOLATION'


class KatetovViolation(WorkbenchError):
    code = 'KATETOV_VIOLATION'

    def __init__(self, kind: str, witness: Tuple[int, ...]):
        self.kind, self.witness = kind, witness
        super().__init__(f"KatetovViolation({kind}, {witness})", kind=kind, witness=witness)


class EmptySubspace(WorkbenchError):
    code = 'EMPTY_SUBSPACE'
