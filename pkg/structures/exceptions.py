"""
Error types shared by every workbench app.

Each error carries a stable machine-readable ``code`` plus the witnesses
that explain it, so the management commands can report failures as JSON.
"""

from typing import Any, Dict, Tuple


class WorkbenchError(Exception):
    """Root of all workbench errors."""

    code = 'WORKBENCH_ERROR'

    def __init__(self, message: str = '', **witnesses: Any):
        self.witnesses = witnesses
        super().__init__(message or self.default_message())

    def default_message(self) -> str:
        if not self.witnesses:
            return self.code
        parts = ', '.join(f"{k}={v!r}" for k, v in self.witnesses.items())
        return f"{self.code}({parts})"

    def to_dict(self) -> Dict[str, Any]:
        return {
            'code': self.code,
            'message': str(self),
            'witnesses': {k: _jsonable(v) for k, v in self.witnesses.items()},
        }


def _jsonable(value: Any) -> Any:
    # Fractions and tuples show up as witnesses; JSON wants str/list.
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (int, str, bool)) or value is None:
        return value
    return str(value)


# === Input format ===

class StructureFormatError(WorkbenchError):
    code = 'STRUCTURE_FORMAT'


class RationalFormatError(WorkbenchError):
    code = 'RATIONAL_FORMAT'


class IndexOutOfRange(WorkbenchError):
    code = 'INDEX_OUT_OF_RANGE'


class BudgetExceeded(WorkbenchError):
    code = 'BUDGET_EXCEEDED'


# === Structure validation ===

class StructureViolation(WorkbenchError):
    """A structure code breaks one of its invariants."""

    code = 'STRUCTURE_VIOLATION'


class DimensionMismatch(StructureViolation):
    code = 'DIMENSION_MISMATCH'


class NegativeDistance(StructureViolation):
    code = 'NEGATIVE_DISTANCE'


class NonzeroDiagonal(StructureViolation):
    code = 'NONZERO_DIAGONAL'


class AsymmetricDistance(StructureViolation):
    code = 'ASYMMETRIC_DISTANCE'

    def __init__(self, i: int, j: int):
        self.i, self.j = i, j
        super().__init__(f"AsymmetricDistance({i}, {j})", i=i, j=j)


class TriangleViolation(StructureViolation):
    code = 'TRIANGLE_VIOLATION'

    def __init__(self, i: int, j: int, k: int):
        self.i, self.j, self.k = i, j, k
        super().__init__(f"TriangleViolation({i}, {j}, {k})", i=i, j=j, k=k)


class ModulusViolation(StructureViolation):
    code = 'MODULUS_VIOLATION'

    def __init__(self, predicate: str, u: Tuple[int, ...], v: Tuple[int, ...]):
        self.predicate, self.u, self.v = predicate, u, v
        super().__init__(
            f"ModulusViolation({predicate}, {u}, {v})",
            predicate=predicate, u=u, v=v,
        )


class BoundViolation(StructureViolation):
    code = 'BOUND_VIOLATION'

    def __init__(self, predicate: str, u: Tuple[int, ...]):
        self.predicate, self.u = predicate, u
        super().__init__(f"BoundViolation({predicate}, {u})", predicate=predicate, u=u)


class InconsistentPredicateOnClass(StructureViolation):
    code = 'INCONSISTENT_PREDICATE_ON_CLASS'


class SignatureError(StructureViolation):
    code = 'SIGNATURE_ERROR'
