"""
Exhaustive Lipschitz audit of a formula on one structure.

A failed audit means the interpreter and modulus inference disagree; it is
a bug signal, not a user error.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

from structures.codes import StructureCode
from structures.conf import workbench_setting
from structures.exceptions import BudgetExceeded
from structures.moduli import ModulusVector

from .analysis import free_variables, infer_modulus
from .exceptions import IllFormed, LipschitzViolation
from .interpreter import Exactness, Interpreter, exactness_of
from .nodes import Formula

logger = logging.getLogger(__name__)


@dataclass
class LipschitzAuditReport:
    valid: bool
    modulus: ModulusVector
    checked_pairs: int = 0
    errors: List[LipschitzViolation] = field(default_factory=list)

    def raise_for_errors(self) -> None:
        if self.errors:
            raise self.errors[0]

    def to_dict(self) -> dict:
        return {
            'valid': self.valid,
            'modulus': self.modulus.to_dict(),
            'checked_pairs': self.checked_pairs,
            'errors': [e.to_dict() for e in self.errors],
        }


def lipschitz_audit(
    f: Formula,
    p: StructureCode,
    max_free_variables: Optional[int] = None,
    max_points: Optional[int] = None,
) -> LipschitzAuditReport:
    """
    Check |f(e) - f(e')| <= sum_v L_v * dhat(e(v), e'(v)) for all
    environment pairs, and |f(e)| <= value bound for every environment.

    Raw distances are inferred with the structure's diameter as bound.
    """
    max_free_variables = workbench_setting('AUDIT_MAX_FREE_VARIABLES', max_free_variables)
    max_points = workbench_setting('AUDIT_MAX_POINTS', max_points)

    if exactness_of(f) != Exactness.EXACT:
        raise IllFormed("Lipschitz audits need formulas with exact families")
    modulus = infer_modulus(f, p.signature, p.diameter)
    variables = sorted(free_variables(f))
    if len(variables) > max_free_variables or p.size > max_points:
        raise BudgetExceeded(
            f"Audit limited to {max_free_variables} free variables on {max_points} points",
            free_variables=len(variables), points=p.size,
        )

    interpreter = Interpreter(p)
    envs = list(itertools.product(p.points, repeat=len(variables)))
    values: Dict[tuple, Fraction] = {
        e: interpreter.value(f, dict(zip(variables, e))) for e in envs
    }
    constants = [modulus.constant(v) for v in variables]

    for e, value in values.items():
        if abs(value) > modulus.value_bound:
            env = dict(zip(variables, e))
            return LipschitzAuditReport(False, modulus, 0, [
                LipschitzViolation(env, env, f"|{value}| exceeds value bound {modulus.value_bound}")
            ])

    checked = 0
    for e, e2 in itertools.combinations(envs, 2):
        checked += 1
        allowed = sum(c * p.dhat(i, j) for c, i, j in zip(constants, e, e2))
        if abs(values[e] - values[e2]) > allowed:
            violation = LipschitzViolation(dict(zip(variables, e)), dict(zip(variables, e2)))
            logger.debug("Lipschitz audit failed: %s", violation)
            return LipschitzAuditReport(False, modulus, checked, [violation])
    return LipschitzAuditReport(True, modulus, checked)
