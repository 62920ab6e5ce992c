"""
Checks of synthesized formulas against the Vaught oracle.

verify_against_oracle compares one instance; verify_sweep runs every
(code, structure, k, u) combination of a corpus and returns a
machine-readable report, in the manner of a validation report.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from formulas.interpreter import Exactness, Interpreter
from formulas.nodes import Formula
from structures.codes import StructureCode
from structures.rationals import format_rational
from vaught.codes import BorelCode, Neg
from vaught.oracle import VaughtOracle

from .exceptions import Mismatch
from .lowering import input_variables, synthesize, truncation_bound

logger = logging.getLogger(__name__)


@dataclass
class VerificationResult:
    k: int
    u: Tuple[int, ...]
    lhs: Fraction
    rhs: Fraction
    exactness: Exactness
    code_index: Optional[int] = None
    structure_index: Optional[int] = None

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs

    def to_dict(self) -> dict:
        return {
            'code': self.code_index,
            'structure': self.structure_index,
            'k': self.k,
            'u': list(self.u),
            'formula_value': format_rational(self.lhs),
            'oracle_value': format_rational(self.rhs),
            'exactness': self.exactness.value,
            'verdict': 'equal' if self.equal else 'mismatch',
        }


def _environment(u: Sequence[int]) -> Dict[str, int]:
    return dict(zip(input_variables(len(u)), u))


def verify_against_oracle(
    code: BorelCode,
    p: StructureCode,
    k: int,
    u: Sequence[int],
    formula: Optional[Formula] = None,
    oracle: Optional[VaughtOracle] = None,
    interpreter: Optional[Interpreter] = None,
    strict: bool = True,
) -> VerificationResult:
    """
    Compare phi_{A,k}(u) on p with A^{*k}(p, u).

    ``formula`` defaults to the lowering certified on p. With ``strict``,
    disagreement raises Mismatch.
    """
    u = tuple(u)
    formula = formula if formula is not None else synthesize(code, k, structure=p)
    oracle = oracle or VaughtOracle(code, p)
    interpreter = interpreter or Interpreter(p)
    evaluation = interpreter.evaluate(formula, _environment(u))
    result = VerificationResult(k, u, evaluation.value, oracle.a_star(k, u), evaluation.exactness)
    if strict and not result.equal:
        raise Mismatch(result.lhs, result.rhs, k=k, u=u)
    return result


@dataclass
class SweepReport:
    results: List[VerificationResult] = field(default_factory=list)

    @property
    def total(self) -> int:
        return len(self.results)

    @property
    def equal(self) -> int:
        return sum(1 for r in self.results if r.equal)

    @property
    def valid(self) -> bool:
        return self.equal == self.total

    def mismatches(self) -> List[VerificationResult]:
        return [r for r in self.results if not r.equal]

    def summary(self) -> str:
        return f"{self.equal}/{self.total} equal"

    def to_dict(self) -> dict:
        return {
            'total': self.total,
            'equal': self.equal,
            'instances': [r.to_dict() for r in self.results],
        }


def verify_sweep(
    codes: Sequence[BorelCode],
    structures: Sequence[StructureCode],
    ks: Sequence[int] = (0, 1, 2),
    all_u: bool = True,
    tuple_budget: Optional[int] = None,
) -> SweepReport:
    """
    Verify every code on every structure for every k, over all u of length
    k (or only the constant-0 tuple when ``all_u`` is False).
    """
    report = SweepReport()
    for ci, code in enumerate(codes):
        for si, p in enumerate(structures):
            oracle = VaughtOracle(code, p, tuple_budget=tuple_budget)
            for k in ks:
                formula = synthesize(code, k, structure=p)
                interpreter = Interpreter(p)
                us = itertools.product(p.points, repeat=k) if all_u else [(0,) * k]
                for u in us:
                    result = verify_against_oracle(
                        code, p, k, u, formula, oracle, interpreter, strict=False,
                    )
                    result.code_index, result.structure_index = ci, si
                    report.results.append(result)
    logger.debug("Verification sweep: %s", report.summary())
    return report


def join_prefix_values(
    code: Neg,
    k: int,
    p: StructureCode,
    u: Sequence[int],
    lengths: Sequence[int],
) -> List[Fraction]:
    """
    Values of phi_{A,k}(u) on p with the root negation join cut at each of
    ``lengths``; nested joins stay certified.
    """
    interpreter = Interpreter(p)
    env = _environment(u)
    values = []
    for length in lengths:
        formula = synthesize(code, k, structure=p, outer_prefix=length)
        values.append(interpreter.value(formula, env))
    return values


def join_prefix_sweep(
    code: Neg,
    k: int,
    p: StructureCode,
    lengths: Sequence[int],
) -> Dict[Tuple[int, ...], List[Fraction]]:
    """join_prefix_values for every u of length k, sharing formulas and memos."""
    interpreter = Interpreter(p)
    formulas = [synthesize(code, k, structure=p, outer_prefix=length) for length in lengths]
    return {
        u: [interpreter.value(formula, _environment(u)) for formula in formulas]
        for u in itertools.product(p.points, repeat=k)
    }


def root_truncation_bound(code: Neg, k: int, p: StructureCode) -> int:
    """m* for the root negation of ``code`` on p."""
    return truncation_bound(p, k, code.bound(p.signature), code.inner.support)
