"""
Lowering of Borel codes to formulas.

ARCHITECTURE OVERVIEW
=====================
synthesize(code, k) returns a formula phi(x0, ..., x{k-1}) whose value at
u equals the Vaught transform A^{*k}(p, u) of the coded function A. The
lowering follows the structure of the code:

    Basic(theta, N)   sup_{z_0..z_{N-1}} theta(z) - k * dhat(x, z)
    SupFamily(A_n)    join of the lowerings of the A_n, declared modulus k
    Neg(B)            join over m of
                      sup_{z_0..z_{m-1}} -k * dhat(x, z) - phi_{B,m}(z)

where dhat(x, z) is the max of dhat(x_i, z_i) over the common prefix.
In the negation case most z_j occur neither in the penalty nor in
phi_{B,m}; they are still quantified and the interpreter skips them.

The join of the negation case is infinite. It is emitted as a prefix:

- with a structure p, cut at truncation_bound(p, ...) and marked exact;
  past that index the join no longer grows on p;
- without one, cut at ``prefix`` (settings NEG_PREFIX) and marked
  lower-bound-only.

Terms carrying a distance penalty are clamped below by -M_A, where M_A
bounds the code. The clamp never changes the value of the whole formula
(the penalty-free choice z = x, or the m = 0 member, is already >= -M_A)
and makes the inferred value bound exactly M_A.

Bound variables are named z{level}_{i}; every negation opens a new level,
so no quantifier rebinds a variable in scope.

USAGE
=====
    from synthesis.lowering import synthesize, synthesize_sentence

    phi = synthesize(code, 2)                  # uncertified prefixes
    phi = synthesize(code, 2, structure=p)     # exact on p
    sentence = synthesize_sentence(diameter_code())
"""

import logging
from fractions import Fraction
from typing import List, Optional, Sequence

from formulas.analysis import substitute
from formulas.nodes import (
    Const, Dist, Formula, FormulaFamily, Join, Max, Scale, Sub, max_chain, sup_over,
)
from structures.codes import Signature, StructureCode
from structures.conf import workbench_setting
from structures.moduli import ModulusVector
from structures.rationals import ceil_fraction
from vaught.codes import Basic, BorelCode, Neg, SupFamily, leaf_variable

logger = logging.getLogger(__name__)


def input_variables(k: int) -> List[str]:
    return [f"x{i}" for i in range(k)]


def bound_variable(level: int, i: int) -> str:
    return f"z{level}_{i}"


def truncation_bound(p: StructureCode, k: int, bound: Fraction, support: int = 0) -> int:
    """
    Prefix length m* for a negation join on p.

    m* = N + ceil((2 M + k + 1) / delta_min), and at least support + 1;
    codes with fewer than two points get 1.
    """
    delta = p.min_positive_truncated_distance()
    if p.size < 2 or delta is None:
        return 1
    m_star = p.size + ceil_fraction((2 * Fraction(bound) + k + 1) / delta)
    m_star = max(m_star, support + 1)
    logger.debug("Truncation bound: N=%d k=%d M=%s delta=%s -> %d", p.size, k, bound, delta, m_star)
    return m_star


class Lowering:
    """
    One lowering run.

    ``outer_prefix`` overrides the prefix length of a negation at the root
    only; the stabilization checks use it to vary one join at a time.
    """

    def __init__(
        self,
        signature: Optional[Signature] = None,
        structure: Optional[StructureCode] = None,
        prefix: Optional[int] = None,
        outer_prefix: Optional[int] = None,
    ):
        self.structure = structure
        self.signature = structure.signature if structure is not None else signature
        self.prefix = workbench_setting('NEG_PREFIX', prefix)
        if self.prefix < 1:
            raise ValueError("Negation prefixes need at least one member")
        self.outer_prefix = outer_prefix

    def bound(self, code: BorelCode) -> Fraction:
        return code.bound(self.signature)

    def lower(self, code: BorelCode, names: Sequence[str], level: int = 0) -> Formula:
        if isinstance(code, Basic):
            return self._basic(code, names, level)
        if isinstance(code, SupFamily):
            return self._sup_family(code, names, level)
        if isinstance(code, Neg):
            return self._negation(code, names, level)
        raise TypeError(f"Not a Borel code: {code!r}")

    def _penalty(self, names: Sequence[str], zs: Sequence[str]) -> Optional[Formula]:
        """k * dhat(x, z) over the common prefix, or None when it vanishes."""
        k = len(names)
        common = min(k, len(zs))
        if common == 0:
            return None
        return Scale(k, max_chain([Dist(names[i], zs[i]) for i in range(common)]))

    def _basic(self, code: Basic, names: Sequence[str], level: int) -> Formula:
        zs = [bound_variable(level, i) for i in range(code.support)]
        theta = substitute(code.theta, {leaf_variable(i): z for i, z in enumerate(zs)})
        penalty = self._penalty(names, zs)
        if penalty is None:
            return sup_over(zs, theta)
        clamp = Const(-self.bound(code))
        return Max(clamp, sup_over(zs, Sub(theta, penalty)))

    def _declared(self, names: Sequence[str], bound: Fraction) -> ModulusVector:
        k = len(names)
        return ModulusVector({name: k for name in names}, bound)

    def _sup_family(self, code: SupFamily, names: Sequence[str], level: int) -> Formula:
        members = tuple(self.lower(m, names, level) for m in code.members)
        return Join(FormulaFamily(members, self._declared(names, self.bound(code))))

    def _negation(self, code: Neg, names: Sequence[str], level: int) -> Formula:
        k = len(names)
        bound = self.bound(code)
        length, certified = self._prefix_length(code, k, bound, level)

        members = []
        for m in range(length):
            zs = [bound_variable(level, j) for j in range(m)]
            inner = self.lower(code.inner, zs, level + 1)
            penalty = self._penalty(names, zs)
            if penalty is None:
                members.append(sup_over(zs, Sub(Const(0), inner)))
            else:
                body = Sub(Sub(Const(0), penalty), inner)
                members.append(Max(Const(-bound), sup_over(zs, body)))
        family = FormulaFamily(tuple(members), self._declared(names, bound), not certified)
        return Join(family)

    def _prefix_length(self, code: Neg, k: int, bound: Fraction, level: int):
        certified_length = None
        if self.structure is not None:
            certified_length = truncation_bound(self.structure, k, bound, code.inner.support)
        if level == 0 and self.outer_prefix is not None:
            length = self.outer_prefix
            return length, certified_length is not None and length >= certified_length
        if certified_length is not None:
            return certified_length, True
        return self.prefix, False


def synthesize(
    code: BorelCode,
    k: int,
    signature: Optional[Signature] = None,
    structure: Optional[StructureCode] = None,
    prefix: Optional[int] = None,
    outer_prefix: Optional[int] = None,
) -> Formula:
    """Formula phi_{A,k} with free variables among x0..x{k-1}."""
    lowering = Lowering(signature, structure, prefix, outer_prefix)
    return lowering.lower(code, input_variables(k))


def synthesize_sentence(
    code: BorelCode,
    signature: Optional[Signature] = None,
    structure: Optional[StructureCode] = None,
    prefix: Optional[int] = None,
) -> Formula:
    """The sentence phi_{A,0}; for invariant codes its value on p is A(p)."""
    return synthesize(code, 0, signature, structure, prefix)
