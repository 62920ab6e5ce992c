"""
S-expression grammar for formulas.

    (d x y)  (dhat x y)  (pred NAME x1 ... xk)  (const p/q)
    (add f g)  (sub f g)  (scale p/q f)  (min f g)  (max f g)  (abs f)
    (sup x f)  (inf x f)
    (join [bound=p/q x=p/q ...] [:lower-bound-only] f1 f2 ...)
    (meet [bound=p/q x=p/q ...] [:lower-bound-only] f1 f2 ...)

print_formula emits the canonical form: single spaces, rationals as
"p/q", declarations with ``bound`` first and variables sorted. Parsing the
printed text gives back an equal tree. ``bound`` is reserved and cannot
name a variable; a declaration names each key at most once.
"""

import re
from typing import Dict, List, Optional, Tuple

from structures.codes import Signature
from structures.exceptions import RationalFormatError
from structures.moduli import ModulusVector
from structures.rationals import format_rational, parse_rational

from .exceptions import ArityMismatch, FormulaSyntaxError, IllFormed, UnknownPredicate
from .nodes import (
    Abs, Add, Atom, Const, Dist, Formula, FormulaFamily, Inf, Join, Max, Meet,
    Min, Scale, Sub, Sup,
)

TOKEN = re.compile(r'[()\[\]]|[^\s()\[\]]+')
WHITESPACE = re.compile(r'\s*')
VARIABLE = re.compile(r'^[A-Za-z_][A-Za-z0-9_]*$')

LOWER_BOUND_ONLY = ':lower-bound-only'
BOUND_KEY = 'bound'

BINARY_OPERATORS = {'add': Add, 'sub': Sub, 'min': Min, 'max': Max}
QUANTIFIER_OPERATORS = {'sup': Sup, 'inf': Inf}
FAMILY_OPERATORS = {'join': Join, 'meet': Meet}


def tokenize(text: str) -> List[Tuple[str, int]]:
    """Split into (token, offset) pairs."""
    tokens = []
    position = WHITESPACE.match(text).end()
    while position < len(text):
        match = TOKEN.match(text, position)
        tokens.append((match.group(0), position))
        position = WHITESPACE.match(text, match.end()).end()
    return tokens


class FormulaParser:
    """Recursive-descent parser over the token list."""

    def __init__(self, text: str, signature: Optional[Signature] = None):
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0
        self.signature = signature

    # === Token helpers ===

    def peek(self) -> Optional[str]:
        if self.index < len(self.tokens):
            return self.tokens[self.index][0]
        return None

    def position(self) -> int:
        if self.index < len(self.tokens):
            return self.tokens[self.index][1]
        return len(self.text)

    def next(self) -> str:
        if self.index >= len(self.tokens):
            raise FormulaSyntaxError("Unexpected end of input", len(self.text))
        token = self.tokens[self.index][0]
        self.index += 1
        return token

    def expect(self, token: str) -> None:
        position = self.position()
        found = self.next()
        if found != token:
            raise FormulaSyntaxError(f"Expected {token!r}, found {found!r}", position)

    def variable(self) -> str:
        position = self.position()
        name = self.next()
        if not VARIABLE.match(name):
            raise FormulaSyntaxError(f"Expected a variable, found {name!r}", position)
        if name == BOUND_KEY:
            raise FormulaSyntaxError(f"{BOUND_KEY!r} is reserved for declarations", position)
        return name

    def rational(self):
        position = self.position()
        token = self.next()
        try:
            return parse_rational(token)
        except RationalFormatError:
            raise FormulaSyntaxError(f"Expected a rational, found {token!r}", position)

    # === Grammar ===

    def parse(self) -> Formula:
        formula = self.formula()
        if self.index != len(self.tokens):
            raise FormulaSyntaxError("Trailing input", self.position())
        return formula

    def formula(self) -> Formula:
        self.expect('(')
        position = self.position()
        head = self.next()

        if head in ('d', 'dhat'):
            node = Dist(self.variable(), self.variable(), truncated=(head == 'dhat'))
        elif head == 'pred':
            node = self.atom()
        elif head == 'const':
            node = Const(self.rational())
        elif head in BINARY_OPERATORS:
            node = BINARY_OPERATORS[head](self.formula(), self.formula())
        elif head == 'scale':
            factor_position = self.position()
            factor = self.rational()
            if factor < 0:
                raise FormulaSyntaxError("Scale factor must be nonnegative", factor_position)
            node = Scale(factor, self.formula())
        elif head == 'abs':
            node = Abs(self.formula())
        elif head in QUANTIFIER_OPERATORS:
            var = self.variable()
            node = QUANTIFIER_OPERATORS[head](var, self.formula())
        elif head in FAMILY_OPERATORS:
            node = FAMILY_OPERATORS[head](self.family())
        else:
            raise FormulaSyntaxError(f"Unknown operator {head!r}", position)

        self.expect(')')
        return node

    def atom(self) -> Atom:
        position = self.position()
        name = self.next()
        args = []
        while self.peek() not in (')', '(', None):
            args.append(self.variable())
        if self.signature is not None:
            symbol = self.signature.get(name)
            if symbol is None:
                raise UnknownPredicate(f"Unknown predicate {name!r}", name=name, position=position)
            if symbol.arity != len(args):
                raise ArityMismatch(
                    f"{name} takes {symbol.arity} arguments, got {len(args)}",
                    name=name, expected=symbol.arity, found=len(args),
                )
        if not args:
            raise FormulaSyntaxError(f"Predicate {name!r} needs arguments", self.position())
        return Atom(name, tuple(args))

    def declaration(self) -> ModulusVector:
        self.expect('[')
        constants: Dict[str, object] = {}
        bound = None
        seen = set()
        while self.peek() != ']':
            position = self.position()
            entry = self.next()
            key, sep, value = entry.partition('=')
            if not sep:
                raise FormulaSyntaxError(f"Expected name=p/q, found {entry!r}", position)
            try:
                number = parse_rational(value)
            except RationalFormatError:
                raise FormulaSyntaxError(f"Bad rational in {entry!r}", position)
            if number < 0:
                raise FormulaSyntaxError(f"Negative modulus in {entry!r}", position)
            if key in seen:
                raise FormulaSyntaxError(f"Duplicate declaration of {key!r}", position)
            seen.add(key)
            if key == BOUND_KEY:
                bound = number
            elif VARIABLE.match(key):
                constants[key] = number
            else:
                raise FormulaSyntaxError(f"Bad declaration entry {entry!r}", position)
        self.expect(']')
        if bound is None:
            raise FormulaSyntaxError("Declaration needs a bound", self.position())
        return ModulusVector(constants, bound)

    def family(self) -> FormulaFamily:
        declared = self.declaration()
        lower_bound_only = False
        if self.peek() == LOWER_BOUND_ONLY:
            self.next()
            lower_bound_only = True
        members = []
        while self.peek() == '(':
            members.append(self.formula())
        if not members:
            raise FormulaSyntaxError("A family needs at least one member", self.position())
        try:
            return FormulaFamily(tuple(members), declared, lower_bound_only)
        except IllFormed as e:
            raise FormulaSyntaxError(str(e), self.position())


def parse_formula(text: str, signature: Optional[Signature] = None) -> Formula:
    """
    Parse formula text.

    With a signature, predicate names and arities are checked
    (UnknownPredicate, ArityMismatch).
    """
    return FormulaParser(text, signature).parse()


# =============================================================================
# Printing
# =============================================================================

def _declaration_text(declared: ModulusVector) -> str:
    entries = [f"{BOUND_KEY}={format_rational(declared.value_bound)}"]
    entries += [f"{v}={format_rational(c)}" for v, c in sorted(declared.lipschitz.items())]
    return '[' + ' '.join(entries) + ']'


def _emit(f: Formula, out: List[str]) -> None:
    if isinstance(f, Dist):
        out.append(f"({'dhat' if f.truncated else 'd'} {f.left} {f.right})")
    elif isinstance(f, Atom):
        out.append(f"(pred {f.name} {' '.join(f.args)})")
    elif isinstance(f, Const):
        out.append(f"(const {format_rational(f.value)})")
    elif isinstance(f, Scale):
        out.append(f"(scale {format_rational(f.factor)} ")
        _emit(f.body, out)
        out.append(')')
    elif isinstance(f, Abs):
        out.append('(abs ')
        _emit(f.body, out)
        out.append(')')
    elif isinstance(f, (Sup, Inf)):
        out.append(f"({'sup' if isinstance(f, Sup) else 'inf'} {f.var} ")
        _emit(f.body, out)
        out.append(')')
    elif isinstance(f, (Join, Meet)):
        family = f.family
        out.append(f"({'join' if isinstance(f, Join) else 'meet'} {_declaration_text(family.declared)}")
        if family.lower_bound_only:
            out.append(' ' + LOWER_BOUND_ONLY)
        for member in family.members:
            out.append(' ')
            _emit(member, out)
        out.append(')')
    else:
        name = {Add: 'add', Sub: 'sub', Min: 'min', Max: 'max'}[type(f)]
        out.append(f"({name} ")
        _emit(f.left, out)
        out.append(' ')
        _emit(f.right, out)
        out.append(')')


def print_formula(f: Formula) -> str:
    """Canonical text of a formula."""
    out: List[str] = []
    _emit(f, out)
    return ''.join(out)
