from typing import Dict, Optional

from structures.exceptions import WorkbenchError


class FormulaError(WorkbenchError):
    code = 'FORMULA_ERROR'


class FormulaSyntaxError(FormulaError):
    """Parse failure at a character offset of the input text."""

    code = 'SYNTAX_ERROR'

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at position {position}", position=position)


class UnknownPredicate(FormulaError):
    code = 'UNKNOWN_PREDICATE'


class ArityMismatch(FormulaError):
    code = 'ARITY_MISMATCH'


class IllFormed(FormulaError):
    code = 'ILL_FORMED'


class UnboundVariable(IllFormed):
    code = 'UNBOUND_VARIABLE'


class ModulusExceedsDeclared(IllFormed):
    code = 'MODULUS_EXCEEDS_DECLARED'

    def __init__(self, index: int, message: str = ''):
        self.index = index
        super().__init__(message or f"ModulusExceedsDeclared({index})", index=index)


class LipschitzViolation(FormulaError):
    code = 'LIPSCHITZ_VIOLATION'

    def __init__(self, env: Dict[str, int], other: Dict[str, int], message: Optional[str] = None):
        self.env, self.other = env, other
        super().__init__(
            message or f"LipschitzViolation({env}, {other})",
            env=sorted(env.items()), other=sorted(other.items()),
        )
