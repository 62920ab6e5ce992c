from structures.exceptions import WorkbenchError


class InvalidBorelCode(WorkbenchError):
    code = 'INVALID_BOREL_CODE'


class InsufficientPrefix(WorkbenchError):
    code = 'INSUFFICIENT_PREFIX'
