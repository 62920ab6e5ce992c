"""
JSON reading and writing of structure codes.

File layout:

    {
      "signature": [{"name": "B", "arity": 1, "lipschitz": ["1/1"], "bound": "1/1"}],
      "size": 2,
      "dist": [["0/1", "1/2"], ["1/2", "0/1"]],
      "predicates": {"B": ["0/1", "1/2"]}
    }

Rationals are written as "p/q" strings; integers are accepted on input.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Tuple, Union

from .codes import (
    PredicateSymbol, Signature, StructureCode, class_indices, quotient_zero_distance, validate_structure,
)
from .exceptions import IndexOutOfRange, StructureFormatError, WorkbenchError
from .rationals import format_rational, parse_rational


def signature_from_list(data: Any) -> Signature:
    if not isinstance(data, list):
        raise StructureFormatError("'signature' must be a list")
    symbols = []
    for entry in data:
        try:
            symbols.append(PredicateSymbol(
                name=entry['name'],
                arity=int(entry['arity']),
                lipschitz=tuple(parse_rational(c) for c in entry['lipschitz']),
                bound=parse_rational(entry['bound']),
            ))
        except (KeyError, TypeError) as e:
            raise StructureFormatError(f"Bad signature entry {entry!r}: {e}")
    return Signature(tuple(symbols))


def structure_from_dict(data: Dict[str, Any]) -> StructureCode:
    """Build a StructureCode from decoded JSON; raises WorkbenchError subclasses."""
    if not isinstance(data, dict):
        raise StructureFormatError("A structure file must hold a JSON object")
    try:
        signature = signature_from_list(data.get('signature', []))
        size = data['size']
        if not isinstance(size, int) or isinstance(size, bool):
            raise StructureFormatError("'size' must be an integer")
        dist = [[parse_rational(v) for v in row] for row in data['dist']]
        tables = {
            name: [parse_rational(v) for v in values]
            for name, values in data.get('predicates', {}).items()
        }
    except KeyError as e:
        raise StructureFormatError(f"Missing field {e}")
    except TypeError as e:
        raise StructureFormatError(f"Malformed structure: {e}")
    return StructureCode(signature, size, dist, tables)


def structure_to_dict(code: StructureCode) -> Dict[str, Any]:
    return {
        'signature': [
            {
                'name': symbol.name,
                'arity': symbol.arity,
                'lipschitz': [format_rational(c) for c in symbol.lipschitz],
                'bound': format_rational(symbol.bound),
            }
            for symbol in code.signature.predicates
        ],
        'size': code.size,
        'dist': [[format_rational(v) for v in row] for row in code.dist],
        'predicates': {
            name: [format_rational(v) for v in table]
            for name, table in sorted(code.pred_tables.items())
        },
    }


def load_structure(path: Union[str, Path]) -> StructureCode:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except FileNotFoundError:
        raise StructureFormatError(f"File not found: {path}", path=str(path))
    except json.JSONDecodeError as e:
        raise StructureFormatError(f"Invalid JSON in {path}: {e}", path=str(path))
    try:
        return structure_from_dict(data)
    except WorkbenchError as e:
        e.witnesses.setdefault('path', str(path))
        raise


def dump_structure(code: StructureCode, path: Union[str, Path]) -> None:
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(structure_to_dict(code), f, indent=2)
        f.write('\n')


@dataclass(frozen=True)
class QuotientedStructure:
    """A validated structure file with its zero-distance classes merged."""
    code: StructureCode
    classes: Tuple[int, ...]

    def point(self, index: int) -> int:
        """The quotient point of the file's point ``index``."""
        if not 0 <= index < len(self.classes):
            raise IndexOutOfRange(f"Point {index} outside 0..{len(self.classes) - 1}", index=index)
        return self.classes[index]


def load_quotiented_structure(path: Union[str, Path]) -> QuotientedStructure:
    """
    Load a structure file, raise its first StructureViolation, and merge
    points at distance 0. File indices map to quotient points through
    ``point``.
    """
    code = load_structure(path)
    validate_structure(code).raise_for_errors()
    return QuotientedStructure(quotient_zero_distance(code), class_indices(code))
