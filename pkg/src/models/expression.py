"""
Expression trees for map predicates and map updates
"""
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, List, Optional, Tuple, Union

from src.models.base import Identifier


class BinaryOp(str, Enum):
    ADD = '+'
    SUB = '-'
    MUL = '*'
    DIV = '/'
    MOD = '%'
    LT = '<'
    LE = '<='
    GT = '>'
    GE = '>='
    EQ = '='
    AND = '&'
    OR = '|'


ARITHMETIC_OPS = frozenset({BinaryOp.ADD, BinaryOp.SUB, BinaryOp.MUL, BinaryOp.DIV, BinaryOp.MOD})
LOGICAL_OPS = frozenset({BinaryOp.AND, BinaryOp.OR})


class Side(str, Enum):
    LEFT = 'a'
    RIGHT = 'b'


@dataclass(frozen=True, slots=True)
class NatLiteral:
    value: int

    def __post_init__(self):
        if type(self.value) is not int or self.value < 0:
            raise ValueError(f"Natural literal expected, got {self.value!r}")


@dataclass(frozen=True, slots=True)
class BoolLiteral:
    value: bool


@dataclass(frozen=True, slots=True)
class FieldRef:
    side: Side
    key: Identifier


@dataclass(frozen=True, slots=True)
class Binary:
    op: BinaryOp
    lhs: 'Expr'
    rhs: 'Expr'


@dataclass(frozen=True, slots=True)
class Not:
    operand: 'Expr'


Expr = Union[NatLiteral, BoolLiteral, FieldRef, Binary, Not]

TRUE = BoolLiteral(True)


def walk(expr: Expr) -> Iterator[Expr]:
    """Pre-order traversal"""
    stack: List[Expr] = [expr]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Binary):
            stack.append(node.rhs)
            stack.append(node.lhs)
        elif isinstance(node, Not):
            stack.append(node.operand)


@dataclass(frozen=True, slots=True)
class ArithMode:
    """Infinite naturals, or arithmetic modulo ``bound``"""

    bound: Optional[int] = None

    def __post_init__(self):
        if self.bound is not None and (type(self.bound) is not int or self.bound < 1):
            raise ValueError(f"Bound must be a natural number >= 1, got {self.bound!r}")

    @classmethod
    def modulo(cls, k: int) -> 'ArithMode':
        return cls(k)

    @property
    def is_finite(self) -> bool:
        return self.bound is not None

    def __repr__(self) -> str:
        return f"Modulo({self.bound})" if self.is_finite else 'Infinite'


INFINITE = ArithMode()


@dataclass(frozen=True, slots=True)
class MapPredicate:
    body: Expr = TRUE


@dataclass(frozen=True, slots=True)
class MapUpdate:
    assignments: Tuple[Tuple[Identifier, Expr], ...] = ()

    def keys(self) -> List[Identifier]:
        return [key for key, _ in self.assignments]

    def duplicate_keys(self) -> List[Identifier]:
        seen, duplicates = set(), []
        for key in self.keys():
            if key in seen and key not in duplicates:
                duplicates.append(key)
            seen.add(key)
        return duplicates


ALWAYS = MapPredicate()
EMPTY_UPDATE = MapUpdate()
