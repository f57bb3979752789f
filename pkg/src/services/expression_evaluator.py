"""
Evaluation of map predicates and map updates.

Abnormal cases (absent keys, type mismatches, zero divisors) are soft
failures: ``evaluate`` returns ``None`` instead of raising, predicates read
it as unsatisfied and updates propagate it.
"""
from typing import Dict, Optional

from src.models.base import Value, ValueMap
from src.models.expression import (
    ARITHMETIC_OPS,
    INFINITE,
    LOGICAL_OPS,
    ArithMode,
    Binary,
    BinaryOp,
    BoolLiteral,
    Expr,
    FieldRef,
    MapPredicate,
    MapUpdate,
    NatLiteral,
    Not,
    Side,
)


def evaluate(expr: Expr, m1: ValueMap, m2: ValueMap, mode: ArithMode = INFINITE) -> Optional[Value]:
    return _eval(expr, m1, m2, mode.bound)


def apply_predicate(phi: MapPredicate, m1: ValueMap, m2: ValueMap, mode: ArithMode = INFINITE) -> bool:
    return _eval(phi.body, m1, m2, mode.bound) is True


def apply_update(psi: MapUpdate, m1: ValueMap, m2: ValueMap, mode: ArithMode = INFINITE) -> Optional[ValueMap]:
    values: Dict[str, Value] = {}
    for key, rhs in psi.assignments:
        value = _eval(rhs, m1, m2, mode.bound)
        if value is None:
            return None
        values[key] = value
    return ValueMap.of(values)


def _eval(expr: Expr, m1: ValueMap, m2: ValueMap, k: Optional[int]) -> Optional[Value]:
    if isinstance(expr, NatLiteral):
        return expr.value % k if k is not None else expr.value
    if isinstance(expr, BoolLiteral):
        return expr.value
    if isinstance(expr, FieldRef):
        value = (m1 if expr.side is Side.LEFT else m2).get(expr.key)
        if k is not None and type(value) is int:
            return value % k
        return value
    if isinstance(expr, Not):
        operand = _eval(expr.operand, m1, m2, k)
        return (not operand) if type(operand) is bool else None
    if isinstance(expr, Binary):
        lhs = _eval(expr.lhs, m1, m2, k)
        if lhs is None:
            return None
        rhs = _eval(expr.rhs, m1, m2, k)
        if rhs is None:
            return None
        return _binary(expr.op, lhs, rhs, k)
    raise TypeError(f"Unknown expression node: {expr!r}")


def _binary(op: BinaryOp, lhs: Value, rhs: Value, k: Optional[int]) -> Optional[Value]:
    lhs_bool, rhs_bool = type(lhs) is bool, type(rhs) is bool

    if op in LOGICAL_OPS:
        if not (lhs_bool and rhs_bool):
            return None
        return (lhs and rhs) if op is BinaryOp.AND else (lhs or rhs)

    if op is BinaryOp.EQ:
        return lhs == rhs if lhs_bool == rhs_bool else None

    # everything below is defined on naturals only
    if lhs_bool or rhs_bool:
        return None

    if op in ARITHMETIC_OPS:
        return _arithmetic(op, lhs, rhs, k)
    if op is BinaryOp.LT:
        return lhs < rhs
    if op is BinaryOp.LE:
        return lhs <= rhs
    if op is BinaryOp.GT:
        return lhs > rhs
    if op is BinaryOp.GE:
        return lhs >= rhs
    raise TypeError(f"Unknown operator: {op!r}")


def _arithmetic(op: BinaryOp, a: int, b: int, k: Optional[int]) -> Optional[int]:
    if op is BinaryOp.ADD:
        result = a + b
    elif op is BinaryOp.SUB:
        if k is not None:
            result = a + k - (b % k)
        else:
            result = a - b if a > b else 0
    elif op is BinaryOp.MUL:
        result = a * b
    elif op is BinaryOp.DIV:
        if b == 0:
            return None
        result = a // b
    else:
        if b == 0:
            return None
        result = a % b
    return result % k if k is not None else result
