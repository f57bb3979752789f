"""
Brute-force reference implementations used only by the test suite.

Everything here is written directly from the definitions with plain loops
over plain dicts and tuples, sharing no code with src/services.
"""
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from src.models.base import ValueMap
from src.models.expression import Binary, BoolLiteral, FieldRef, NatLiteral, Not
from src.models.interval import Interval
from src.models.rule import ExclusiveRule, InclusiveRule, Spec

NaiveInterval = Tuple[str, int, int, Tuple]


def naive_eval(expr, m1: Dict, m2: Dict, k: Optional[int]):
    """Returns the value, or None on any abnormal case"""
    if isinstance(expr, NatLiteral):
        return expr.value if k is None else expr.value % k
    if isinstance(expr, BoolLiteral):
        return expr.value
    if isinstance(expr, FieldRef):
        source = m1 if expr.side.value == 'a' else m2
        if expr.key not in source:
            return None
        value = source[expr.key]
        if k is not None and not isinstance(value, bool):
            value = value % k
        return value
    if isinstance(expr, Not):
        inner = naive_eval(expr.operand, m1, m2, k)
        if isinstance(inner, bool):
            return not inner
        return None

    assert isinstance(expr, Binary)
    x = naive_eval(expr.lhs, m1, m2, k)
    y = naive_eval(expr.rhs, m1, m2, k)
    if x is None or y is None:
        return None
    op = expr.op.value
    both_bool = isinstance(x, bool) and isinstance(y, bool)
    both_nat = not isinstance(x, bool) and not isinstance(y, bool)

    if op in ('&', '|'):
        if not both_bool:
            return None
        return (x and y) if op == '&' else (x or y)
    if op == '=':
        if both_bool or both_nat:
            return x == y
        return None
    if not both_nat:
        return None
    if op == '<':
        return x < y
    if op == '<=':
        return x <= y
    if op == '>':
        return x > y
    if op == '>=':
        return x >= y

    if op == '+':
        result = x + y
    elif op == '-':
        if k is None:
            result = max(0, x - y)
        else:
            result = (x - y) % k
    elif op == '*':
        result = x * y
    elif op == '/':
        if y == 0:
            return None
        result = x // y
    else:
        if y == 0:
            return None
        result = x % y
    return result if k is None else result % k


def allen_window(op: str, i1: Interval, i2: Interval) -> Optional[Tuple[int, int]]:
    """Enumerates the time points covered instead of comparing endpoints"""
    s1, e1, s2, e2 = i1.start, i1.end, i2.start, i2.end
    points1, points2 = set(range(s1, e1 + 1)), set(range(s2, e2 + 1))
    interior_overlap = s1 < e2 and s2 < e1
    if op == 'before':
        return (s1, e2) if max(points1) < min(points2) else None
    if op == 'meet':
        return (s1, e2) if max(points1) == min(points2) else None
    if op == 'during':
        return (s2, e2) if points1 <= points2 else None
    if op == 'coincide':
        return (s1, e1) if (s1, e1) == (s2, e2) else None
    if op == 'start':
        return (s1, max(points1 | points2)) if min(points1) == min(points2) else None
    if op == 'finish':
        return (min(points1 | points2), e1) if max(points1) == max(points2) else None
    if op == 'overlap':
        return (min(points1 | points2), max(points1 | points2)) if interior_overlap else None
    if op == 'slice':
        common = points1 & points2
        return (min(common), max(common)) if interior_overlap else None
    raise ValueError(op)


def allen_excludes(op: str, i1: Interval, i2: Interval) -> bool:
    if op == 'after':
        return i1.start > i2.end
    if op == 'follow':
        return i1.start == i2.end
    if op == 'contain':
        return set(range(i2.start, i2.end + 1)) <= set(range(i1.start, i1.end + 1))
    raise ValueError(op)


def _update(rule, m1: Dict, m2: Dict, k: Optional[int]) -> Optional[Dict]:
    data = {}
    for key, rhs in rule.psi.assignments:
        value = naive_eval(rhs, m1, m2, k)
        if value is None:
            return None
        data[key] = value
    return data


def naive_apply(rule, pool: FrozenSet[Interval], k: Optional[int]) -> Set[Interval]:
    produced = set()
    if isinstance(rule, InclusiveRule):
        for i1 in pool:
            for i2 in pool:
                if i1.name != rule.id1 or i2.name != rule.id2:
                    continue
                window = allen_window(rule.op.value, i1, i2)
                if window is None:
                    continue
                m1, m2 = i1.map.to_dict(), i2.map.to_dict()
                if naive_eval(rule.phi.body, m1, m2, k) is not True:
                    continue
                data = _update(rule, m1, m2, k)
                if data is not None:
                    produced.add(Interval(rule.lhs, window[0], window[1], ValueMap.of(data)))
        return produced

    for i1 in pool:
        if i1.name != rule.id1:
            continue
        m1 = i1.map.to_dict()
        blocked = False
        for i2 in pool:
            if i2.name == rule.id2 and allen_excludes(rule.op.value, i1, i2) \
                    and naive_eval(rule.phi.body, m1, i2.map.to_dict(), k) is True:
                blocked = True
        if blocked:
            continue
        data = _update(rule, m1, {}, k)
        if data is not None:
            produced.add(Interval(rule.lhs, i1.start, i1.end, ValueMap.of(data)))
    return produced


def map_less(a: ValueMap, b: ValueMap) -> bool:
    """Pairwise key, then Bool < Nat, false < true, naturals by size; prefix is smaller"""
    def rank(value):
        return (0, int(value)) if isinstance(value, bool) else (1, value)

    left, right = list(a.items()), list(b.items())
    for (k1, v1), (k2, v2) in zip(left, right):
        if k1 != k2:
            return k1 < k2
        if rank(v1) != rank(v2):
            return rank(v1) < rank(v2)
    return len(left) < len(right)


def naive_minimality(new_pool: Set[Interval], pool: Set[Interval]) -> Set[Interval]:
    kept = set()
    for i in new_pool:
        clause1 = not any(
            j.name == i.name and i.start <= j.start and j.end <= i.end for j in pool
        )
        clause2 = not any(
            j.name == i.name and (
                (i.start <= j.start and j.end < i.end) or (i.start < j.start and j.end <= i.end)
            )
            for j in new_pool
        )
        clause3 = not any(
            j.name == i.name and (j.start, j.end) == (i.start, i.end) and map_less(j.map, i.map)
            for j in new_pool
        )
        if clause1 and clause2 and clause3:
            kept.add(i)
    return kept


def least_topological_order(spec: Spec) -> Optional[List[int]]:
    """Repeatedly take the smallest rule none of whose producers is still pending"""
    pending = list(range(len(spec)))
    order = []
    while pending:
        for candidate in pending:
            needs = spec[candidate]
            blocked = any(
                spec[other].lhs in (needs.id1, needs.id2) for other in pending
            )
            if not blocked:
                order.append(candidate)
                pending.remove(candidate)
                break
        else:
            return None
    return order


def _fold(spec: Spec, order: List[int], pool: Set[Interval], k: Optional[int], minimal: bool) -> Set[Interval]:
    pool = set(pool)
    for index in order:
        produced = naive_apply(spec[index], frozenset(pool), k)
        if minimal:
            produced = naive_minimality(produced, pool)
        pool |= produced
    return pool


def naive_initial(trace, k: Optional[int]) -> Set[Interval]:
    pool = set()
    for event in trace:
        data = event.map.to_dict()
        if k is not None:
            data = {key: value if isinstance(value, bool) else value % k for key, value in data.items()}
        pool.add(Interval(event.name, event.time, event.time, ValueMap.of(data)))
    return pool


def naive_saturate(spec: Spec, trace, k: Optional[int] = None, minimal: bool = False,
                   max_rounds: int = 10_000) -> Set[Interval]:
    """Single topologically ordered pass when possible, otherwise repeat until stable"""
    pool = naive_initial(trace, k)
    order = least_topological_order(spec)
    if order is not None:
        return _fold(spec, order, pool, k, minimal)

    for _ in range(max_rounds):
        following = _fold(spec, list(range(len(spec))), pool, k, minimal)
        if following == pool:
            return pool
        pool = following
    raise RuntimeError("no fixed point within the round limit")


def naive_iterate(spec: Spec, trace, k: Optional[int] = None, rounds: int = 100) -> Set[Interval]:
    """Repeat the fold in spec order until stable, ignoring the rule graph"""
    pool = naive_initial(trace, k)
    for _ in range(rounds):
        following = _fold(spec, list(range(len(spec))), pool, k, False)
        if following == pool:
            return pool
        pool = following
    raise RuntimeError("no fixed point within the round limit")
