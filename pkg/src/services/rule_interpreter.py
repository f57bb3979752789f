"""
Clock predicates, single-rule semantics and the minimality selection.

``apply_inclusive``/``apply_exclusive`` return only the intervals a rule can
produce from a pool; the union with the pool is the engine's business.
The ``derive_*`` generators expose the same productions together with
their parents so the engine can record provenance.
"""
import logging
from bisect import bisect_left, bisect_right
from collections import defaultdict
from itertools import accumulate
from typing import AbstractSet, Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from src.models.base import EMPTY_MAP, ValueMap
from src.models.expression import INFINITE, ArithMode, Binary, BinaryOp, FieldRef, MapPredicate, Side
from src.models.interval import Interval, Pool
from src.models.rule import ExclusiveOp, ExclusiveRule, InclusiveOp, InclusiveRule, MatchWindow
from src.services.expression_evaluator import apply_predicate, apply_update

logger = logging.getLogger(__name__)


def inclusive_match(op: InclusiveOp, i1: Interval, i2: Interval) -> Optional[MatchWindow]:
    s1, e1, s2, e2 = i1.start, i1.end, i2.start, i2.end
    if op is InclusiveOp.BEFORE:
        return MatchWindow(s1, e2) if e1 < s2 else None
    if op is InclusiveOp.MEET:
        return MatchWindow(s1, e2) if e1 == s2 else None
    if op is InclusiveOp.DURING:
        return MatchWindow(s2, e2) if s2 <= s1 and e1 <= e2 else None
    if op is InclusiveOp.COINCIDE:
        return MatchWindow(s1, e1) if s1 == s2 and e1 == e2 else None
    if op is InclusiveOp.START:
        return MatchWindow(s1, max(e1, e2)) if s1 == s2 else None
    if op is InclusiveOp.FINISH:
        return MatchWindow(min(s1, s2), e1) if e1 == e2 else None
    if op is InclusiveOp.OVERLAP:
        return MatchWindow(min(s1, s2), max(e1, e2)) if s1 < e2 and s2 < e1 else None
    if op is InclusiveOp.SLICE:
        if s1 < e2 and s2 < e1:
            window = MatchWindow(max(s1, s2), min(e1, e2))
            assert window.start <= window.end
            return window
        return None
    raise ValueError(f"Unknown inclusive operator: {op!r}")


def exclusive_match(op: ExclusiveOp, i1: Interval, i2: Interval) -> bool:
    if op is ExclusiveOp.AFTER:
        return i1.start > i2.end
    if op is ExclusiveOp.FOLLOW:
        return i2.end == i1.start
    if op is ExclusiveOp.CONTAIN:
        return i1.start <= i2.start and i2.end <= i1.end
    raise ValueError(f"Unknown exclusive operator: {op!r}")


def group_by_name(pool: Iterable[Interval]) -> Dict[str, List[Interval]]:
    """Intervals per identifier, each list in canonical order"""
    groups: Dict[str, List[Interval]] = defaultdict(list)
    for interval in pool:
        groups[interval.name].append(interval)
    for members in groups.values():
        members.sort(key=lambda interval: interval.key)
    return groups


def _bucket(intervals: Sequence[Interval], key: Callable[[Interval], object]) -> Dict[object, List[Interval]]:
    buckets: Dict[object, List[Interval]] = defaultdict(list)
    for interval in intervals:
        buckets[key(interval)].append(interval)
    return buckets


def _candidates(op, rights: Sequence[Interval]) -> Callable[[Interval], Sequence[Interval]]:
    """Narrow the right-hand operands that can possibly relate to ``i1``.

    ``rights`` is in canonical order, hence sorted by start. The clock
    predicate itself is still checked on every candidate.
    """
    if op is InclusiveOp.MEET:
        buckets = _bucket(rights, lambda i: i.start)
        return lambda i1: buckets.get(i1.end, ())
    if op is InclusiveOp.COINCIDE:
        buckets = _bucket(rights, lambda i: (i.start, i.end))
        return lambda i1: buckets.get((i1.start, i1.end), ())
    if op is InclusiveOp.START:
        buckets = _bucket(rights, lambda i: i.start)
        return lambda i1: buckets.get(i1.start, ())
    if op in (InclusiveOp.FINISH, ExclusiveOp.FOLLOW):
        buckets = _bucket(rights, lambda i: i.end)
        if op is InclusiveOp.FINISH:
            return lambda i1: buckets.get(i1.end, ())
        return lambda i1: buckets.get(i1.start, ())

    starts = [interval.start for interval in rights]
    if op is InclusiveOp.BEFORE:
        return lambda i1: rights[bisect_right(starts, i1.end):]
    if op in (InclusiveOp.OVERLAP, InclusiveOp.SLICE):
        return lambda i1: rights[:bisect_left(starts, i1.end)]
    if op is InclusiveOp.DURING:
        return lambda i1: rights[:bisect_right(starts, i1.start)]
    if op is ExclusiveOp.CONTAIN:
        return lambda i1: rights[bisect_left(starts, i1.start):]
    if op is ExclusiveOp.AFTER:
        by_end = sorted(rights, key=lambda i: i.end)
        ends = [interval.end for interval in by_end]
        return lambda i1: by_end[:bisect_left(ends, i1.start)]
    raise ValueError(f"Unknown clock predicate: {op!r}")


def equality_pairs(phi: MapPredicate) -> Tuple[Tuple[str, str], ...]:
    """(left key, right key) of every top-level conjunct ``a.x = b.y``"""
    pairs = []
    stack = [phi.body]
    while stack:
        node = stack.pop()
        if not isinstance(node, Binary):
            continue
        if node.op is BinaryOp.AND:
            stack.extend((node.rhs, node.lhs))
        elif node.op is BinaryOp.EQ and isinstance(node.lhs, FieldRef) and isinstance(node.rhs, FieldRef):
            if node.lhs.side is Side.LEFT and node.rhs.side is Side.RIGHT:
                pairs.append((node.lhs.key, node.rhs.key))
            elif node.lhs.side is Side.RIGHT and node.rhs.side is Side.LEFT:
                pairs.append((node.rhs.key, node.lhs.key))
    return tuple(pairs)


def _signature(data: ValueMap, keys: Sequence[str], k: Optional[int]) -> Optional[Tuple]:
    """Values as the predicate compares them; None when a key is absent"""
    values = []
    for key in keys:
        value = data.get(key)
        if value is None:
            return None
        if type(value) is bool:
            values.append((True, value))
        else:
            values.append((False, value % k if k is not None else value))
    return tuple(values)


def _join_candidates(op, rights: Sequence[Interval], phi: MapPredicate,
                     k: Optional[int]) -> Callable[[Interval], Sequence[Interval]]:
    """``_candidates`` further split by the values the equality conjuncts of phi compare"""
    pairs = equality_pairs(phi)
    if not pairs:
        return _candidates(op, rights)

    left_keys = [left for left, _ in pairs]
    right_keys = [right for _, right in pairs]
    partitions: Dict[Tuple, List[Interval]] = defaultdict(list)
    for interval in rights:
        signature = _signature(interval.map, right_keys, k)
        if signature is not None:
            partitions[signature].append(interval)
    lookups = {signature: _candidates(op, members) for signature, members in partitions.items()}

    def lookup(i1: Interval) -> Sequence[Interval]:
        narrowed = lookups.get(_signature(i1.map, left_keys, k))
        return narrowed(i1) if narrowed is not None else ()

    return lookup


def derive_inclusive(rule: InclusiveRule,
                     lefts: Sequence[Interval],
                     rights: Sequence[Interval],
                     mode: ArithMode = INFINITE) -> Iterator[Tuple[Interval, Interval, Interval]]:
    """Yield (produced, i1, i2) for every match, in canonical order of i1 then i2"""
    if not lefts or not rights:
        return
    candidates = _join_candidates(rule.op, rights, rule.phi, mode.bound)
    for i1 in lefts:
        for i2 in candidates(i1):
            window = inclusive_match(rule.op, i1, i2)
            if window is None:
                continue
            if not apply_predicate(rule.phi, i1.map, i2.map, mode):
                continue
            data = apply_update(rule.psi, i1.map, i2.map, mode)
            if data is None:
                continue
            yield Interval(rule.lhs, window.start, window.end, data), i1, i2


def derive_exclusive(rule: ExclusiveRule,
                     lefts: Sequence[Interval],
                     rights: Sequence[Interval],
                     mode: ArithMode = INFINITE) -> Iterator[Tuple[Interval, Interval]]:
    """Yield (produced, i1) for every included interval with no excluder"""
    candidates = _join_candidates(rule.op, rights, rule.phi, mode.bound) if rights else (lambda i1: ())
    for i1 in lefts:
        data = apply_update(rule.psi, i1.map, EMPTY_MAP, mode)
        if data is None:
            continue
        blocked = any(
            exclusive_match(rule.op, i1, i2) and apply_predicate(rule.phi, i1.map, i2.map, mode)
            for i2 in candidates(i1)
        )
        if not blocked:
            yield Interval(rule.lhs, i1.start, i1.end, data), i1


def apply_inclusive(rule: InclusiveRule, pool: AbstractSet[Interval], mode: ArithMode = INFINITE) -> Pool:
    groups = group_by_name(pool)
    produced = derive_inclusive(rule, groups.get(rule.id1, []), groups.get(rule.id2, []), mode)
    return frozenset(interval for interval, _, _ in produced)


def apply_exclusive(rule: ExclusiveRule, pool: AbstractSet[Interval], mode: ArithMode = INFINITE) -> Pool:
    groups = group_by_name(pool)
    produced = derive_exclusive(rule, groups.get(rule.id1, []), groups.get(rule.id2, []), mode)
    return frozenset(interval for interval, _ in produced)


def apply_rule(rule, pool: AbstractSet[Interval], mode: ArithMode = INFINITE) -> Pool:
    if isinstance(rule, InclusiveRule):
        return apply_inclusive(rule, pool, mode)
    return apply_exclusive(rule, pool, mode)


class _SpanIndex:
    """Answers "is some indexed span (s', e') with s' >= s and e' <= e" in log time"""

    def __init__(self, spans: Iterable[Tuple[int, int]]):
        ordered = sorted(set(spans))
        self.starts = [start for start, _ in ordered]
        self.suffix_min_end = list(accumulate(reversed([end for _, end in ordered]), min))[::-1]
        self.min_end_at_start: Dict[int, int] = {}
        for start, end in ordered:
            self.min_end_at_start.setdefault(start, end)

    def _suffix_min(self, index: int) -> Optional[int]:
        return self.suffix_min_end[index] if index < len(self.suffix_min_end) else None

    def covers_within(self, start: int, end: int) -> bool:
        smallest = self._suffix_min(bisect_left(self.starts, start))
        return smallest is not None and smallest <= end

    def covers_strictly_within(self, start: int, end: int) -> bool:
        """Same as covers_within but ignoring the span (start, end) itself"""
        smallest = self._suffix_min(bisect_right(self.starts, start))
        if smallest is not None and smallest <= end:
            return True
        same_start = self.min_end_at_start.get(start)
        return same_start is not None and same_start < end


def minimality(new_pool: AbstractSet[Interval], pool: AbstractSet[Interval]) -> Pool:
    """Keep the new intervals that are minimal and subsume nothing in ``pool``.

    Per identifier: drop a new interval when an existing one lies within its
    span (clause 1), when another new interval lies strictly within it
    (clause 2), or when a new interval with the same span has a smaller map
    (clause 3).
    """
    fresh_by_name: Dict[str, List[Interval]] = defaultdict(list)
    for interval in new_pool:
        fresh_by_name[interval.name].append(interval)
    if not fresh_by_name:
        return frozenset()

    existing: Dict[str, List[Tuple[int, int]]] = defaultdict(list)
    for interval in pool:
        if interval.name in fresh_by_name:
            existing[interval.name].append((interval.start, interval.end))

    kept = set()
    for name, fresh in fresh_by_name.items():
        existing_spans = _SpanIndex(existing[name])
        fresh_spans = _SpanIndex((interval.start, interval.end) for interval in fresh)

        least: Dict[Tuple[int, int], Interval] = {}
        for interval in fresh:
            span = (interval.start, interval.end)
            current = least.get(span)
            if current is None or interval.map.entries < current.map.entries:
                least[span] = interval

        for (start, end), interval in least.items():
            if existing_spans.covers_within(start, end):
                continue
            if fresh_spans.covers_strictly_within(start, end):
                continue
            kept.add(interval)

    logger.debug(f"Minimality kept {len(kept)} of {len(new_pool)} new intervals")
    return frozenset(kept)


def select(new_pool: AbstractSet[Interval], pool: AbstractSet[Interval], minimal: bool) -> Pool:
    return minimality(new_pool, pool) if minimal else frozenset(new_pool)
