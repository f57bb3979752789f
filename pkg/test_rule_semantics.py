#!/usr/bin/env python3
"""
Clock predicates, single-rule application and the minimality selection
"""
import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from naive_oracles import allen_excludes, allen_window, naive_apply, naive_minimality
from src.models.base import ValueMap
from src.models.expression import INFINITE, ArithMode
from src.models.interval import Interval
from src.models.rule import ExclusiveOp, InclusiveOp, MatchWindow
from src.services.rule_interpreter import (
    apply_exclusive,
    apply_inclusive,
    apply_rule,
    equality_pairs,
    exclusive_match,
    inclusive_match,
    minimality,
)
from src.services.spec_parser import parse_spec


def rule(text: str):
    return parse_spec(text)[0]


def span(name: str, start: int, end: int, **data) -> Interval:
    return Interval(name, start, end, ValueMap.of(data))


ALL_SPANS = [(s, e) for s in range(5) for e in range(s, 5)]


def test_inclusive_match_examples():
    assert inclusive_match(InclusiveOp.MEET, span('B', 1, 3), span('C', 3, 7)) == MatchWindow(1, 7)
    assert inclusive_match(InclusiveOp.COINCIDE, span('B', 0, 0), span('C', 0, 0)) == MatchWindow(0, 0)
    assert inclusive_match(InclusiveOp.BEFORE, span('B', 4, 5), span('C', 3, 9)) is None
    assert inclusive_match(InclusiveOp.SLICE, span('B', 1, 5), span('C', 3, 8)) == MatchWindow(3, 5)
    assert inclusive_match(InclusiveOp.OVERLAP, span('B', 1, 5), span('C', 3, 8)) == MatchWindow(1, 8)


@pytest.mark.parametrize('op', list(InclusiveOp))
def test_inclusive_match_agrees_with_point_enumeration(op):
    for (s1, e1), (s2, e2) in itertools.product(ALL_SPANS, repeat=2):
        i1, i2 = span('B', s1, e1), span('C', s2, e2)
        window = inclusive_match(op, i1, i2)
        expected = allen_window(op.value, i1, i2)
        assert (None if window is None else (window.start, window.end)) == expected
        if window is not None:
            assert window.start <= window.end


def test_exclusive_match_examples():
    assert exclusive_match(ExclusiveOp.FOLLOW, span('B', 5, 9), span('C', 2, 5))
    assert exclusive_match(ExclusiveOp.CONTAIN, span('B', 0, 9), span('C', 3, 4))
    assert not exclusive_match(ExclusiveOp.AFTER, span('B', 2, 3), span('C', 3, 9))


@pytest.mark.parametrize('op', list(ExclusiveOp))
def test_exclusive_match_agrees_with_point_enumeration(op):
    for (s1, e1), (s2, e2) in itertools.product(ALL_SPANS, repeat=2):
        i1, i2 = span('B', s1, e1), span('C', s2, e2)
        assert exclusive_match(op, i1, i2) == allen_excludes(op.value, i1, i2)


def test_apply_inclusive_examples():
    square = rule("e1 <- e0 coincide e0 where a.d = b.d map { d := a.d * a.d }")
    assert apply_inclusive(square, {span('e0', 0, 0, d=2)}) == {span('e1', 0, 0, d=4)}
    assert apply_inclusive(square, frozenset()) == frozenset()

    before = rule("A <- B before C")
    pool = {span('B', 0, 1), span('C', 2, 3), span('C', 5, 6)}
    assert apply_inclusive(before, pool) == {span('A', 0, 3), span('A', 0, 6)}


def test_apply_inclusive_drops_matches_whose_update_fails():
    halve = rule("A <- B meet C map { x := a.x / b.x }")
    pool = {span('B', 0, 1, x=4), span('C', 1, 2, x=0), span('C', 1, 3, x=2)}
    assert apply_inclusive(halve, pool) == {span('A', 0, 3, x=2)}


def test_apply_exclusive_examples():
    follow = rule("A <- B unless follow C")
    assert apply_exclusive(follow, {span('B', 5, 9), span('C', 2, 5)}) == frozenset()
    assert apply_exclusive(follow, {span('B', 5, 9)}) == {span('A', 5, 9)}

    contain = rule("A <- B unless contain C where a.x = b.x")
    assert apply_exclusive(contain, {span('B', 0, 9, x=1), span('C', 3, 4, x=2)}) == {span('A', 0, 9)}
    assert apply_exclusive(contain, {span('B', 0, 9, x=1), span('C', 3, 4, x=1)}) == frozenset()


def test_exclusive_update_sees_an_empty_right_map():
    copy_right = rule("A <- B unless after C map { x := b.x }")
    assert apply_exclusive(copy_right, {span('B', 0, 1, x=1)}) == frozenset()
    copy_left = rule("A <- B unless after C map { x := a.x }")
    assert apply_exclusive(copy_left, {span('B', 0, 1, x=1)}) == {span('A', 0, 1, x=1)}


def test_equality_pairs_reads_top_level_conjuncts_only():
    phi = rule("A <- B meet C where a.x = b.y & (b.z = a.w & a.q < 3)").phi
    assert set(equality_pairs(phi)) == {('x', 'y'), ('w', 'z')}
    assert equality_pairs(rule("A <- B meet C where a.x = b.y | a.x = 1").phi) == ()


def test_minimality_examples():
    fig = {span('A', 0, 6), span('A', 0, 3), span('A', 4, 6)}
    assert minimality(fig, frozenset()) == {span('A', 0, 3), span('A', 4, 6)}
    assert minimality(frozenset(), fig) == frozenset()
    assert minimality({span('A', 1, 2, d=5), span('A', 1, 2, d=3)}, frozenset()) == {span('A', 1, 2, d=3)}


def test_minimality_against_the_pool_ignores_maps():
    assert minimality({span('A', 0, 5, d=1)}, {span('A', 2, 3, d=9)}) == frozenset()
    assert minimality({span('A', 0, 5, d=1)}, {span('B', 2, 3)}) == {span('A', 0, 5, d=1)}


intervals = st.builds(
    lambda name, s, length, d: Interval(name, s, s + length, ValueMap.of(d=d)),
    st.sampled_from(['A', 'B']), st.integers(0, 4), st.integers(0, 3), st.integers(0, 2),
)


@settings(max_examples=500)
@given(st.frozensets(intervals, max_size=8), st.frozensets(intervals, max_size=5))
def test_minimality_matches_three_clause_filter(new_pool, pool):
    kept = minimality(new_pool, pool)
    assert kept == naive_minimality(set(new_pool), set(pool))

    for i, j in itertools.permutations(kept, 2):
        if i.name != j.name:
            continue
        assert (i.start, i.end) != (j.start, j.end)
        assert not (i.start <= j.start and j.end < i.end)
        assert not (i.start < j.start and j.end <= i.end)


RULE_TEXTS = [
    "A <- B before C where a.d < b.d map { d := b.d - a.d }",
    "A <- B meet B map { d := a.d + b.d }",
    "A <- B during C where a.d = b.d",
    "A <- C coincide B where a.d = b.d map { d := a.d * 2 }",
    "A <- B start C where a.d = b.d & a.d > 0",
    "A <- B finish C where !(a.d = b.d)",
    "A <- B overlap C map { d := a.d % b.d }",
    "A <- B slice C where a.d >= b.d map { d := a.d / b.d }",
    "A <- B unless after C where a.d = b.d",
    "A <- B unless follow C map { d := a.d }",
    "A <- B unless contain C where a.d < b.d",
]


@pytest.mark.parametrize('text', RULE_TEXTS)
@pytest.mark.parametrize('k', [None, 2, 3])
def test_apply_rule_matches_double_loop(text, k):
    rng = random.Random(f"{text}|{k}")
    mode = INFINITE if k is None else ArithMode.modulo(k)
    parsed = rule(text)
    for _ in range(150):
        pool = set()
        for _ in range(rng.randint(0, 4)):
            start = rng.randint(0, 3)
            end = rng.randint(start, 3)
            pool.add(span(rng.choice('BC'), start, end, d=rng.randint(0, 3)))
        if k is not None:
            pool = {Interval(i.name, i.start, i.end, i.map.reduce_mod(k)) for i in pool}
        produced = apply_rule(parsed, frozenset(pool), mode)
        assert produced == naive_apply(parsed, frozenset(pool), k)

        endpoints = {i.start for i in pool} | {i.end for i in pool}
        for interval in produced:
            assert interval.name == 'A'
            assert interval.start in endpoints and interval.end in endpoints


@given(st.frozensets(intervals, max_size=5), st.frozensets(intervals, max_size=4))
def test_exclusive_production_is_antitone_in_excluders(base, extra):
    contain = rule("X <- A unless contain B where a.d <= b.d")
    excluders = frozenset(Interval('B', i.start, i.end, i.map) for i in extra)
    assert apply_exclusive(contain, base | excluders) <= apply_exclusive(contain, base)
