#!/usr/bin/env python3
"""
Rule DSL parser and printer, trace ingestion and pool emission
"""
import logging

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import SpecSyntaxError, TraceFormatError
from src.models.base import ValueMap
from src.models.expression import (
    TRUE,
    Binary,
    BinaryOp,
    BoolLiteral,
    FieldRef,
    MapPredicate,
    MapUpdate,
    NatLiteral,
    Not,
    Side,
)
from src.models.interval import Event
from src.models.rule import ExclusiveOp, ExclusiveRule, InclusiveOp, InclusiveRule, Spec
from src.services.engine import engine
from src.services.reductions import compile_squares
from src.services.spec_parser import format_spec, parse_spec
from src.services.trace_io import detect_format, emit_pool, emit_trace, format_intervals, parse_trace

A_D, B_D = FieldRef(Side.LEFT, 'd'), FieldRef(Side.RIGHT, 'd')


# --- rule DSL ------------------------------------------------------------------

def test_parse_squaring_rule():
    spec = parse_spec("e1 <- e0 coincide e0 where a.d = b.d map { d := a.d * a.d }")
    assert spec[0] == InclusiveRule(
        'e1', 'e0', InclusiveOp.COINCIDE, 'e0',
        MapPredicate(Binary(BinaryOp.EQ, A_D, B_D)),
        MapUpdate((('d', Binary(BinaryOp.MUL, A_D, A_D)),)),
    )


def test_parse_defaults_and_exclusive_form():
    spec = parse_spec("A <- B before C\nA <- B unless follow C where a.x = b.x\n")
    assert spec[0] == InclusiveRule('A', 'B', InclusiveOp.BEFORE, 'C')
    assert spec[0].phi.body == TRUE and spec[0].psi.assignments == ()
    assert isinstance(spec[1], ExclusiveRule) and spec[1].op is ExclusiveOp.FOLLOW


def test_precedence_and_comments():
    spec = parse_spec("""
        # comment line
        A <- B meet C where a.x + 2 * b.y < 7 & !b.f | a.g   # trailing comment
    """)
    x, y = FieldRef(Side.LEFT, 'x'), FieldRef(Side.RIGHT, 'y')
    sum_ = Binary(BinaryOp.ADD, x, Binary(BinaryOp.MUL, NatLiteral(2), y))
    conjunction = Binary(BinaryOp.AND, Binary(BinaryOp.LT, sum_, NatLiteral(7)), Not(FieldRef(Side.RIGHT, 'f')))
    assert spec[0].phi.body == Binary(BinaryOp.OR, conjunction, FieldRef(Side.LEFT, 'g'))


def test_subtraction_is_left_associative():
    body = parse_spec("A <- B meet C where a.x - 1 - 2 = 0")[0].phi.body
    left = Binary(BinaryOp.SUB, Binary(BinaryOp.SUB, FieldRef(Side.LEFT, 'x'), NatLiteral(1)), NatLiteral(2))
    assert body == Binary(BinaryOp.EQ, left, NatLiteral(0))


def test_identifiers_named_like_operands():
    spec = parse_spec("a <- b meet b where a.x = b.x map { a := a.x }")
    assert spec[0].lhs == 'a' and spec[0].id1 == 'b'
    assert spec[0].psi.keys() == ['a']


@pytest.mark.parametrize('text, line', [
    ("A <- B sometimes C", 1),
    ("A <- B meet C\nD <- E meet", 2),
    ("A <- B meet C where a.x < b.y < 3", 1),
    ("A <- B meet C map { x := 1, x := 2 }", 1),
    ("A <- B meet C where c.x = 1", 1),
    ("before <- B meet C", 1),
    ("", 1),
])
def test_syntax_errors_are_positioned(text, line):
    with pytest.raises(SpecSyntaxError) as caught:
        parse_spec(text)
    assert caught.value.line == line
    assert caught.value.column >= 1


def test_duplicate_key_error_points_at_the_second_key():
    with pytest.raises(SpecSyntaxError) as caught:
        parse_spec("A <- B meet C map { x := 1,\n  x := 2 }")
    assert (caught.value.line, caught.value.column) == (2, 3)
    assert 'Duplicate' in str(caught.value)


identifiers = st.sampled_from(['A', 'B', 'e0', 'p_1', 'Tail'])
keys = st.sampled_from(['x', 'y', 'd'])
expr_leaves = st.one_of(
    st.integers(0, 2 ** 40).map(NatLiteral),
    st.booleans().map(BoolLiteral),
    st.builds(FieldRef, st.sampled_from(list(Side)), keys),
)
expressions = st.recursive(
    expr_leaves,
    lambda children: st.one_of(
        st.builds(Binary, st.sampled_from(list(BinaryOp)), children, children),
        st.builds(Not, children),
    ),
    max_leaves=6,
)
updates = st.lists(st.tuples(keys, expressions), max_size=3, unique_by=lambda pair: pair[0]).map(
    lambda pairs: MapUpdate(tuple(pairs))
)
inclusive_rules = st.builds(
    InclusiveRule, identifiers, identifiers, st.sampled_from(list(InclusiveOp)), identifiers,
    expressions.map(MapPredicate), updates,
)
exclusive_rules = st.builds(
    ExclusiveRule, identifiers, identifiers, st.sampled_from(list(ExclusiveOp)), identifiers,
    expressions.map(MapPredicate), updates,
)
specs = st.lists(st.one_of(inclusive_rules, exclusive_rules), min_size=1, max_size=4).map(
    lambda rules: Spec(tuple(rules))
)


@settings(max_examples=300)
@given(specs)
def test_printer_round_trip(spec):
    text = format_spec(spec)
    assert parse_spec(text) == spec
    assert format_spec(parse_spec(text)) == text


# --- traces --------------------------------------------------------------------

def test_json_and_csv_describe_the_same_event():
    expected = [Event('e0', 0, ValueMap.of(d=2))]
    assert parse_trace('{"name":"e0","time":0,"data":{"d":2}}\n') == expected
    assert parse_trace('e0,0,d=2\n', 'csv') == expected
    assert parse_trace('name,time,data\ne0,0,d=2\n', 'csv') == expected


def test_empty_inputs():
    assert parse_trace('') == []
    assert parse_trace('\n\n', 'csv') == []


def test_csv_data_cells():
    events = parse_trace('name,time,data\na,1,\nb,2,x=3;ok=true;no=false\n', 'csv')
    assert events[0].map == ValueMap.of()
    assert events[1].map == ValueMap.of(x=3, ok=True, no=False)


@pytest.mark.parametrize('text, fmt, line', [
    ('{"name":"a","time":0}\n{"name":"a","time":-1}\n', 'json', 2),
    ('{"name":"a","time":1.5}\n', 'json', 1),
    ('{"name":"a","time":0,"data":{"x":-3}}\n', 'json', 1),
    ('{"name":"a","time":0,"data":{"x":"3"}}\n', 'json', 1),
    ('{"name":"a"\n', 'json', 1),
    ('[1, 2]\n', 'json', 1),
    ('\n\n{"name":"a b","time":0}\n', 'json', 3),
    ('name,time,data\na,-1,\n', 'csv', 2),
    ('a,0,\nb,x,\n', 'csv', 2),
    ('a,0,x=1.5\n', 'csv', 1),
    ('a,0,x\n', 'csv', 1),
    ('a,0,x=1;x=2\n', 'csv', 1),
    ('a,0,\n,1,\n', 'csv', 2),
])
def test_trace_errors_carry_line_numbers(text, fmt, line):
    with pytest.raises(TraceFormatError) as caught:
        parse_trace(text, fmt)
    assert caught.value.line == line


@pytest.mark.parametrize('text, line', [
    ('e0,0,d=2,\n', 1),
    ('e0,0,d=2,\ne1,1,\n', 1),
    ('a,0,\nb,1,x=1,2\n', 2),
])
def test_csv_rows_with_extra_fields_are_rejected(text, line):
    with pytest.raises(TraceFormatError) as caught:
        parse_trace(text, 'csv')
    assert caught.value.line == line
    assert 'fields' in str(caught.value)


def test_format_detection():
    assert detect_format('trace.csv', '{') == 'csv'
    assert detect_format('trace.jsonl', 'a,0,') == 'json'
    assert detect_format('trace.txt', '  {"name": "a"}') == 'json'
    assert detect_format(None, 'a,0,') == 'csv'


event_lists = st.lists(
    st.builds(
        Event,
        st.sampled_from(['a', 'e0', 'sig']),
        st.integers(0, 10 ** 6),
        st.dictionaries(keys, st.one_of(st.booleans(), st.integers(0, 2 ** 80)), max_size=3).map(ValueMap.of),
    ),
    max_size=8,
)


@given(event_lists, st.sampled_from(['json', 'csv']))
def test_trace_round_trip(events, fmt):
    assert parse_trace(emit_trace(events, fmt), fmt) == events


def test_pool_emission(caplog):
    spec, trace = compile_squares(5)
    result = engine.evaluate_trace(spec, trace)
    with caplog.at_level(logging.INFO, logger='src.services.trace_io'):
        csv_text = emit_pool(result, 'csv')
    rows = csv_text.splitlines()
    assert rows[0] == 'name,start,end,data'
    assert len(rows) == 7
    assert rows[-1] == 'e5,0,0,d=4294967296'
    assert 'pool_size=6' in caplog.text
    assert emit_pool(result, 'csv') == csv_text

    json_text = emit_pool(result, 'json')
    assert json_text.splitlines()[0] == '{"name":"e0","start":0,"end":0,"data":{"d":2}}'


def test_empty_pool_has_an_empty_body():
    assert format_intervals([], 'json') == ''
    assert format_intervals([], 'csv').strip() == 'name,start,end,data'
