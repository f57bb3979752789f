#!/usr/bin/env python3
"""
Instance generators and their brute-force oracles
"""
import random

import pytest

from src.errors import ReductionInputError
from src.models.evaluation import EvalConfig, VerdictKind
from src.models.expression import ArithMode
from src.models.reduction import QBF, Dec, IfZero, Inc, MinskyProgram, Quantifier, Stop
from src.services.engine import engine
from src.services.reductions import (
    compile_minsky,
    compile_squares,
    compile_tqbf,
    first_primes,
    format_qbf,
    minsky_oracle,
    parse_minsky,
    parse_qbf,
    qbf_oracle,
    random_minsky,
    random_qbf,
    valuation_bound,
)
from src.services.spec_analyzer import classify


def decide_qbf(formula: QBF) -> VerdictKind:
    spec, trace, target, bound = compile_tqbf(formula)
    return engine.decide(spec, trace, target, EvalConfig(mode=ArithMode.modulo(bound))).kind


# --- two-counter machines --------------------------------------------------

def test_parse_minsky():
    program = parse_minsky("# doubles nothing\ninc 0\n\nDEC 1\nifzero 0 goto 3   # jump\nstop\n")
    assert program.lines == (Inc(0), Dec(1), IfZero(0, 3), Stop())
    assert program.last_line == 3


@pytest.mark.parametrize('text, line', [
    ("inc 2\nstop\n", 1),
    ("inc 0\njump 1\nstop\n", 2),
    ("ifzero 0 goto 9\nstop\n", 1),
    ("inc x\nstop\n", 1),
    ("inc 0\n\ninc 1\n", 3),
    ("", None),
])
def test_malformed_programs(text, line):
    with pytest.raises(ReductionInputError) as caught:
        parse_minsky(text)
    assert caught.value.line == line


def test_minsky_oracle():
    assert minsky_oracle(parse_minsky("inc 0\nstop\n"), 10).halted
    looping = minsky_oracle(parse_minsky("ifzero 0 goto 0\nstop\n"), 10)
    assert not looping.halted and looping.steps == 10
    run = minsky_oracle(parse_minsky("inc 0\ninc 0\ndec 0\ndec 1\nstop\n"), 10)
    assert run.halted and run.steps == 4 and run.configuration == (4, 1, 0)


def test_compiled_machine_shape():
    spec, trace, target = compile_minsky(parse_minsky("inc 0\ndec 1\nifzero 0 goto 0\nstop\n"))
    assert target == 'L3'
    assert [rule.lhs for rule in spec] == ['L1', 'L2', 'L2', 'L0', 'L3']
    assert all(rule.id1 == rule.id2 for rule in spec)
    assert trace[0].name == 'L0' and trace[0].map.to_dict() == {'c0': 0, 'c1': 0}


def test_single_increment_machine():
    spec, trace, target = compile_minsky(parse_minsky("inc 0\nstop\n"))
    verdict = engine.decide(spec, trace, target, EvalConfig(fuel=10))
    assert verdict.found
    assert verdict.witness.height() == 1
    assert verdict.witness.root.map.to_dict() == {'c0': 1, 'c1': 0}


def test_early_stop_forwards_to_the_last_line():
    spec, trace, target = compile_minsky(parse_minsky("inc 0\ndec 0\nifzero 0 goto 4\nstop\nstop\n"))
    assert target == 'L4'
    verdict = engine.decide(spec, trace, target, EvalConfig(fuel=20))
    assert verdict.found
    assert verdict.witness.root.map.to_dict() == {'c0': 0, 'c1': 0}

    spec, trace, target = compile_minsky(parse_minsky("stop\nstop\n"))
    verdict = engine.decide(spec, trace, target, EvalConfig(fuel=5))
    assert verdict.found and verdict.witness.height() == 1


def test_random_programs_end_in_stop():
    rng = random.Random(2)
    for length in range(1, 7):
        program = random_minsky(rng, length)
        assert len(program) == length and program.lines[-1] == Stop()
        compile_minsky(program)


# --- quantified Boolean formulas -----------------------------------------

def test_first_primes():
    assert first_primes(0) == []
    assert first_primes(8) == [2, 3, 5, 7, 11, 13, 17, 19]
    assert first_primes(100)[-1] == 541


def test_parse_and_format_qbf():
    text = "E 2 A 3 E 5\n2 -3 5\n-2 -2 3\n"
    formula = parse_qbf(text)
    assert formula.prefix == ((Quantifier.EXISTS, 2), (Quantifier.FORALL, 3), (Quantifier.EXISTS, 5))
    assert formula.clauses == ((2, -3, 5), (-2, -2, 3))
    assert format_qbf(formula) == text
    assert valuation_bound(formula) == 31


@pytest.mark.parametrize('text', [
    "",
    "E 2 A\n2 2 2\n",
    "E 3\n3 3 3\n",
    "E 2 A 5\n2 2 2\n",
    "X 2\n2 2 2\n",
    "E 2\n2 2\n",
    "E 2\n2 3 2\n",
    "E 2\n2 two 2\n",
])
def test_malformed_formulas(text):
    with pytest.raises(ReductionInputError):
        parse_qbf(text)


def test_qbf_oracle_examples():
    assert qbf_oracle(parse_qbf("E 2\n2 2 2\n"))
    assert not qbf_oracle(parse_qbf("A 2\n-2 -2 -2\n"))
    assert qbf_oracle(parse_qbf("A 2 E 3\n2 3 3\n-2 -3 -3\n"))
    assert not qbf_oracle(parse_qbf("E 2 A 3\n2 3 3\n-2 -3 -3\n"))


def test_qbf_oracle_size_guard():
    with pytest.raises(ReductionInputError):
        qbf_oracle(random_qbf(random.Random(0), 13, 1))


@pytest.mark.parametrize('text, kind', [
    ("E 2\n2 2 2\n", VerdictKind.FOUND),
    ("A 2\n2 2 2\n", VerdictKind.NOT_FOUND),
    ("A 2 E 3\n2 3 3\n-2 -3 -3\n", VerdictKind.FOUND),
    ("E 2 A 3\n2 3 3\n-2 -3 -3\n", VerdictKind.NOT_FOUND),
    ("A 2 A 3\n", VerdictKind.FOUND),
])
def test_compiled_formulas(text, kind):
    assert decide_qbf(parse_qbf(text)) is kind


def test_compiled_formula_shape():
    formula = parse_qbf("E 2 A 3\n2 3 3\n")
    spec, trace, target, bound = compile_tqbf(formula)
    info = classify(spec)
    assert info.cycle_free and not info.has_exclusive
    # two generation rules per variable, the clause check, then 2 + 1 quantifier rules
    assert len(spec) == 2 * 2 + 1 + 3
    assert (target, bound) == ('C0', 7)
    assert trace[0].map.to_dict() == {'s': 1}


def test_universal_witness_has_two_branches():
    spec, trace, target, bound = compile_tqbf(parse_qbf("A 2\n2 -2 2\n"))
    verdict = engine.decide(spec, trace, target, EvalConfig(mode=ArithMode.modulo(bound)))
    assert verdict.found
    assert len(verdict.witness.children) == 2


# --- repeated squaring ----------------------------------------------------

@pytest.mark.parametrize('n, last', [(0, 2), (1, 4), (3, 256), (5, 4294967296)])
def test_squares(n, last):
    spec, trace = compile_squares(n)
    result = engine.evaluate_trace(spec, trace)
    assert len(result.pool) == n + 1
    assert result.labeled(f"e{n}")[0].map.get('d') == last


def test_squares_needs_a_natural_length():
    with pytest.raises(ReductionInputError):
        compile_squares(-1)


def test_program_model_length():
    assert len(MinskyProgram((Inc(0), Stop()))) == 2
