"""
Random specs and traces for the test suites.

Specs are built as DSL text and parsed, so every generated instance also
exercises the parser. Instances are always valid: a cyclic draw with
exclusive rules is redrawn.
"""
import random
from dataclasses import dataclass
from typing import List, Optional, Sequence

from src.errors import SpecValidationError
from src.models.base import ValueMap
from src.models.evaluation import EvalConfig
from src.models.expression import INFINITE, ArithMode
from src.models.interval import Event
from src.models.rule import ExclusiveOp, InclusiveOp, Spec
from src.services.spec_analyzer import validate
from src.services.spec_parser import parse_spec

PREDICATES = (
    '',
    'where a.x = b.x',
    'where a.x < b.x',
    'where a.x + b.x > 1',
    'where !(a.x = 0)',
    'where a.x >= 1 | b.flag',
    'where a.x % b.x = 0',
)

UPDATES = (
    '',
    'map { x := a.x }',
    'map { x := a.x + 1 }',
    'map { x := b.x * 2 }',
    'map { x := a.x - b.x }',
    'map { x := a.x / b.x }',
    'map { x := a.x, flag := a.x > 1 }',
)

# b is the empty map inside an exclusive update
EXCLUSIVE_UPDATES = ('', 'map { x := a.x }', 'map { x := a.x * 3 }', 'map { flag := true }')


@dataclass(frozen=True)
class Instance:
    text: str
    spec: Spec
    trace: List[Event]
    config: EvalConfig

    @property
    def k(self) -> Optional[int]:
        return self.config.mode.bound


def random_data(rng: random.Random, max_value: int) -> ValueMap:
    data = {}
    if rng.random() < 0.85:
        data['x'] = rng.randint(0, max_value)
    if rng.random() < 0.3:
        data['flag'] = rng.random() < 0.5
    return ValueMap.of(data)


def random_trace(rng: random.Random, names: Sequence[str], size: int, max_time: int, max_value: int) -> List[Event]:
    return [
        Event(rng.choice(names), rng.randint(0, max_time), random_data(rng, max_value))
        for _ in range(size)
    ]


def random_rule_text(rng: random.Random, names: Sequence[str], heads: Sequence[str], exclusive: bool) -> str:
    lhs, id1, id2 = rng.choice(heads), rng.choice(names), rng.choice(names)
    if exclusive:
        op = rng.choice(list(ExclusiveOp)).value
        clauses = [rng.choice(PREDICATES), rng.choice(EXCLUSIVE_UPDATES)]
        return ' '.join(part for part in [f"{lhs} <- {id1} unless {op} {id2}", *clauses] if part)
    op = rng.choice(list(InclusiveOp)).value
    clauses = [rng.choice(PREDICATES), rng.choice(UPDATES)]
    return ' '.join(part for part in [f"{lhs} <- {id1} {op} {id2}", *clauses] if part)


def random_spec_text(rng: random.Random,
                     rules: int,
                     names: Sequence[str],
                     heads: Sequence[str],
                     exclusive_rate: float = 0.3) -> str:
    """Redraws until the rule set validates"""
    while True:
        text = ''.join(
            f"{random_rule_text(rng, names, heads, rng.random() < exclusive_rate)}\n"
            for _ in range(rules)
        )
        try:
            validate(parse_spec(text))
        except SpecValidationError:
            continue
        return text


def tiny_instance(rng: random.Random, exclusive_rate: float = 0.3, minimal: Optional[bool] = None) -> Instance:
    """|trace| <= 3, <= 3 rules, endpoints <= 3, bound <= 4 on cyclic specs"""
    events = ('p', 'q')
    heads = ('p', 'q', 'r', 's')
    text = random_spec_text(rng, rng.randint(1, 3), events + ('r',), heads, exclusive_rate)
    spec = parse_spec(text)
    trace = random_trace(rng, events, rng.randint(0, 3), 3, 3)

    cycle_free = validate(spec).cycle_free
    if cycle_free and rng.random() < 0.3:
        mode = INFINITE
    else:
        mode = ArithMode.modulo(rng.randint(1, 4))
    if minimal is None:
        minimal = rng.random() < 0.5
    return Instance(text, spec, trace, EvalConfig(mode=mode, minimal=minimal))


def bounded_instance(rng: random.Random) -> Instance:
    """Finite data with minimality: |trace| <= 50, <= 10 rules, bound <= 16"""
    names = ('p', 'q', 'r', 's', 't', 'u')
    text = random_spec_text(rng, rng.randint(1, 10), names, names, exclusive_rate=0.2)
    trace = random_trace(rng, names[:3], rng.randint(0, 50), rng.randint(0, 12), 20)
    mode = ArithMode.modulo(rng.randint(1, 16))
    return Instance(text, parse_spec(text), trace, EvalConfig(mode=mode, minimal=True))


def identifier_count(spec: Spec, trace: Sequence[Event]) -> int:
    return len(spec.identifiers() | {event.name for event in trace})
