"""
Модели конфигурации и результатов вычисления
"""
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Mapping, Optional, Tuple

from src.models.base import Identifier
from src.models.expression import INFINITE, ArithMode
from src.models.interval import Interval, Pool, canonical_order


@dataclass(frozen=True)
class EvalConfig:
    """Выбор фрагмента для одного вычисления"""

    mode: ArithMode = INFINITE
    minimal: bool = False
    fuel: Optional[int] = None       # предел итераций для спецификаций с циклами
    early_exit_target: Optional[Identifier] = None

    def __post_init__(self):
        if self.fuel is not None and (type(self.fuel) is not int or self.fuel < 0):
            raise ValueError(f"Fuel must be a natural number, got {self.fuel!r}")

    def with_target(self, target: Optional[Identifier]) -> 'EvalConfig':
        return replace(self, early_exit_target=target)

    def to_dict(self) -> Dict:
        return {
            'bound': self.mode.bound,
            'minimal': self.minimal,
            'fuel': self.fuel,
            'early_exit_target': self.early_exit_target,
        }


@dataclass(frozen=True)
class Provenance:
    """Первый вывод порожденного интервала"""

    rule_index: int
    parents: Tuple[Interval, ...]
    excluded: Optional[Identifier] = None   # задан для исключающих правил


@dataclass(frozen=True, eq=False)
class WitnessTree:
    root: Interval
    children: Tuple['WitnessTree', ...] = ()
    rule: Optional[int] = None
    excluded: Optional[Identifier] = None

    @property
    def is_leaf(self) -> bool:
        return self.rule is None

    def height(self) -> int:
        """Число ребер на самом длинном пути от корня к листу"""
        memo: Dict[int, int] = {}

        def visit(node: 'WitnessTree') -> int:
            if id(node) not in memo:
                memo[id(node)] = 1 + max((visit(child) for child in node.children), default=-1)
            return memo[id(node)]

        return visit(self)

    def nodes(self) -> List['WitnessTree']:
        """Различные узлы, общие поддеревья считаются один раз"""
        seen, ordered, stack = set(), [], [self]
        while stack:
            node = stack.pop()
            if id(node) in seen:
                continue
            seen.add(id(node))
            ordered.append(node)
            stack.extend(node.children)
        return ordered

    def to_dict(self) -> Dict:
        result = {'interval': self.root.to_dict()}
        if self.rule is not None:
            result['rule'] = self.rule
        if self.excluded is not None:
            result['excluded'] = self.excluded
            result['note'] = 'no excluding interval existed when this interval was produced'
        if self.children:
            result['children'] = [child.to_dict() for child in self.children]
        return result


@dataclass(frozen=True)
class EvalResult:
    pool: Pool
    iterations: int
    saturated: bool
    provenance: Mapping[Interval, Provenance] = field(default_factory=dict)
    stopped_early: bool = False

    def intervals(self) -> List[Interval]:
        return canonical_order(self.pool)

    def labeled(self, name: Identifier) -> List[Interval]:
        return [interval for interval in self.intervals() if interval.name == name]

    def summary(self) -> Dict:
        return {
            'iterations': self.iterations,
            'saturated': self.saturated,
            'stopped_early': self.stopped_early,
            'pool_size': len(self.pool),
        }


class VerdictKind(str, Enum):
    FOUND = 'Found'
    NOT_FOUND = 'NotFound'
    UNKNOWN = 'Unknown'


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    witness: Optional[WitnessTree] = None
    result: Optional[EvalResult] = None

    @property
    def found(self) -> bool:
        return self.kind is VerdictKind.FOUND

    def to_dict(self) -> Dict:
        data = {'verdict': self.kind.value}
        if self.witness is not None:
            data['witness'] = self.witness.to_dict()
        return data
