"""
Модуль анализа спецификаций: граф правил, классификация фрагмента,
валидация и мера размера
"""
import logging
import heapq
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from src.errors import SpecValidationError
from src.models.base import bit_length, value_size
from src.models.expression import Binary, Expr, NatLiteral, Not, walk
from src.models.interval import Event
from src.models.rule import ExclusiveRule, Rule, Spec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RuleGraph:
    nodes: Tuple[int, ...]
    edges: FrozenSet[Tuple[int, int]]

    def successors(self) -> Dict[int, List[int]]:
        adjacency: Dict[int, List[int]] = {node: [] for node in self.nodes}
        for source, target in sorted(self.edges):
            adjacency[source].append(target)
        return adjacency


@dataclass(frozen=True)
class FragmentInfo:
    cycle_free: bool
    has_exclusive: bool
    topo_order: Optional[Tuple[int, ...]] = None
    cycle: Optional[Tuple[int, ...]] = None

    def to_dict(self) -> Dict:
        return {
            'cycle_free': self.cycle_free,
            'has_exclusive': self.has_exclusive,
            'topo_order': list(self.topo_order) if self.topo_order is not None else None,
            'cycle': list(self.cycle) if self.cycle is not None else None,
        }


def _find_cycle(graph: RuleGraph, blocked: Iterable[int]) -> Tuple[int, ...]:
    """Цикл среди вершин, которые алгоритм Кана не смог упорядочить.

    У каждой заблокированной вершины есть заблокированный предшественник,
    поэтому обратный обход обязательно вернется в уже пройденную вершину.
    """
    remaining = set(blocked)
    predecessors: Dict[int, List[int]] = defaultdict(list)
    for source, target in sorted(graph.edges):
        if source in remaining and target in remaining:
            predecessors[target].append(source)

    path: List[int] = []
    position: Dict[int, int] = {}
    node = min(remaining)
    while node not in position:
        position[node] = len(path)
        path.append(node)
        node = predecessors[node][0]
    cycle = path[position[node]:][::-1]
    pivot = cycle.index(min(cycle))
    return tuple(cycle[pivot:] + cycle[:pivot])


class SpecAnalyzer:
    """Анализатор графа правил и размеров экземпляра"""

    def build_graph(self, spec: Spec) -> RuleGraph:
        """
        Строит граф зависимостей правил

        Args:
            spec: Спецификация

        Returns:
            Граф с ребром i -> j, если правило j потребляет идентификатор,
            порождаемый правилом i
        """
        consumers: Dict[str, List[int]] = defaultdict(list)
        for index, rule in enumerate(spec):
            for name in rule.consumes:
                consumers[name].append(index)

        edges = set()
        for index, rule in enumerate(spec):
            for consumer in consumers.get(rule.lhs, ()):
                edges.add((index, consumer))
        return RuleGraph(tuple(range(len(spec))), frozenset(edges))

    def classify(self, spec: Spec) -> FragmentInfo:
        """
        Определяет фрагмент спецификации

        Args:
            spec: Спецификация

        Returns:
            FragmentInfo с лексикографически наименьшим топологическим
            порядком для ациклического графа или с циклом в противном случае
        """
        graph = self.build_graph(spec)
        adjacency = graph.successors()
        logger.debug(f"Rule graph: {len(graph.nodes)} rules, {len(graph.edges)} edges")
        indegree = {node: 0 for node in graph.nodes}
        for _, target in graph.edges:
            indegree[target] += 1

        # Сначала наименьший готовый индекс
        ready = [node for node in graph.nodes if indegree[node] == 0]
        heapq.heapify(ready)
        order: List[int] = []
        while ready:
            node = heapq.heappop(ready)
            order.append(node)
            for target in adjacency[node]:
                indegree[target] -= 1
                if indegree[target] == 0:
                    heapq.heappush(ready, target)

        has_exclusive = any(isinstance(rule, ExclusiveRule) for rule in spec)
        if len(order) == len(graph.nodes):
            return FragmentInfo(cycle_free=True, has_exclusive=has_exclusive, topo_order=tuple(order))

        blocked = [node for node in graph.nodes if indegree[node] > 0]
        return FragmentInfo(cycle_free=False, has_exclusive=has_exclusive, cycle=_find_cycle(graph, blocked))

    def validate(self, spec: Spec) -> FragmentInfo:
        """
        Проверяет, что спецификацию можно вычислять

        Args:
            spec: Спецификация

        Returns:
            FragmentInfo принятой спецификации

        Raises:
            SpecValidationError: повторный ключ в обновлении или исключающее
                правило в спецификации с циклом
        """
        for index, rule in enumerate(spec):
            duplicates = rule.psi.duplicate_keys()
            if duplicates:
                raise SpecValidationError(
                    f"Rule {index} assigns {', '.join(duplicates)} more than once", rule_indices=[index]
                )

        info = self.classify(spec)
        if info.has_exclusive and not info.cycle_free:
            exclusive = [index for index, rule in enumerate(spec) if isinstance(rule, ExclusiveRule)]
            cycle = ' -> '.join(str(index) for index in info.cycle + info.cycle[:1])
            raise SpecValidationError(
                f"Exclusive rules are not allowed in a specification with cycles (cycle: {cycle})",
                rule_indices=exclusive,
                cycle=info.cycle,
            )
        return info

    def expression_size(self, expr: Expr) -> int:
        """Операторы плюс двоичная длина числовых литералов"""
        size = 0
        for node in walk(expr):
            if isinstance(node, (Binary, Not)):
                size += 1
            elif isinstance(node, NatLiteral):
                size += bit_length(node.value)
        return size

    def rule_size(self, rule: Rule) -> int:
        return self.expression_size(rule.phi.body) + sum(
            self.expression_size(rhs) for _, rhs in rule.psi.assignments
        )

    def size_measure(self, spec: Spec, trace: Iterable[Event]) -> Tuple[int, int]:
        """
        Размер экземпляра

        Args:
            spec: Спецификация
            trace: Трасса событий

        Returns:
            Пара (размер спецификации, размер трассы)
        """
        spec_size = sum(self.rule_size(rule) for rule in spec)
        trace_size = sum(
            bit_length(event.time) + sum(value_size(value) for _, value in event.map.items())
            for event in trace
        )
        return spec_size, trace_size

    def complexity_report(self, info: FragmentInfo) -> Dict[str, str]:
        """Известная сложность задачи вычисления для фрагмента"""
        if info.has_exclusive and not info.cycle_free:
            return {'status': 'rejected: exclusive rules in a cyclic specification'}

        if info.cycle_free and info.has_exclusive:
            finite, infinite = 'PSPACE-complete', 'NEXPTIME-hard, in AEXPTIME(poly)'
        elif info.cycle_free:
            finite, infinite = 'PSPACE-complete', 'NEXPTIME-complete'
        else:
            finite, infinite = 'EXPTIME-complete', 'undecidable'

        return {
            'finite data': finite,
            'infinite data': infinite,
            'finite data, minimality': 'PTIME',
            'infinite data, minimality': 'in EXPTIME',
        }


# Глобальный экземпляр анализатора
spec_analyzer = SpecAnalyzer()

build_graph = spec_analyzer.build_graph
classify = spec_analyzer.classify
validate = spec_analyzer.validate
expression_size = spec_analyzer.expression_size
rule_size = spec_analyzer.rule_size
size_measure = spec_analyzer.size_measure
complexity_report = spec_analyzer.complexity_report
