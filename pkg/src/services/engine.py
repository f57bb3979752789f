"""
Движок вычисления: один шаг семантики, неподвижная точка, решение и
деревья вывода.

Движок проводит текущий пул через правила спецификации по порядку,
повторяет шаг, пока пул меняется или пока не кончится топливо, и
запоминает первый вывод каждого порожденного интервала, чтобы потом
подтвердить принадлежность деревом вывода.
"""
import logging
from itertools import islice
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from src.errors import ConfigurationError, WitnessError
from src.models.base import Identifier
from src.models.evaluation import (
    EvalConfig,
    EvalResult,
    Provenance,
    Verdict,
    VerdictKind,
    WitnessTree,
)
from src.models.expression import INFINITE, ArithMode
from src.models.interval import Event, Interval, Pool, init_pool
from src.models.rule import ExclusiveRule, InclusiveRule, Spec
from src.services.rule_interpreter import derive_exclusive, derive_inclusive, group_by_name, select
from src.services.spec_analyzer import spec_analyzer

logger = logging.getLogger(__name__)


def _postorder(tree: WitnessTree) -> List[WitnessTree]:
    """Различные узлы, дети раньше родителей"""
    ordered: List[WitnessTree] = []
    done: Set[int] = set()
    stack: List[Tuple[WitnessTree, bool]] = [(tree, False)]
    while stack:
        node, expanded = stack.pop()
        if id(node) in done:
            continue
        if expanded:
            done.add(id(node))
            ordered.append(node)
            continue
        stack.append((node, True))
        for child in reversed(node.children):
            if id(child) not in done:
                stack.append((child, False))
    return ordered


def _occurrence_below(children: Sequence[WitnessTree], root: Interval) -> Optional[WitnessTree]:
    seen: Set[int] = set()
    stack = list(reversed(children))
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if node.root == root:
            return node
        stack.extend(reversed(node.children))
    return None


def shorten_witness(tree: WitnessTree) -> WitnessTree:
    """Вырезает часть дерева между двумя вхождениями одного интервала.

    Дети сокращаются первыми, поэтому найденное ниже вхождение корня узла
    уже самое нижнее на своем пути.
    """
    rebuilt: Dict[int, WitnessTree] = {}
    for node in _postorder(tree):
        children = tuple(rebuilt[id(child)] for child in node.children)
        lower = _occurrence_below(children, node.root)
        if lower is not None:
            rebuilt[id(node)] = lower
        elif all(new is old for new, old in zip(children, node.children)):
            rebuilt[id(node)] = node
        else:
            rebuilt[id(node)] = WitnessTree(node.root, children, node.rule, node.excluded)
    return rebuilt[id(tree)]


class _RunningPool:
    """Строящийся пул, проиндексированный по идентификатору.

    Каждый интервал помечен применением правила, которое его добавило
    (0 для начального пула). Повторно примененному включающему правилу
    нужны только пары, где хотя бы один операнд помечен не раньше его
    предыдущего применения: старые пары уже перебраны, и их результат
    уже в пуле или, при минимальности, по-прежнему отвергнут.
    """

    def __init__(self, pool: Iterable[Interval], provenance: Dict[Interval, Provenance]):
        self.members: Set[Interval] = set(pool)
        self.groups = group_by_name(self.members)
        self.stamps: Dict[Interval, int] = dict.fromkeys(self.members, 0)
        self.clock = 0
        self.last_applied: Dict[int, int] = {}
        self.provenance = provenance

    def _split(self, intervals: List[Interval], since: int) -> Tuple[List[Interval], List[Interval]]:
        old, new = [], []
        for interval in intervals:
            (new if self.stamps[interval] >= since else old).append(interval)
        return old, new

    def _matches(self, index: int, rule: InclusiveRule, mode: ArithMode):
        lefts, rights = self.groups.get(rule.id1, []), self.groups.get(rule.id2, [])
        since = self.last_applied.get(index)
        if since is None:
            yield from derive_inclusive(rule, lefts, rights, mode)
            return
        old_lefts, new_lefts = self._split(lefts, since)
        _, new_rights = self._split(rights, since)
        yield from derive_inclusive(rule, new_lefts, rights, mode)
        yield from derive_inclusive(rule, old_lefts, new_rights, mode)

    def apply(self, index: int, rule, config: EvalConfig) -> Pool:
        self.clock += 1
        parents: Dict[Interval, Tuple[Interval, ...]] = {}

        if isinstance(rule, InclusiveRule):
            for produced, i1, i2 in self._matches(index, rule, config.mode):
                if produced not in self.members and produced not in parents:
                    parents[produced] = (i1, i2)
            excluded = None
        else:
            lefts, rights = self.groups.get(rule.id1, []), self.groups.get(rule.id2, [])
            for produced, i1 in derive_exclusive(rule, lefts, rights, config.mode):
                if produced not in self.members and produced not in parents:
                    parents[produced] = (i1,)
            excluded = rule.id2
        self.last_applied[index] = self.clock

        added = select(parents.keys(), self.members, config.minimal)
        if not added:
            return added

        self.members.update(added)
        members = self.groups.setdefault(rule.lhs, [])
        members.extend(added)
        members.sort(key=lambda interval: interval.key)
        for interval in added:
            self.stamps[interval] = self.clock
            self.provenance[interval] = Provenance(index, parents[interval], excluded)
        logger.debug(f"Rule {index} ({rule.lhs}) added {len(added)} intervals")
        return added

    def fold(self, spec: Spec, config: EvalConfig, order: Optional[Sequence[int]] = None) -> int:
        """Один проход по правилам; возвращает число добавленных интервалов"""
        indices = range(len(spec)) if order is None else order
        return sum(len(self.apply(index, spec[index], config)) for index in indices)

    def pool(self) -> Pool:
        return frozenset(self.members)


class Engine:
    """Вычисляет спецификации над трассами"""

    def __init__(self):
        self.spec_analyzer = spec_analyzer

    def step(self,
             spec: Spec,
             pool: Pool,
             config: EvalConfig = EvalConfig(),
             order: Optional[Sequence[int]] = None,
             provenance: Optional[Dict[Interval, Provenance]] = None) -> Pool:
        """
        Один шаг: каждое правило один раз применяется к пулу

        Каждое правило видит объединение, полученное предыдущими правилами.

        Args:
            spec: Спецификация
            pool: Текущий пул
            config: Режим арифметики и минимальность
            order: Порядок правил, по умолчанию порядок спецификации
            provenance: Если задан, сюда записывается первый вывод каждого
                добавленного интервала

        Returns:
            Новый пул
        """
        running = _RunningPool(pool, provenance if provenance is not None else {})
        running.fold(spec, config, order)
        return running.pool()

    def initial_pool(self, trace: Iterable[Event], mode: ArithMode = INFINITE) -> Pool:
        pool = init_pool(trace)
        if not mode.is_finite:
            return pool

        reduced = frozenset(
            Interval(interval.name, interval.start, interval.end, interval.map.reduce_mod(mode.bound))
            for interval in pool
        )
        if reduced != pool:
            logger.warning(f"Trace map values were reduced modulo {mode.bound}")
        return reduced

    def evaluate_trace(self, spec: Spec, trace: Iterable[Event], config: EvalConfig = EvalConfig()) -> EvalResult:
        """
        Вычисляет пул спецификации над трассой

        Args:
            spec: Спецификация
            trace: Трасса событий
            config: Режим арифметики, минимальность, топливо и цель раннего выхода

        Returns:
            EvalResult с пулом, числом итераций и записанными выводами

        Raises:
            SpecValidationError: спецификация отвергнута
            ConfigurationError: нужно топливо, но оно не задано
        """
        info = self.spec_analyzer.validate(spec)
        logger.debug(f"Evaluating {len(spec)} rules with {config.to_dict()}")
        if config.fuel is None and not (info.cycle_free or config.mode.is_finite or config.minimal):
            raise ConfigurationError(
                "Fuel is required for a cyclic specification with infinite data and no minimality"
            )

        pool = self.initial_pool(trace, config.mode)
        provenance: Dict[Interval, Provenance] = {}
        target = config.early_exit_target

        if target is not None and any(interval.name == target for interval in pool):
            logger.info(f"Target {target} present in the initial pool")
            return EvalResult(pool, 0, saturated=False, provenance=provenance, stopped_early=True)

        running = _RunningPool(pool, provenance)
        if info.cycle_free:
            running.fold(spec, config, order=info.topo_order)
            result = EvalResult(running.pool(), 1, saturated=True, provenance=provenance)
            logger.info(f"Cycle-free evaluation finished: {result.summary()}")
            return result

        iterations, saturated, stopped_early = 0, False, False
        while config.fuel is None or iterations < config.fuel:
            known = len(provenance)
            added = running.fold(spec, config)
            iterations += 1
            logger.debug(f"Iteration {iterations}: {added} added, pool size {len(running.members)}")
            if not added:
                saturated = True
                break
            if target is not None and any(
                interval.name == target for interval in islice(provenance, known, None)
            ):
                stopped_early = True
                break

        if not saturated and not stopped_early:
            logger.info(f"Fuel exhausted after {iterations} iterations")

        result = EvalResult(running.pool(), iterations, saturated, provenance, stopped_early)
        logger.info(f"Evaluation finished: {result.summary()}")
        return result

    def extract_witness(self, result: EvalResult, interval: Interval) -> WitnessTree:
        """
        Разворачивает записанные выводы в дерево с общими поддеревьями

        Args:
            result: Результат вычисления
            interval: Интервал из пула

        Returns:
            Сокращенное дерево вывода

        Raises:
            WitnessError: интервала нет в пуле или выводы зациклены
        """
        if interval not in result.pool:
            raise WitnessError(f"Interval {interval!r} is not in the pool")

        memo: Dict[Interval, WitnessTree] = {}
        in_progress: Set[Interval] = set()
        stack: List[Tuple[Interval, bool]] = [(interval, False)]
        while stack:
            node, expanded = stack.pop()
            if node in memo:
                continue
            origin = result.provenance.get(node)
            if origin is None:
                memo[node] = WitnessTree(node)
                continue

            parents = tuple(dict.fromkeys(origin.parents))
            if expanded:
                in_progress.discard(node)
                memo[node] = WitnessTree(
                    node, tuple(memo[parent] for parent in parents), origin.rule_index, origin.excluded
                )
                continue

            if node in in_progress:
                raise WitnessError(f"Provenance of {node!r} is cyclic")
            in_progress.add(node)
            stack.append((node, True))
            for parent in parents:
                if parent not in memo:
                    if parent in in_progress:
                        raise WitnessError(f"Provenance of {node!r} is cyclic")
                    stack.append((parent, False))

        return shorten_witness(memo[interval])

    def replay_witness(self,
                       spec: Spec,
                       tree: WitnessTree,
                       mode: ArithMode = INFINITE,
                       pool: Optional[Pool] = None) -> bool:
        """
        Повторно применяет правило каждого узла к корням его детей

        Args:
            spec: Спецификация
            tree: Дерево вывода
            mode: Режим арифметики
            pool: Если задан, для исключающих узлов проверяется отсутствие
                исключающего интервала в нем

        Returns:
            True, если каждый узел воспроизводится
        """
        groups = group_by_name(pool) if pool is not None else {}
        for node in _postorder(tree):
            if node.is_leaf:
                if node.children:
                    return False
                continue
            if not 0 <= node.rule < len(spec):
                return False
            rule = spec[node.rule]
            roots = [child.root for child in node.children]

            if isinstance(rule, InclusiveRule):
                if len(roots) == 1:
                    roots = roots * 2
                if len(roots) != 2 or (roots[0].name, roots[1].name) != (rule.id1, rule.id2):
                    return False
                produced = {interval for interval, _, _ in derive_inclusive(rule, roots[:1], roots[1:], mode)}
            elif isinstance(rule, ExclusiveRule):
                if len(roots) != 1 or roots[0].name != rule.id1:
                    return False
                rights = groups.get(rule.id2, [])
                produced = {interval for interval, _ in derive_exclusive(rule, roots, rights, mode)}
            else:
                return False

            if node.root not in produced:
                logger.debug(f"Witness node {node.root!r} does not replay under rule {node.rule}")
                return False
        return True

    def decide(self,
               spec: Spec,
               trace: Sequence[Event],
               target: Identifier,
               config: EvalConfig = EvalConfig()) -> Verdict:
        """
        Решает, порождается ли интервал с идентификатором ``target``

        Args:
            spec: Спецификация
            trace: Трасса событий
            target: Искомый идентификатор
            config: Настройки вычисления

        Returns:
            Verdict: Found с деревом вывода, NotFound или Unknown
        """
        result = self.evaluate_trace(spec, trace, config.with_target(target))
        return self.judge(spec, result, target, config.mode)

    def judge(self, spec: Spec, result: EvalResult, target: Identifier, mode: ArithMode = INFINITE) -> Verdict:
        """Вердикт для ``target`` по готовому результату вычисления"""
        hits = result.labeled(target)
        if hits:
            witness = self.extract_witness(result, hits[0])
            if not self.replay_witness(spec, witness, mode, result.pool):
                raise WitnessError(f"Witness for {hits[0]!r} does not replay")
            logger.info(f"Target {target} found, witness height {witness.height()}")
            return Verdict(VerdictKind.FOUND, witness, result)

        if result.saturated:
            return Verdict(VerdictKind.NOT_FOUND, result=result)
        return Verdict(VerdictKind.UNKNOWN, result=result)


# Глобальный экземпляр движка
engine = Engine()
