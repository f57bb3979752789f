"""
Модуль генераторов экземпляров: двухсчетчиковые машины, формулы QBF и
повторное возведение в квадрат, переведенные в правила, плюс переборные
оракулы для проверки.

Каждое порождаемое правило - coincide-соединение идентификатора с самим
собой: все интервалы имеют отметки (0, 0), а условие where связывает
``a`` и ``b`` с одним и тем же интервалом.
"""
import logging
import random
from functools import reduce
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.errors import ReductionInputError
from src.models.base import ValueMap
from src.models.expression import (
    Binary,
    BinaryOp,
    Expr,
    FieldRef,
    MapPredicate,
    MapUpdate,
    NatLiteral,
    Side,
)
from src.models.interval import Event
from src.models.reduction import QBF, Dec, IfZero, Inc, Instruction, MinskyProgram, MinskyRun, Quantifier, Stop
from src.models.rule import InclusiveOp, InclusiveRule, Spec

logger = logging.getLogger(__name__)

COUNTERS = ('c0', 'c1')
QBF_ORACLE_LIMIT = 12


def _a(key: str) -> FieldRef:
    return FieldRef(Side.LEFT, key)


def _b(key: str) -> FieldRef:
    return FieldRef(Side.RIGHT, key)


def _op(op: BinaryOp, lhs: Expr, rhs: Expr) -> Binary:
    return Binary(op, lhs, rhs)


def _all(terms: Sequence[Expr]) -> Expr:
    return reduce(lambda acc, term: _op(BinaryOp.AND, acc, term), terms[1:], terms[0])


def _self_join(lhs: str, source: str, guards: Sequence[Expr], update: Dict[str, Expr]) -> InclusiveRule:
    return InclusiveRule(
        lhs, source, InclusiveOp.COINCIDE, source,
        MapPredicate(_all(list(guards))),
        MapUpdate(tuple(update.items())),
    )


def _literal_guard(literal: int) -> Expr:
    residue = _op(BinaryOp.MOD, _a('s'), NatLiteral(abs(literal)))
    if literal > 0:
        return _op(BinaryOp.EQ, residue, NatLiteral(0))
    return _op(BinaryOp.GT, residue, NatLiteral(0))


def line_id(line: int) -> str:
    return f"L{line}"


class Reductions:
    """Компилятор внешних задач в спецификации nfer"""

    # --- двухсчетчиковые машины ---------------------------------------------

    def parse_minsky(self, text: str) -> MinskyProgram:
        """
        Разбирает программу машины Минского

        Args:
            text: По одной инструкции на строку: ``inc C``, ``dec C``,
                ``ifzero C goto N``, ``stop``; ``#`` начинает комментарий

        Returns:
            MinskyProgram

        Raises:
            ReductionInputError: с номером строки
        """
        lines: List[Instruction] = []
        positions: List[int] = []
        for number, raw in enumerate(text.splitlines(), start=1):
            words = raw.split('#', 1)[0].lower().split()
            if not words:
                continue
            try:
                if words[0] in ('inc', 'dec') and len(words) == 2:
                    counter = int(words[1])
                    instruction = Inc(counter) if words[0] == 'inc' else Dec(counter)
                elif words[0] == 'ifzero' and len(words) == 4 and words[2] == 'goto':
                    instruction = IfZero(int(words[1]), int(words[3]))
                elif words == ['stop']:
                    instruction = Stop()
                else:
                    raise ReductionInputError(f"Unknown instruction {raw.strip()!r}", number)
            except ValueError:
                raise ReductionInputError(f"Malformed number in {raw.strip()!r}", number) from None
            lines.append(instruction)
            positions.append(number)

        program = MinskyProgram(tuple(lines))
        self.validate_minsky(program, positions)
        return program

    def validate_minsky(self, program: MinskyProgram, positions: Optional[Sequence[int]] = None) -> None:
        if not program.lines:
            raise ReductionInputError("Empty program")
        for index, instruction in enumerate(program.lines):
            line = positions[index] if positions else None
            if isinstance(instruction, (Inc, Dec, IfZero)) and instruction.counter not in (0, 1):
                raise ReductionInputError(f"Counter must be 0 or 1, got {instruction.counter}", line)
            if isinstance(instruction, IfZero) and not 0 <= instruction.goto < len(program):
                raise ReductionInputError(f"Jump target {instruction.goto} out of range", line)
        if not isinstance(program.lines[-1], Stop):
            raise ReductionInputError("The last line must be stop", positions[-1] if positions else None)

    def compile_minsky(self, program: MinskyProgram) -> Tuple[Spec, List[Event], str]:
        """
        Переводит машину в правила; конфигурация - интервал (L<строка>, 0, 0, {c0, c1})

        Args:
            program: Проверенная программа

        Returns:
            Кортеж (спецификация, трасса из одной начальной конфигурации,
            идентификатор последней строки)
        """
        self.validate_minsky(program)
        rules: List[InclusiveRule] = []
        copy = {key: _a(key) for key in COUNTERS}

        for line, instruction in enumerate(program.lines):
            source, following = line_id(line), line_id(line + 1)
            same = [_op(BinaryOp.EQ, _a(key), _b(key)) for key in COUNTERS]

            if isinstance(instruction, Inc):
                key = COUNTERS[instruction.counter]
                rules.append(_self_join(
                    following, source, same, {**copy, key: _op(BinaryOp.ADD, _a(key), NatLiteral(1))}
                ))
            elif isinstance(instruction, Dec):
                key = COUNTERS[instruction.counter]
                positive = _op(BinaryOp.GT, _a(key), NatLiteral(0))
                zero = _op(BinaryOp.EQ, _a(key), NatLiteral(0))
                rules.append(_self_join(
                    following, source, same + [positive], {**copy, key: _op(BinaryOp.SUB, _a(key), NatLiteral(1))}
                ))
                rules.append(_self_join(following, source, same + [zero], copy))
            elif isinstance(instruction, IfZero):
                key = COUNTERS[instruction.counter]
                zero = _op(BinaryOp.EQ, _a(key), NatLiteral(0))
                positive = _op(BinaryOp.GT, _a(key), NatLiteral(0))
                rules.append(_self_join(line_id(instruction.goto), source, same + [zero], copy))
                rules.append(_self_join(following, source, same + [positive], copy))
            elif line != program.last_line:
                # stop до последней строки переходит на единственную цель
                rules.append(_self_join(line_id(program.last_line), source, same, copy))

        trace = [Event(line_id(0), 0, ValueMap.of(c0=0, c1=0))]
        target = line_id(program.last_line)
        logger.info(f"Compiled {len(program)}-line machine into {len(rules)} rules, target {target}")
        return Spec(tuple(rules)), trace, target

    def minsky_oracle(self, program: MinskyProgram, step_limit: int) -> MinskyRun:
        """Прямая симуляция из (0, 0, 0) не более ``step_limit`` шагов"""
        line, counters = 0, [0, 0]
        for steps in range(step_limit + 1):
            instruction = program.lines[line]
            if isinstance(instruction, Stop):
                return MinskyRun(True, steps, (line, counters[0], counters[1]))
            if steps == step_limit:
                break
            if isinstance(instruction, Inc):
                counters[instruction.counter] += 1
                line += 1
            elif isinstance(instruction, Dec):
                counters[instruction.counter] = max(0, counters[instruction.counter] - 1)
                line += 1
            else:
                line = instruction.goto if counters[instruction.counter] == 0 else line + 1
        return MinskyRun(False, step_limit, (line, counters[0], counters[1]))

    def random_minsky(self, rng: random.Random, length: int) -> MinskyProgram:
        lines: List[Instruction] = []
        for _ in range(length - 1):
            kind = rng.choice(('inc', 'dec', 'ifzero'))
            counter = rng.randrange(2)
            if kind == 'inc':
                lines.append(Inc(counter))
            elif kind == 'dec':
                lines.append(Dec(counter))
            else:
                lines.append(IfZero(counter, rng.randrange(length)))
        lines.append(Stop())
        return MinskyProgram(tuple(lines))

    # --- формулы QBF --------------------------------------------------------

    def first_primes(self, n: int) -> List[int]:
        """Первые ``n`` простых чисел решетом"""
        if n <= 0:
            return []
        limit = 16
        while True:
            sieve = np.ones(limit + 1, dtype=bool)
            sieve[:2] = False
            for p in range(2, int(limit ** 0.5) + 1):
                if sieve[p]:
                    sieve[p * p::p] = False
            primes = np.flatnonzero(sieve)
            if len(primes) >= n:
                return [int(p) for p in primes[:n]]
            limit *= 2

    def parse_qbf(self, text: str) -> QBF:
        """
        Разбирает формулу в предваренной 3-КНФ

        Args:
            text: Строка префикса ``E 2 A 3 ...``, затем дизъюнкты из трех
                простых чисел со знаком

        Returns:
            QBF

        Raises:
            ReductionInputError: с номером строки, если он известен
        """
        rows = [
            (number, raw.split('#', 1)[0].split())
            for number, raw in enumerate(text.splitlines(), start=1)
        ]
        rows = [(number, words) for number, words in rows if words]
        if not rows:
            raise ReductionInputError("Missing quantifier prefix")

        number, words = rows[0]
        if len(words) % 2:
            raise ReductionInputError("Prefix must list quantifier and prime pairs", number)
        prefix = []
        for letter, prime in zip(words[::2], words[1::2]):
            try:
                prefix.append((Quantifier(letter.upper()), int(prime)))
            except ValueError:
                raise ReductionInputError(f"Malformed prefix entry {letter} {prime}", number) from None

        clauses = []
        for number, words in rows[1:]:
            if len(words) != 3:
                raise ReductionInputError(f"Clause must have exactly 3 literals, got {len(words)}", number)
            try:
                clauses.append(tuple(int(word) for word in words))
            except ValueError:
                raise ReductionInputError(f"Malformed literal in {' '.join(words)}", number) from None

        formula = QBF(tuple(prefix), tuple(clauses))
        self.validate_qbf(formula)
        return formula

    def validate_qbf(self, formula: QBF) -> None:
        if not formula.prefix:
            raise ReductionInputError("Formula needs at least one variable")
        if list(formula.primes) != self.first_primes(len(formula)):
            raise ReductionInputError(f"Variables must be the first {len(formula)} primes in ascending order")
        for clause in formula.clauses:
            if len(clause) != 3:
                raise ReductionInputError(f"Clause {clause} must have exactly 3 literals")
            for literal in clause:
                if abs(literal) not in formula.primes:
                    raise ReductionInputError(f"Literal {literal} uses an unquantified variable")

    def valuation_bound(self, formula: QBF) -> int:
        return 1 + reduce(lambda acc, p: acc * p, formula.primes, 1)

    def compile_tqbf(self, formula: QBF) -> Tuple[Spec, List[Event], str, int]:
        """
        Переводит формулу в ациклические правила

        Args:
            formula: Проверенная формула

        Returns:
            Кортеж (спецификация, трасса, цель 'C0', модуль k); интервал
            (C0, 0, 0, {s: 1}) порождается в режиме Modulo(k) тогда и только
            тогда, когда формула истинна
        """
        self.validate_qbf(formula)
        n = len(formula)
        same = _op(BinaryOp.EQ, _a('s'), _b('s'))
        keep = {'s': _a('s')}
        rules: List[InclusiveRule] = []

        for j, prime in enumerate(formula.primes, start=1):
            p = NatLiteral(prime)
            rules.append(_self_join(f"G{j}", f"G{j - 1}", [same], {'s': _op(BinaryOp.MUL, _a('s'), p)}))
            rules.append(_self_join(f"G{j}", f"G{j - 1}", [same], keep))

        matrix = [
            reduce(lambda acc, guard: _op(BinaryOp.OR, acc, guard), [_literal_guard(lit) for lit in clause[1:]],
                   _literal_guard(clause[0]))
            for clause in formula.clauses
        ]
        rules.append(_self_join(f"C{n}", f"G{n}", [same] + matrix, keep))

        for j in range(n, 0, -1):
            quantifier, prime = formula.prefix[j - 1]
            p = NatLiteral(prime)
            absent = _op(BinaryOp.GT, _op(BinaryOp.MOD, _a('s'), p), NatLiteral(0))
            present = _op(BinaryOp.EQ, _op(BinaryOp.MOD, _a('s'), p), NatLiteral(0))
            if quantifier is Quantifier.EXISTS:
                rules.append(_self_join(f"C{j - 1}", f"C{j}", [same, absent], keep))
                rules.append(_self_join(f"C{j - 1}", f"C{j}", [same, present], {'s': _op(BinaryOp.DIV, _a('s'), p)}))
            else:
                paired = _op(BinaryOp.EQ, _op(BinaryOp.MUL, _a('s'), p), _b('s'))
                rules.append(_self_join(f"C{j - 1}", f"C{j}", [paired, absent], keep))

        bound = self.valuation_bound(formula)
        trace = [Event('G0', 0, ValueMap.of(s=1))]
        logger.info(f"Compiled {n}-variable formula into {len(rules)} rules, bound {bound}")
        return Spec(tuple(rules)), trace, 'C0', bound

    def qbf_oracle(self, formula: QBF) -> bool:
        """Перебор таблицы истинности по префиксу кванторов"""
        if len(formula) > QBF_ORACLE_LIMIT:
            raise ReductionInputError(
                f"Formula too large to enumerate ({len(formula)} > {QBF_ORACLE_LIMIT} variables)"
            )

        def satisfied(valuation: Dict[int, bool]) -> bool:
            return all(
                any(valuation[abs(literal)] == (literal > 0) for literal in clause)
                for clause in formula.clauses
            )

        def evaluate(index: int, valuation: Dict[int, bool]) -> bool:
            if index == len(formula):
                return satisfied(valuation)
            quantifier, prime = formula.prefix[index]
            branches = (evaluate(index + 1, {**valuation, prime: value}) for value in (False, True))
            return any(branches) if quantifier is Quantifier.EXISTS else all(branches)

        return evaluate(0, {})

    def random_qbf(self, rng: random.Random, variables: int, clauses: int) -> QBF:
        primes = self.first_primes(variables)
        prefix = tuple((rng.choice(list(Quantifier)), prime) for prime in primes)
        matrix = tuple(
            tuple(rng.choice(primes) * rng.choice((1, -1)) for _ in range(3))
            for _ in range(clauses)
        )
        return QBF(prefix, matrix)

    def format_qbf(self, formula: QBF) -> str:
        prefix = ' '.join(f"{quantifier.value} {prime}" for quantifier, prime in formula.prefix)
        lines = [prefix] + [' '.join(map(str, clause)) for clause in formula.clauses]
        return ''.join(f"{line}\n" for line in lines)

    # --- повторное возведение в квадрат ---------------------------------------

    def compile_squares(self, n: int) -> Tuple[Spec, List[Event]]:
        """
        Цепочка e0 -> ... -> en, возводящая ``d`` в квадрат начиная с d = 2

        Args:
            n: Длина цепочки

        Returns:
            Кортеж (спецификация из n правил, трасса из одного события e0)
        """
        if n < 0:
            raise ReductionInputError(f"n must be a natural number, got {n}")
        same = _op(BinaryOp.EQ, _a('d'), _b('d'))
        rules = [
            _self_join(f"e{j}", f"e{j - 1}", [same], {'d': _op(BinaryOp.MUL, _a('d'), _a('d'))})
            for j in range(1, n + 1)
        ]
        return Spec(tuple(rules)), [Event('e0', 0, ValueMap.of(d=2))]


# Глобальный экземпляр генератора
reductions = Reductions()

parse_minsky = reductions.parse_minsky
validate_minsky = reductions.validate_minsky
compile_minsky = reductions.compile_minsky
minsky_oracle = reductions.minsky_oracle
random_minsky = reductions.random_minsky
first_primes = reductions.first_primes
parse_qbf = reductions.parse_qbf
validate_qbf = reductions.validate_qbf
valuation_bound = reductions.valuation_bound
compile_tqbf = reductions.compile_tqbf
qbf_oracle = reductions.qbf_oracle
random_qbf = reductions.random_qbf
format_qbf = reductions.format_qbf
compile_squares = reductions.compile_squares
