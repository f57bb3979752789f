"""
Input models of the reduction generators: two-counter machines and QBFs
"""
from dataclasses import dataclass
from enum import Enum
from typing import Tuple, Union


@dataclass(frozen=True)
class Inc:
    counter: int


@dataclass(frozen=True)
class Dec:
    counter: int


@dataclass(frozen=True)
class IfZero:
    counter: int
    goto: int


@dataclass(frozen=True)
class Stop:
    pass


Instruction = Union[Inc, Dec, IfZero, Stop]


@dataclass(frozen=True)
class MinskyProgram:
    lines: Tuple[Instruction, ...]

    def __len__(self) -> int:
        return len(self.lines)

    @property
    def last_line(self) -> int:
        return len(self.lines) - 1


@dataclass(frozen=True)
class MinskyRun:
    """Outcome of direct simulation"""

    halted: bool
    steps: int
    configuration: Tuple[int, int, int]   # (line, c0, c1)


class Quantifier(str, Enum):
    EXISTS = 'E'
    FORALL = 'A'


@dataclass(frozen=True)
class QBF:
    """Prenex 3-CNF formula; variables are named by primes 2, 3, 5, ...

    ``prefix`` lists (quantifier, prime) in ascending prime order; a clause
    literal is a signed prime, negative for a negated variable.
    """

    prefix: Tuple[Tuple[Quantifier, int], ...]
    clauses: Tuple[Tuple[int, int, int], ...]

    @property
    def primes(self) -> Tuple[int, ...]:
        return tuple(prime for _, prime in self.prefix)

    def __len__(self) -> int:
        return len(self.prefix)
