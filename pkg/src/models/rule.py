from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Iterator, Tuple, Union

from src.models.base import Identifier
from src.models.expression import ALWAYS, EMPTY_UPDATE, MapPredicate, MapUpdate


class InclusiveOp(str, Enum):
    BEFORE = 'before'
    MEET = 'meet'
    DURING = 'during'
    COINCIDE = 'coincide'
    START = 'start'
    FINISH = 'finish'
    OVERLAP = 'overlap'
    SLICE = 'slice'


class ExclusiveOp(str, Enum):
    AFTER = 'after'
    FOLLOW = 'follow'
    CONTAIN = 'contain'


@dataclass(frozen=True, slots=True)
class InclusiveRule:
    """lhs <- id1 op id2 where phi map psi"""

    lhs: Identifier
    id1: Identifier
    op: InclusiveOp
    id2: Identifier
    phi: MapPredicate = field(default=ALWAYS)
    psi: MapUpdate = field(default=EMPTY_UPDATE)

    @property
    def consumes(self) -> FrozenSet[Identifier]:
        return frozenset((self.id1, self.id2))


@dataclass(frozen=True, slots=True)
class ExclusiveRule:
    """lhs <- id1 unless op id2 where phi map psi

    Includes ``id1`` and excludes ``id2``; ``psi`` sees an empty right map.
    """

    lhs: Identifier
    id1: Identifier
    op: ExclusiveOp
    id2: Identifier
    phi: MapPredicate = field(default=ALWAYS)
    psi: MapUpdate = field(default=EMPTY_UPDATE)

    @property
    def consumes(self) -> FrozenSet[Identifier]:
        return frozenset((self.id1, self.id2))


Rule = Union[InclusiveRule, ExclusiveRule]


@dataclass(frozen=True, slots=True)
class Spec:
    """Ordered list of rules"""

    rules: Tuple[Rule, ...] = ()

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __getitem__(self, index: int) -> Rule:
        return self.rules[index]

    def identifiers(self) -> FrozenSet[Identifier]:
        names = set()
        for rule in self.rules:
            names.update((rule.lhs, rule.id1, rule.id2))
        return frozenset(names)


@dataclass(frozen=True, slots=True)
class MatchWindow:
    start: int
    end: int
