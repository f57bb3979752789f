from dataclasses import dataclass, field
from typing import AbstractSet, Dict, FrozenSet, Iterable, List, Sequence, Tuple

from src.models.base import EMPTY_MAP, Identifier, ValueMap, make_identifier


@dataclass(frozen=True, slots=True)
class Event:
    name: Identifier
    time: int
    map: ValueMap = field(default=EMPTY_MAP)

    def __post_init__(self):
        make_identifier(self.name)
        if type(self.time) is not int or self.time < 0:
            raise ValueError(f"Event time must be a natural number, got {self.time!r}")

    def to_dict(self) -> Dict:
        return {'name': self.name, 'time': self.time, 'data': self.map.to_dict()}


@dataclass(frozen=True, slots=True)
class Interval:
    name: Identifier
    start: int
    end: int
    map: ValueMap = field(default=EMPTY_MAP)

    def __post_init__(self):
        if self.start < 0 or self.start > self.end:
            raise ValueError(f"Invalid interval bounds [{self.start}, {self.end}] for {self.name}")

    @property
    def key(self) -> Tuple:
        """Canonical enumeration key"""
        return (self.start, self.end, self.name, self.map.entries)

    def to_dict(self) -> Dict:
        return {'name': self.name, 'start': self.start, 'end': self.end, 'data': self.map.to_dict()}

    def __repr__(self) -> str:
        return f"({self.name}, {self.start}, {self.end}, {self.map!r})"


Trace = Sequence[Event]
Pool = FrozenSet[Interval]


def init_pool(trace: Iterable[Event]) -> Pool:
    """Turn every event into a zero-duration interval"""
    return frozenset(Interval(event.name, event.time, event.time, event.map) for event in trace)


def canonical_order(pool: AbstractSet[Interval]) -> List[Interval]:
    return sorted(pool, key=lambda interval: interval.key)


def timestamps(trace: Iterable[Event]) -> FrozenSet[int]:
    return frozenset(event.time for event in trace)
