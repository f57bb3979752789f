"""
Базовые типы данных: идентификаторы, значения и карты значений
"""
import sys
from dataclasses import dataclass
from enum import IntEnum
from typing import Dict, Iterator, Mapping, Optional, Tuple, Union

Identifier = str
Value = Union[bool, int]

# Порядок тегов задает и порядок между типами: Bool < Nat
BOOL_TAG = 0
NAT_TAG = 1

Entry = Tuple[str, int, int]


class Ordering(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def make_identifier(name: str) -> Identifier:
    """Проверяет и интернирует имя идентификатора"""
    if not isinstance(name, str) or not name or any(ch.isspace() for ch in name):
        raise ValueError(f"Invalid identifier: {name!r}")
    return sys.intern(name)


def is_bool(value: object) -> bool:
    return type(value) is bool


def is_nat(value: object) -> bool:
    return type(value) is int and value >= 0


def bit_length(n: int) -> int:
    """Длина двоичной записи; 0 и 1 занимают один бит"""
    return max(1, int(n).bit_length())


def value_size(value: Value) -> int:
    return 1 if is_bool(value) else bit_length(value)


def format_value(value: Value) -> str:
    if is_bool(value):
        return 'true' if value else 'false'
    return str(value)


def _entry(key: str, value: Value) -> Entry:
    if is_bool(value):
        return (key, BOOL_TAG, int(value))
    if is_nat(value):
        return (key, NAT_TAG, value)
    raise ValueError(f"Map value for {key!r} must be a natural number or a Boolean, got {value!r}")


@dataclass(frozen=True, slots=True)
class ValueMap:
    """Конечное частичное отображение идентификаторов в натуральные числа и булевы значения.

    Записи отсортированы по ключу и помечены типом: равенство не путает
    ``True`` с ``1``, а сам кортеж служит канонической записью и ключом
    порядка карт.
    """

    entries: Tuple[Entry, ...] = ()

    @classmethod
    def of(cls, data: Optional[Mapping[str, Value]] = None, **kwargs: Value) -> 'ValueMap':
        merged: Dict[str, Value] = dict(data or {})
        merged.update(kwargs)
        return cls(tuple(_entry(make_identifier(key), merged[key]) for key in sorted(merged)))

    def get(self, key: str) -> Optional[Value]:
        for name, tag, raw in self.entries:
            if name == key:
                return bool(raw) if tag == BOOL_TAG else raw
        return None

    def __contains__(self, key: str) -> bool:
        return any(name == key for name, _, _ in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def keys(self) -> Tuple[str, ...]:
        return tuple(name for name, _, _ in self.entries)

    def items(self) -> Iterator[Tuple[str, Value]]:
        for name, tag, raw in self.entries:
            yield name, (bool(raw) if tag == BOOL_TAG else raw)

    def to_dict(self) -> Dict[str, Value]:
        return dict(self.items())

    def reduce_mod(self, k: int) -> 'ValueMap':
        return ValueMap(tuple(
            (name, tag, raw % k if tag == NAT_TAG else raw) for name, tag, raw in self.entries
        ))

    def __repr__(self) -> str:
        inner = ', '.join(f"{key}: {format_value(value)}" for key, value in self.items())
        return '{' + inner + '}'


EMPTY_MAP = ValueMap()


def map_order(a: ValueMap, b: ValueMap) -> Ordering:
    """Полный порядок на картах.

    Записи сравниваются попарно: сначала имя ключа, затем значение, где
    Bool < Nat, false < true, а числа по величине. Строгий префикс меньше.
    """
    if a.entries == b.entries:
        return Ordering.EQUAL
    return Ordering.LESS if a.entries < b.entries else Ordering.GREATER
