"""
Модуль ввода-вывода трасс: чтение событий и вывод пула в JSON-lines и CSV
"""
import io
import json
import logging
import os
import re
from typing import Dict, Iterable, List, Optional

import pandas as pd

from src.errors import TraceFormatError
from src.models.base import Value, ValueMap, format_value
from src.models.evaluation import EvalResult, WitnessTree
from src.models.interval import Event, Interval, canonical_order

logger = logging.getLogger(__name__)

FORMATS = ('json', 'csv')
TRACE_COLUMNS = ['name', 'time', 'data']
POOL_COLUMNS = ['name', 'start', 'end', 'data']

_NATURAL = re.compile(r'[0-9]+')
_INTEGER = re.compile(r'-[0-9]+')


def _check_format(fmt: str) -> str:
    if fmt not in FORMATS:
        raise ValueError(f"Unknown format {fmt!r}, expected one of {', '.join(FORMATS)}")
    return fmt


def _json_value(key: str, value: object, line: int) -> Value:
    if type(value) is bool:
        return value
    if type(value) is int:
        if value < 0:
            raise TraceFormatError(f"Negative value for {key!r}", line)
        return value
    raise TraceFormatError(f"Value for {key!r} must be a natural number or a Boolean, got {value!r}", line)


def _make_event(name: str, time: int, values: Dict[str, Value], line: int) -> Event:
    try:
        return Event(name, time, ValueMap.of(values))
    except ValueError as e:
        raise TraceFormatError(str(e), line) from None


def _csv_number(text: str, what: str, line: int) -> int:
    if _NATURAL.fullmatch(text):
        return int(text)
    if _INTEGER.fullmatch(text):
        raise TraceFormatError(f"Negative {what} {text}", line)
    raise TraceFormatError(f"{what.capitalize()} must be a natural number, got {text!r}", line)


def _json_line(record: Dict) -> str:
    return json.dumps(record, separators=(',', ':'))


def _csv_text(rows: List[List[object]], columns: List[str]) -> str:
    frame = pd.DataFrame(rows, columns=columns, dtype=object)
    return frame.to_csv(index=False, lineterminator='\n')


class TraceIO:
    """Кодек трасс и пулов интервалов"""

    def detect_format(self, path: Optional[str], text: str) -> str:
        """Формат по расширению файла, иначе по первому символу"""
        if path:
            extension = os.path.splitext(path)[1].lower()
            if extension == '.csv':
                return 'csv'
            if extension in ('.jsonl', '.json'):
                return 'json'
        stripped = text.lstrip()
        return 'json' if stripped.startswith('{') else 'csv'

    def _json_event(self, raw: str, line: int) -> Event:
        try:
            record = json.loads(raw)
        except json.JSONDecodeError as e:
            raise TraceFormatError(f"Malformed JSON: {e.msg}", line) from None
        if not isinstance(record, dict):
            raise TraceFormatError("Each line must hold a JSON object", line)

        name, time, data = record.get('name'), record.get('time'), record.get('data', {})
        if not isinstance(name, str):
            raise TraceFormatError("Field 'name' must be a string", line)
        if type(time) is not int:
            raise TraceFormatError(f"Field 'time' must be an integer, got {time!r}", line)
        if time < 0:
            raise TraceFormatError(f"Negative time {time}", line)
        if not isinstance(data, dict):
            raise TraceFormatError("Field 'data' must be an object", line)

        values = {key: _json_value(key, value, line) for key, value in data.items()}
        return _make_event(name, time, values, line)

    def parse_data_cell(self, cell: str, line: int) -> Dict[str, Value]:
        """Ячейка ``key=value;...`` со значениями-натуральными числами и true/false"""
        values: Dict[str, Value] = {}
        if not cell.strip():
            return values
        for pair in cell.split(';'):
            key, sep, raw = pair.partition('=')
            key, raw = key.strip(), raw.strip()
            if not sep or not key:
                raise TraceFormatError(f"Malformed data pair {pair!r}", line)
            if key in values:
                raise TraceFormatError(f"Duplicate data key {key!r}", line)
            if raw in ('true', 'false'):
                values[key] = raw == 'true'
            else:
                values[key] = _csv_number(raw, f"value for {key!r}", line)
        return values

    def _parse_csv(self, text: str) -> List[Event]:
        try:
            frame = pd.read_csv(
                io.StringIO(text),
                header=None,
                names=TRACE_COLUMNS,
                dtype=str,
                keep_default_na=False,
                skip_blank_lines=False,
            ).fillna('')
        except pd.errors.ParserError as e:
            found = re.search(r'line (\d+)', str(e))
            raise TraceFormatError(f"Malformed CSV: {e}", int(found.group(1)) if found else 1) from None

        # Лишние поля первой строки pandas превращает в неявный индекс
        if not isinstance(frame.index, pd.RangeIndex):
            raise TraceFormatError(f"Expected {len(TRACE_COLUMNS)} fields, found more", 1)

        events = []
        for index, row in enumerate(frame.itertuples(index=False)):
            line = index + 1
            name, time, data = (cell.strip() for cell in row)
            if not name and not time and not data:
                continue
            if line == 1 and [name, time, data] == TRACE_COLUMNS:
                continue
            if not name:
                raise TraceFormatError("Missing event name", line)
            events.append(_make_event(name, _csv_number(time, 'time', line), self.parse_data_cell(data, line), line))
        return events

    def parse_trace(self, text: str, fmt: str = 'json') -> List[Event]:
        """
        Разбирает текст трассы

        Args:
            text: Содержимое файла
            fmt: 'json' (JSON-lines) или 'csv' (name,time,data)

        Returns:
            Список событий в порядке файла

        Raises:
            TraceFormatError: с номером строки
        """
        if _check_format(fmt) == 'csv':
            events = [] if not text.strip() else self._parse_csv(text)
        else:
            events = [
                self._json_event(raw, line)
                for line, raw in enumerate(text.splitlines(), start=1)
                if raw.strip()
            ]
        logger.debug(f"Parsed {len(events)} events ({fmt})")
        return events

    def read_trace(self, path: str, fmt: Optional[str] = None) -> List[Event]:
        """
        Читает трассу из файла

        Args:
            path: Путь к файлу
            fmt: Формат; если не задан, определяется автоматически

        Returns:
            Список событий
        """
        with open(path, 'r', encoding='utf-8') as handle:
            text = handle.read()
        return self.parse_trace(text, fmt or self.detect_format(path, text))

    def format_data_cell(self, data: ValueMap) -> str:
        return ';'.join(f"{key}={format_value(value)}" for key, value in data.items())

    def format_intervals(self, intervals: Iterable[Interval], fmt: str = 'json') -> str:
        ordered = canonical_order(frozenset(intervals))
        if _check_format(fmt) == 'json':
            return ''.join(f"{_json_line(interval.to_dict())}\n" for interval in ordered)
        rows = [[i.name, i.start, i.end, self.format_data_cell(i.map)] for i in ordered]
        return _csv_text(rows, POOL_COLUMNS)

    def emit_pool(self, result: EvalResult, fmt: str = 'json') -> str:
        """
        Выводит пул в каноническом порядке, сводка идет в лог

        Args:
            result: Результат вычисления
            fmt: 'json' или 'csv'

        Returns:
            Текст пула
        """
        text = self.format_intervals(result.pool, fmt)
        summary = result.summary()
        logger.info(
            f"iterations={summary['iterations']} saturated={str(summary['saturated']).lower()} "
            f"pool_size={summary['pool_size']}"
        )
        return text

    def emit_trace(self, trace: Iterable[Event], fmt: str = 'json') -> str:
        events = list(trace)
        if _check_format(fmt) == 'json':
            return ''.join(f"{_json_line(event.to_dict())}\n" for event in events)
        rows = [[event.name, event.time, self.format_data_cell(event.map)] for event in events]
        return _csv_text(rows, TRACE_COLUMNS)

    def render_witness(self, tree: WitnessTree) -> str:
        return json.dumps(tree.to_dict(), indent=2)


# Глобальный экземпляр кодека трасс
trace_io = TraceIO()

detect_format = trace_io.detect_format
parse_data_cell = trace_io.parse_data_cell
parse_trace = trace_io.parse_trace
read_trace = trace_io.read_trace
format_data_cell = trace_io.format_data_cell
format_intervals = trace_io.format_intervals
emit_pool = trace_io.emit_pool
emit_trace = trace_io.emit_trace
render_witness = trace_io.render_witness
