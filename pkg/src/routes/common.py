"""
Общие функции команд: коды возврата, чтение файлов и формат вывода
"""
import logging
import os
from typing import Optional

from src.errors import ConfigurationError
from src.models.rule import Spec
from src.services.spec_parser import spec_parser
from src.services.trace_io import FORMATS

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_FOUND = 1
EXIT_ERROR = 2
EXIT_UNKNOWN = 3


def read_text(path: str) -> str:
    with open(path, 'r', encoding='utf-8') as handle:
        return handle.read()


def write_text(path: str, text: str) -> None:
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        handle.write(text)


def load_spec(path: str) -> Spec:
    spec = spec_parser.parse_spec(read_text(path))
    logger.debug(f"Loaded {len(spec)} rules from {path}")
    return spec


def output_format(requested: Optional[str] = None) -> str:
    fmt = requested or os.getenv('NFER_DEFAULT_FORMAT', 'json')
    if fmt not in FORMATS:
        raise ConfigurationError(f"Unknown output format {fmt!r}, expected one of {', '.join(FORMATS)}")
    return fmt
