"""
Exceptions raised across the nfer package
"""
from typing import Optional, Sequence, Tuple


class NferError(Exception):
    """Base class for every error the package reports to callers"""


class SpecSyntaxError(NferError):
    """Positioned error in the rule DSL"""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class TraceFormatError(NferError):
    """Malformed trace input"""

    def __init__(self, message: str, line: int):
        super().__init__(f"{message} (line {line})")
        self.line = line


class SpecValidationError(NferError):
    """A specification the engine refuses to evaluate"""

    def __init__(self, message: str, rule_indices: Sequence[int] = (), cycle: Optional[Sequence[int]] = None):
        super().__init__(message)
        self.rule_indices: Tuple[int, ...] = tuple(rule_indices)
        self.cycle: Optional[Tuple[int, ...]] = tuple(cycle) if cycle is not None else None


class ConfigurationError(NferError):
    """Evaluation settings that cannot be honoured"""


class ReductionInputError(NferError):
    """Malformed Minsky program or quantified Boolean formula"""

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"{message} (line {line})" if line is not None else message)
        self.line = line


class WitnessError(NferError):
    """Witness extraction or replay failed"""
