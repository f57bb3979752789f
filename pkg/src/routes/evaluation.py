"""
Команда eval: вычисление пула и решение задачи о цели
"""
import argparse
import json
import logging

from src.errors import ConfigurationError, NferError
from src.models.evaluation import EvalConfig, VerdictKind
from src.models.expression import INFINITE, ArithMode
from src.routes.common import (
    EXIT_ERROR,
    EXIT_NOT_FOUND,
    EXIT_OK,
    EXIT_UNKNOWN,
    load_spec,
    output_format,
    write_text,
)
from src.services.engine import engine
from src.services.trace_io import trace_io

logger = logging.getLogger(__name__)

VERDICT_EXIT_CODES = {
    VerdictKind.FOUND: EXIT_OK,
    VerdictKind.NOT_FOUND: EXIT_NOT_FOUND,
    VerdictKind.UNKNOWN: EXIT_UNKNOWN,
}


def register(subparsers, parents=()) -> None:
    parser = subparsers.add_parser('eval', parents=list(parents), help='Evaluate a specification over a trace')
    parser.add_argument('--spec', required=True, help='Rule file')
    parser.add_argument('--trace', required=True, help='Trace file (JSON-lines or CSV)')
    parser.add_argument('--bound', type=int, help='Finite data: arithmetic modulo K')
    parser.add_argument('--minimal', action='store_true', help='Apply the minimality selection')
    parser.add_argument('--fuel', type=int, help='Maximum number of iterations for cyclic specifications')
    parser.add_argument('--target', help='Decide whether an interval with this identifier is generated')
    parser.add_argument('--witness', action='store_true', help='Print the witness tree of a found target')
    parser.add_argument('--json', action='store_true', help='Print the verdict and its witness as one JSON object')
    parser.add_argument('--format', choices=['json', 'csv'], help='Output format of the pool')
    parser.add_argument('--out', help='Write the pool to this file instead of stdout')
    parser.set_defaults(handler=handle_eval)


def build_config(args: argparse.Namespace) -> EvalConfig:
    if args.bound is not None and args.bound < 1:
        raise ConfigurationError(f"Bound must be at least 1, got {args.bound}")
    if args.fuel is not None and args.fuel < 0:
        raise ConfigurationError(f"Fuel must be a natural number, got {args.fuel}")
    mode = ArithMode.modulo(args.bound) if args.bound is not None else INFINITE
    return EvalConfig(mode=mode, minimal=args.minimal, fuel=args.fuel)


def handle_eval(args: argparse.Namespace) -> int:
    """
    Печатает пул или, если задана цель, вердикт

    Args:
        args: Аргументы командной строки

    Returns:
        Код возврата: 0 для пула и Found, 1 для NotFound, 3 для Unknown, 2 при ошибке
    """
    try:
        spec = load_spec(args.spec)
        trace = trace_io.read_trace(args.trace)
        config = build_config(args)
        fmt = output_format(args.format)

        if args.target is None:
            result = engine.evaluate_trace(spec, trace, config)
            text = trace_io.emit_pool(result, fmt)
            if args.out:
                write_text(args.out, text)
            else:
                print(text, end='')
            return EXIT_OK

        if args.out:
            result = engine.evaluate_trace(spec, trace, config)
            write_text(args.out, trace_io.emit_pool(result, fmt))
            verdict = engine.judge(spec, result, args.target, config.mode)
        else:
            verdict = engine.decide(spec, trace, args.target, config)

        if args.json:
            print(json.dumps(verdict.to_dict(), indent=2))
        else:
            print(f"verdict: {verdict.kind.value}")
            if args.witness and verdict.witness is not None:
                print(trace_io.render_witness(verdict.witness))
        return VERDICT_EXIT_CODES[verdict.kind]

    except NferError as e:
        logger.error(f"Evaluation failed: {e}")
        return EXIT_ERROR
    except OSError as e:
        logger.error(f"Cannot access input: {e}")
        return EXIT_ERROR
    except Exception as e:
        logger.exception(f"Unexpected error during evaluation: {e}")
        return EXIT_ERROR
