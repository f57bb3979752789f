"""
Команда check: фрагмент спецификации, размеры и известная сложность
"""
import argparse
import json
import logging

from src.errors import NferError, SpecValidationError
from src.routes.common import EXIT_ERROR, EXIT_OK, load_spec
from src.services.spec_analyzer import spec_analyzer
from src.services.trace_io import trace_io

logger = logging.getLogger(__name__)


def register(subparsers, parents=()) -> None:
    parser = subparsers.add_parser('check', parents=list(parents), help='Validate and classify a specification')
    parser.add_argument('--spec', required=True, help='Rule file')
    parser.add_argument('--trace', help='Trace file, adds the trace size to the report')
    parser.add_argument('--json', action='store_true', help='Print the report as one JSON object')
    parser.set_defaults(handler=handle_check)


def _yes_no(flag: bool) -> str:
    return 'yes' if flag else 'no'


def _cycle_text(cycle) -> str:
    return ' -> '.join(str(index) for index in cycle + cycle[:1])


def handle_check(args: argparse.Namespace) -> int:
    """
    Печатает отчет о фрагменте или отказ с найденным циклом

    Args:
        args: Аргументы командной строки

    Returns:
        0 для принятой спецификации, 2 при отказе или ошибке
    """
    try:
        spec = load_spec(args.spec)
        try:
            info = spec_analyzer.validate(spec)
        except SpecValidationError as e:
            logger.error(f"Specification rejected: {e}")
            if args.json:
                cycle = list(e.cycle) if e.cycle is not None else None
                print(json.dumps({'rejected': str(e), 'cycle': cycle}, indent=2))
                return EXIT_ERROR
            print(f"rejected: {e}")
            if e.cycle is not None:
                print(f"cycle: {_cycle_text(e.cycle)}")
            return EXIT_ERROR

        trace = trace_io.read_trace(args.trace) if args.trace else []
        spec_size, trace_size = spec_analyzer.size_measure(spec, trace)
        complexity = spec_analyzer.complexity_report(info)

        if args.json:
            report = {'rules': len(spec), **info.to_dict(), 'spec_size': spec_size}
            if args.trace:
                report['trace_size'] = trace_size
            report['complexity'] = complexity
            print(json.dumps(report, indent=2))
            return EXIT_OK

        print(f"rules: {len(spec)}")
        print(f"cycle-free: {_yes_no(info.cycle_free)}")
        print(f"exclusive: {_yes_no(info.has_exclusive)}")
        if info.topo_order is not None:
            print(f"topological order: {' '.join(str(index) for index in info.topo_order)}")
        if info.cycle is not None:
            print(f"cycle: {_cycle_text(info.cycle)}")

        print(f"spec size: {spec_size}")
        if args.trace:
            print(f"trace size: {trace_size}")

        for fragment, text in complexity.items():
            print(f"{fragment}: {text}")
        return EXIT_OK

    except NferError as e:
        logger.error(f"Check failed: {e}")
        return EXIT_ERROR
    except OSError as e:
        logger.error(f"Cannot access input: {e}")
        return EXIT_ERROR
    except Exception as e:
        logger.exception(f"Unexpected error during check: {e}")
        return EXIT_ERROR
