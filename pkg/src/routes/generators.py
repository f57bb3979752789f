import argparse
import logging
from typing import List, Optional

from src.errors import NferError
from src.models.interval import Event
from src.models.rule import Spec
from src.routes.common import EXIT_ERROR, EXIT_OK, read_text, write_text
from src.services.reductions import reductions
from src.services.spec_parser import spec_parser
from src.services.trace_io import trace_io

logger = logging.getLogger(__name__)


def register(subparsers, parents=()) -> None:
    parser = subparsers.add_parser('gen', help='Generate specification and trace pairs')
    kinds = parser.add_subparsers(dest='kind', required=True)

    minsky = kinds.add_parser('minsky', parents=list(parents), help='Two-counter machine')
    minsky.add_argument('--program', required=True, help='Program file')
    minsky.add_argument('--out', required=True, help='Output prefix')
    minsky.set_defaults(handler=handle_minsky)

    tqbf = kinds.add_parser('tqbf', parents=list(parents), help='Quantified Boolean formula')
    tqbf.add_argument('--formula', required=True, help='Formula file')
    tqbf.add_argument('--out', required=True, help='Output prefix')
    tqbf.set_defaults(handler=handle_tqbf)

    squares = kinds.add_parser('squares', parents=list(parents), help='Repeated squaring chain')
    squares.add_argument('--n', type=int, required=True, help='Chain length')
    squares.add_argument('--out', required=True, help='Output prefix')
    squares.set_defaults(handler=handle_squares)


def write_instance(prefix: str, spec: Spec, trace: List[Event], target: str, bound: Optional[int] = None) -> None:
    write_text(f"{prefix}.nfer", spec_parser.format_spec(spec))
    write_text(f"{prefix}.jsonl", trace_io.emit_trace(trace, 'json'))
    print(f"target: {target}")
    if bound is not None:
        print(f"bound: {bound}")
    logger.info(f"Wrote {prefix}.nfer ({len(spec)} rules) and {prefix}.jsonl ({len(trace)} events)")


def handle_minsky(args: argparse.Namespace) -> int:
    try:
        spec, trace, target = reductions.compile_minsky(reductions.parse_minsky(read_text(args.program)))
        write_instance(args.out, spec, trace, target)
        return EXIT_OK
    except (NferError, OSError) as e:
        logger.error(f"Cannot generate machine instance: {e}")
        return EXIT_ERROR


def handle_tqbf(args: argparse.Namespace) -> int:
    try:
        spec, trace, target, bound = reductions.compile_tqbf(reductions.parse_qbf(read_text(args.formula)))
        write_instance(args.out, spec, trace, target, bound)
        return EXIT_OK
    except (NferError, OSError) as e:
        logger.error(f"Cannot generate formula instance: {e}")
        return EXIT_ERROR


def handle_squares(args: argparse.Namespace) -> int:
    try:
        spec, trace = reductions.compile_squares(args.n)
        write_instance(args.out, spec, trace, f"e{args.n}")
        return EXIT_OK
    except (NferError, OSError) as e:
        logger.error(f"Cannot generate squaring instance: {e}")
        return EXIT_ERROR
