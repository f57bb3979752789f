"""
Модуль DSL правил: разбор через lark и печать обратно в исходный текст
"""
import logging
from typing import List, Tuple

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError

from src.errors import SpecSyntaxError
from src.models.expression import (
    TRUE,
    Binary,
    BinaryOp,
    BoolLiteral,
    Expr,
    FieldRef,
    MapPredicate,
    MapUpdate,
    NatLiteral,
    Not,
    Side,
)
from src.models.rule import ExclusiveOp, ExclusiveRule, InclusiveOp, InclusiveRule, Rule, Spec

logger = logging.getLogger(__name__)

GRAMMAR = r"""
start: rule+

rule: ID "<-" ID incl_op ID where_clause? map_clause?            -> inclusive
    | ID "<-" ID "unless" excl_op ID where_clause? map_clause?   -> exclusive

!incl_op: "before" | "meet" | "during" | "coincide" | "start" | "finish" | "overlap" | "slice"
!excl_op: "after" | "follow" | "contain"

where_clause: "where" expr
map_clause: "map" "{" (assignment ("," assignment)*)? "}"
assignment: ID ":=" expr

?expr: or_expr
?or_expr: and_expr
        | or_expr OR_OP and_expr                       -> binary
?and_expr: not_expr
         | and_expr AND_OP not_expr                    -> binary
?not_expr: comparison
         | "!" not_expr                                -> negation
?comparison: sum
           | sum COMP_OP sum                           -> binary
?sum: product
    | sum ADD_OP product                               -> binary
?product: atom
        | product MUL_OP atom                          -> binary
?atom: NAT                                             -> nat
     | "true"                                          -> true
     | "false"                                         -> false
     | SIDE "." ID                                     -> field
     | "(" expr ")"

OR_OP: "|"
AND_OP: "&"
COMP_OP: "<=" | ">=" | "<" | ">" | "="
ADD_OP: "+" | "-"
MUL_OP: "*" | "/" | "%"
SIDE: "a" | "b"
NAT: /[0-9]+/
ID: /[A-Za-z_][A-Za-z0-9_]*/
COMMENT: /#[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
"""
# Слова, которые не могут быть идентификатором интервала
KEYWORDS = frozenset(
    {op.value for op in InclusiveOp} | {op.value for op in ExclusiveOp}
    | {'unless', 'where', 'map', 'true', 'false'}
)


def _identifier(token: Token) -> str:
    if str(token) in KEYWORDS:
        raise SpecSyntaxError(f"Keyword {str(token)!r} cannot be used as an identifier", token.line, token.column)
    return str(token)


class _SpecBuilder(Transformer):
    """Превращает дерево разбора lark в неизменяемую модель правил"""

    def start(self, rules: List[Rule]) -> Spec:
        return Spec(tuple(rules))

    def inclusive(self, children) -> InclusiveRule:
        lhs, id1, op, id2, *clauses = children
        phi, psi = self._clauses(clauses)
        return InclusiveRule(_identifier(lhs), _identifier(id1), op, _identifier(id2), phi, psi)

    def exclusive(self, children) -> ExclusiveRule:
        lhs, id1, op, id2, *clauses = children
        phi, psi = self._clauses(clauses)
        return ExclusiveRule(_identifier(lhs), _identifier(id1), op, _identifier(id2), phi, psi)

    @staticmethod
    def _clauses(clauses) -> Tuple[MapPredicate, MapUpdate]:
        phi = next((clause for clause in clauses if isinstance(clause, MapPredicate)), MapPredicate())
        psi = next((clause for clause in clauses if isinstance(clause, MapUpdate)), MapUpdate())
        return phi, psi

    def incl_op(self, children) -> InclusiveOp:
        return InclusiveOp(str(children[0]))

    def excl_op(self, children) -> ExclusiveOp:
        return ExclusiveOp(str(children[0]))

    @v_args(inline=True)
    def where_clause(self, body: Expr) -> MapPredicate:
        return MapPredicate(body)

    def map_clause(self, assignments) -> MapUpdate:
        seen = set()
        for key, _ in assignments:
            if str(key) in seen:
                raise SpecSyntaxError(f"Duplicate map key {str(key)!r}", key.line, key.column)
            seen.add(str(key))
        return MapUpdate(tuple((str(key), rhs) for key, rhs in assignments))

    @v_args(inline=True)
    def assignment(self, key: Token, rhs: Expr):
        return key, rhs

    @v_args(inline=True)
    def binary(self, lhs: Expr, op: Token, rhs: Expr) -> Binary:
        return Binary(BinaryOp(str(op)), lhs, rhs)

    @v_args(inline=True)
    def negation(self, operand: Expr) -> Not:
        return Not(operand)

    @v_args(inline=True)
    def nat(self, token: Token) -> NatLiteral:
        return NatLiteral(int(token))

    def true(self, _) -> BoolLiteral:
        return BoolLiteral(True)

    def false(self, _) -> BoolLiteral:
        return BoolLiteral(False)

    @v_args(inline=True)
    def field(self, side: Token, key: Token) -> FieldRef:
        return FieldRef(Side(str(side)), str(key))


def _end_position(text: str) -> Tuple[int, int]:
    lines = text.split('\n')
    return len(lines), len(lines[-1]) + 1


class SpecParser:
    """Разбор и печать спецификаций"""

    def __init__(self):
        self.parser = Lark(GRAMMAR, parser='lalr', lexer='contextual')

    def parse_spec(self, text: str) -> Spec:
        """
        Разбирает текст правил

        Args:
            text: Исходный текст, одно правило на строку

        Returns:
            Spec с правилами в порядке исходного текста

        Raises:
            SpecSyntaxError: с номером строки и колонки
        """
        try:
            tree = self.parser.parse(text)
            spec = _SpecBuilder().transform(tree)
        except UnexpectedInput as e:
            line, column = getattr(e, 'line', -1), getattr(e, 'column', -1)
            if not isinstance(line, int) or line < 1:
                line, column = _end_position(text)
            token = getattr(e, 'token', None)
            found = f"unexpected {str(token)!r}" if token is not None and str(token) else 'unexpected input'
            if token is not None and token.type == '$END':
                found = 'unexpected end of input'
            raise SpecSyntaxError(f"Syntax error: {found}", line, column) from None
        except VisitError as e:
            if isinstance(e.orig_exc, SpecSyntaxError):
                raise e.orig_exc from None
            raise

        logger.debug(f"Parsed {len(spec)} rules")
        return spec

    def _operand(self, expr: Expr) -> str:
        text = self.format_expr(expr)
        return f"({text})" if isinstance(expr, (Binary, Not)) else text

    def format_expr(self, expr: Expr) -> str:
        """Текст выражения; вложенные операторы всегда в скобках"""
        if isinstance(expr, NatLiteral):
            return str(expr.value)
        if isinstance(expr, BoolLiteral):
            return 'true' if expr.value else 'false'
        if isinstance(expr, FieldRef):
            return f"{expr.side.value}.{expr.key}"
        if isinstance(expr, Not):
            return f"!{self._operand(expr.operand)}"
        if isinstance(expr, Binary):
            return f"{self._operand(expr.lhs)} {expr.op.value} {self._operand(expr.rhs)}"
        raise TypeError(f"Unknown expression node: {expr!r}")

    def format_rule(self, rule: Rule) -> str:
        if isinstance(rule, InclusiveRule):
            text = f"{rule.lhs} <- {rule.id1} {rule.op.value} {rule.id2}"
        else:
            text = f"{rule.lhs} <- {rule.id1} unless {rule.op.value} {rule.id2}"
        if rule.phi.body != TRUE:
            text += f" where {self.format_expr(rule.phi.body)}"
        if rule.psi.assignments:
            assignments = ', '.join(f"{key} := {self.format_expr(rhs)}" for key, rhs in rule.psi.assignments)
            text += f" map {{ {assignments} }}"
        return text

    def format_spec(self, spec: Spec) -> str:
        """
        Печатает спецификацию

        Args:
            spec: Спецификация

        Returns:
            Текст, который parse_spec разбирает обратно в ту же спецификацию
        """
        return ''.join(f"{self.format_rule(rule)}\n" for rule in spec)


# Глобальный экземпляр парсера
spec_parser = SpecParser()

parse_spec = spec_parser.parse_spec
format_expr = spec_parser.format_expr
format_rule = spec_parser.format_rule
format_spec = spec_parser.format_spec
