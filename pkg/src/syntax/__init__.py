"""Rule-expression language: lexer, parser, printers and evaluator."""

from syntax.evaluator import Verdict, check_rule, eval_rule
from syntax.nodes import RuleAst, format_rule, format_rule_full
from syntax.parser import parse_rule_expr

__all__ = [
    "RuleAst",
    "Verdict",
    "check_rule",
    "eval_rule",
    "format_rule",
    "format_rule_full",
    "parse_rule_expr",
]
