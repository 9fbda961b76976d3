"""
Recursive-descent parser for rule expressions.

Precedence, tightest first: unary (not, -) > * / > + - > comparisons > and > or.
Every binary level is left-associative.
"""

from core.errors import RuleSyntaxError
from syntax.lexer import Token, TokenKind, tokenize, unquote
from syntax.nodes import (
    Aggregate,
    Binary,
    ColumnRef,
    Literal,
    LiteralKind,
    RuleAst,
    Unary,
)

# Binary levels from loosest to tightest; each entry lists the operators of one level
_LEVELS: list[frozenset[str]] = [
    frozenset({"or"}),
    frozenset({"and"}),
    frozenset({"==", "!=", "<", "<=", ">", ">="}),
    frozenset({"+", "-"}),
    frozenset({"*", "/"}),
]

AGGREGATE_FUNCS = frozenset({"sum"})


def parse_rule_expr(source: str) -> RuleAst:
    """Parse rule-expression source into a tree.

    Raises:
        RuleSyntaxError: lexical or parse error, with the offending position.
    """
    return _Parser(source).parse()


def _column_ref(text: str) -> ColumnRef:
    if "." in text:
        table, name = text.split(".", 1)
        return ColumnRef(name=name, table=table)
    return ColumnRef(name=text)


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = tokenize(source)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def _advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def _error(self, message: str, token: Token | None = None) -> RuleSyntaxError:
        token = token or self.current
        return RuleSyntaxError(message, self.source, token.position)

    def _expect(self, kind: TokenKind, what: str) -> Token:
        if self.current.kind is not kind:
            found = self.current.text or "end of input"
            raise self._error(f"Expected {what}, found {found!r}")
        return self._advance()

    def _is_operator(self, token: Token, ops: frozenset[str]) -> bool:
        return token.kind in (TokenKind.OPERATOR, TokenKind.KEYWORD) and token.text in ops

    def parse(self) -> RuleAst:
        if self.current.kind is TokenKind.END:
            raise self._error("Empty expression")
        node = self._binary(0)
        if self.current.kind is not TokenKind.END:
            raise self._error(f"Unexpected {self.current.text!r}")
        return node

    def _binary(self, level: int) -> RuleAst:
        if level == len(_LEVELS):
            return self._unary()
        ops = _LEVELS[level]
        left = self._binary(level + 1)
        while self._is_operator(self.current, ops):
            op = self._advance().text
            right = self._binary(level + 1)
            left = Binary(op, left, right)
        return left

    def _unary(self) -> RuleAst:
        token = self.current
        if self._is_operator(token, frozenset({"not", "-"})):
            self._advance()
            return Unary(token.text, self._unary())
        return self._atom()

    def _atom(self) -> RuleAst:
        token = self.current
        if token.kind is TokenKind.NUMBER:
            self._advance()
            if any(c in token.text for c in ".eE"):
                return Literal(float(token.text), LiteralKind.FLOAT)
            try:
                return Literal(int(token.text), LiteralKind.INTEGER)
            except ValueError:
                raise self._error("Integer literal is too long", token) from None
        if token.kind is TokenKind.STRING:
            self._advance()
            return Literal(unquote(token.text), LiteralKind.TEXT)
        if token.kind is TokenKind.KEYWORD and token.text in ("true", "false"):
            self._advance()
            return Literal(token.text == "true", LiteralKind.BOOLEAN)
        if token.kind is TokenKind.KEYWORD and token.text in AGGREGATE_FUNCS:
            return self._aggregate()
        if token.kind is TokenKind.NAME:
            self._advance()
            return _column_ref(token.text)
        if token.kind is TokenKind.LPAREN:
            self._advance()
            node = self._binary(0)
            self._expect(TokenKind.RPAREN, "')'")
            return node
        found = token.text or "end of input"
        raise self._error(f"Expected a value, found {found!r}")

    def _aggregate(self) -> RuleAst:
        func = self._advance().text
        self._expect(TokenKind.LPAREN, f"'(' after {func}")
        name = self._expect(TokenKind.NAME, "a column name")
        self._expect(TokenKind.RPAREN, "')'")
        return Aggregate(func, _column_ref(name.text))
