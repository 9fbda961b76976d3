"""
Tokenizer for the rule-expression language.
Rules are tried in order at each position; the first match wins.
"""

import re
from enum import Enum, auto
from typing import NamedTuple

from core.errors import RuleSyntaxError


class TokenKind(Enum):
    """Token categories produced by the lexer."""

    NUMBER = auto()
    STRING = auto()
    NAME = auto()
    KEYWORD = auto()
    OPERATOR = auto()
    LPAREN = auto()
    RPAREN = auto()
    END = auto()


class Token(NamedTuple):
    """A lexed token with its start offset in the source."""

    kind: TokenKind
    text: str
    position: int


class TokenRule(NamedTuple):
    """A pattern and token-kind pair."""

    pattern: re.Pattern[str]
    kind: TokenKind | None  # None = skip (whitespace)


KEYWORDS = frozenset({"and", "or", "not", "true", "false", "sum"})

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"

RULES: list[TokenRule] = [
    TokenRule(re.compile(r"\s+"), None),
    # Exponent or decimal point makes a float; digits alone make an integer
    TokenRule(re.compile(r"(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?"), TokenKind.NUMBER),
    TokenRule(re.compile(r'"(?:[^"\\]|\\.)*"' + r"|'(?:[^'\\]|\\.)*'"), TokenKind.STRING),
    TokenRule(re.compile(rf"{_IDENT}(?:\.{_IDENT})?"), TokenKind.NAME),
    TokenRule(re.compile(r"==|!=|<=|>=|[<>+\-*/]"), TokenKind.OPERATOR),
    TokenRule(re.compile(r"\("), TokenKind.LPAREN),
    TokenRule(re.compile(r"\)"), TokenKind.RPAREN),
]


def tokenize(source: str) -> list[Token]:
    """Split source into tokens, ending with an END token.

    Raises:
        RuleSyntaxError: a character no rule accepts, or an unterminated string.
    """
    tokens: list[Token] = []
    pos = 0
    while pos < len(source):
        for rule in RULES:
            match = rule.pattern.match(source, pos)
            if match is None:
                continue
            text = match.group(0)
            if rule.kind is TokenKind.NAME and text in KEYWORDS:
                tokens.append(Token(TokenKind.KEYWORD, text, pos))
            elif rule.kind is not None:
                tokens.append(Token(rule.kind, text, pos))
            pos = match.end()
            break
        else:
            char = source[pos]
            if char in "\"'":
                raise RuleSyntaxError("Unterminated string literal", source, pos)
            raise RuleSyntaxError(f"Unexpected character {char!r}", source, pos)
    tokens.append(Token(TokenKind.END, "", len(source)))
    return tokens


def unquote(text: str) -> str:
    """Decode a STRING token (either quote style, backslash escapes)."""
    body = text[1:-1]
    return re.sub(r"\\(.)", r"\1", body, flags=re.DOTALL)


def quote(value: str) -> str:
    """Encode a text literal so tokenize/unquote round-trips it."""
    escaped = value.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'
