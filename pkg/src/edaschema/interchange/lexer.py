"""Whitespace tokenizer shared by the LEF and DEF readers.

``#`` starts a comment that runs to end of line, double-quoted strings are a
single token, and ``;``, ``(`` and ``)`` are always tokens of their own.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ParseError

_TOKEN = re.compile(r'"(?:[^"\\]|\\.)*"|[;()]|[^\s;()"]+')


@dataclass(frozen=True, slots=True)
class Token:
    text: str
    line: int

    @property
    def upper(self) -> str:
        return self.text.upper()


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if "#" in raw:
            raw = _strip_comment(raw)
        for m in _TOKEN.finditer(raw):
            tokens.append(Token(m.group(0), lineno))
    return tokens


def _strip_comment(line: str) -> str:
    in_quote = False
    for i, ch in enumerate(line):
        if ch == '"':
            in_quote = not in_quote
        elif ch == "#" and not in_quote:
            return line[:i]
    return line


class TokenStream:
    def __init__(self, text: str, source: str | None = None):
        self.tokens = tokenize(text)
        self.pos = 0
        self.source = source

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    @property
    def line(self) -> int | None:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos].line
        return self.tokens[-1].line if self.tokens else None

    def error(self, message: str, line: int | None = None) -> ParseError:
        return ParseError(message, line if line is not None else self.line, self.source)

    def peek(self, offset: int = 0) -> Token | None:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def next(self) -> Token:
        if self.pos >= len(self.tokens):
            raise self.error("unexpected end of file")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.upper != text.upper():
            raise self.error(f"expected {text!r}, found {tok.text!r}", tok.line)
        return tok

    def accept(self, text: str) -> bool:
        tok = self.peek()
        if tok is not None and tok.upper == text.upper():
            self.pos += 1
            return True
        return False

    def statement(self) -> list[Token]:
        """Tokens up to (and consuming) the next ``;``."""
        out: list[Token] = []
        while True:
            tok = self.next()
            if tok.text == ";":
                return out
            out.append(tok)

    def skip_block(self, name: str) -> None:
        """Skip to the ``END name`` that closes a block (``name`` compared case-sensitively)."""
        start = self.line
        while not self.at_end():
            tok = self.next()
            if tok.upper == "END":
                nxt = self.peek()
                if nxt is not None and nxt.text == name:
                    self.pos += 1
                    return
        raise self.error(f"unterminated block {name!r}", start)

    def number(self, tok: Token | None = None) -> float:
        tok = tok or self.next()
        try:
            return float(tok.text)
        except ValueError:
            raise self.error(f"expected a number, found {tok.text!r}", tok.line) from None

    def integer(self, tok: Token | None = None) -> int:
        tok = tok or self.next()
        try:
            return int(tok.text)
        except ValueError:
            try:
                value = float(tok.text)
            except ValueError:
                value = None
            if value is not None and value.is_integer():
                return int(value)
            raise self.error(f"expected an integer, found {tok.text!r}", tok.line) from None


def unquote(text: str) -> str:
    if len(text) >= 2 and text[0] == '"' and text[-1] == '"':
        return text[1:-1]
    return text


def to_dbu(value: float, dbu_per_micron: int) -> int:
    """Convert microns to DBU, rounding to the nearest unit."""
    return int(round(value * dbu_per_micron))


def fmt_um(dbu: int, dbu_per_micron: int) -> str:
    """Shortest decimal that reads back to the same DBU value."""
    text = f"{dbu / dbu_per_micron:.6f}".rstrip("0").rstrip(".")
    return text if text not in ("", "-0") else "0"
