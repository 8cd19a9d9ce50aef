from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import Span
from .diagnostics import Diagnostic, ParseError

# ``output`` is contextual (it is also a common variable name) and lexes as an identifier.
KEYWORDS = {
    "int", "bool", "void", "if", "else", "while", "true", "false",
    "return", "print", "input",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<lcomment>//[^\n]*)
  | (?P<bcomment>/\*.*?\*/)
  | (?P<num>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\+\+|--|\+=|-=|==|!=|<=|>=|&&|\|\||[-+*/%<>=!(){};,])
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "num" | "ident" | "kw" | "op" | "eof"
    text: str
    span: Span


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        span = Span(line, pos - line_start + 1)
        if m is None:
            if source.startswith("/*", pos):
                raise ParseError([Diagnostic("error", "lexical error: unterminated comment", span)])
            raise ParseError(
                [Diagnostic("error", f"lexical error: unexpected character {source[pos]!r}", span)]
            )
        kind = m.lastgroup
        text = m.group()
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "bcomment":
            nls = text.count("\n")
            if nls:
                line += nls
                line_start = pos + text.rfind("\n") + 1
        elif kind in ("ws", "lcomment"):
            pass
        elif kind == "ident":
            tokens.append(Token("kw" if text in KEYWORDS else "ident", text, span))
        else:
            tokens.append(Token(kind, text, span))
        pos = m.end()
    tokens.append(Token("eof", "", Span(line, pos - line_start + 1)))
    return tokens
