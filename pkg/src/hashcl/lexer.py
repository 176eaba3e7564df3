"""Hand-rolled lexer for HCL.

Tokens are produced on demand so the parser can switch the lexer into raw
capture mode for opaque unit bodies of concrete configurations (host-language
source that need not tokenize).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import LexError, Pos

KEYWORDS = frozenset(
    {
        "begin",
        "end",
        "unit",
        "slice",
        "from",
        "action",
        "iterator",
        "to",
        "implements",
        "version",
        "extends",
        "application",
        "computation",
        "synchronizer",
        "data",
        "environment",
        "architecture",
        "qualifier",
    }
)

_SYMBOLS = frozenset("[](),:.|*+-<>")

_WORD = re.compile(r"\b(begin|end)\b")


@dataclass(frozen=True)
class Token:
    type: str  # "IDENT", "NAT", "KW", a symbol character, or "EOF"
    value: str
    pos: Pos
    end_offset: int = 0

    def __str__(self):
        return "end of input" if self.type == "EOF" else repr(self.value)


class Lexer:
    def __init__(self, source: str, path: str = "<input>"):
        self.src = source
        self.path = path
        self.offset = 0
        self.line = 1
        self.col = 1

    def _advance(self, n: int):
        chunk = self.src[self.offset : self.offset + n]
        newlines = chunk.count("\n")
        if newlines:
            self.line += newlines
            self.col = n - chunk.rfind("\n")
        else:
            self.col += n
        self.offset += n

    def _skip_trivia(self):
        while self.offset < len(self.src):
            ch = self.src[self.offset]
            if ch.isspace():
                self._advance(1)
            elif self.src.startswith("//", self.offset):
                end = self.src.find("\n", self.offset)
                self._advance((end if end != -1 else len(self.src)) - self.offset)
            else:
                return

    def next_token(self) -> Token:
        self._skip_trivia()
        if self.offset >= len(self.src):
            return Token("EOF", "", Pos(self.line, self.col), self.offset)
        pos = Pos(self.line, self.col)
        ch = self.src[self.offset]
        if ("a" <= ch <= "z") or ("A" <= ch <= "Z") or ch == "_":
            m = re.match(r"[A-Za-z_][A-Za-z0-9_]*", self.src[self.offset :])
            word = m.group(0)
            self._advance(len(word))
            kind = "KW" if word in KEYWORDS else "IDENT"
            return Token(kind, word, pos, self.offset)
        if "0" <= ch <= "9":
            m = re.match(r"[0-9]+", self.src[self.offset :])
            digits = m.group(0)
            self._advance(len(digits))
            return Token("NAT", digits, pos, self.offset)
        if ch in _SYMBOLS:
            self._advance(1)
            return Token(ch, ch, pos, self.offset)
        raise LexError(f"unexpected character {ch!r}", pos)

    def capture_block(self, start_offset: int) -> str:
        """Capture raw text from start_offset to the ``end`` matching an
        already-consumed ``begin``, consuming that ``end``. Nested begin/end
        words inside the body are tracked so host code using them survives."""
        depth = 1
        for m in _WORD.finditer(self.src, start_offset):
            if m.group(1) == "begin":
                depth += 1
            else:
                depth -= 1
                if depth == 0:
                    text = self.src[start_offset : m.start()]
                    consumed = self.src[: m.end()]
                    self.offset = m.end()
                    self.line = consumed.count("\n") + 1
                    self.col = len(consumed) - consumed.rfind("\n")
                    return _dedent(text)
        raise LexError("unterminated unit body (missing end)", Pos(self.line, self.col))


def _dedent(text: str) -> str:
    lines = text.splitlines()
    while lines and not lines[0].strip():
        lines.pop(0)
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        return ""
    indent = min(len(ln) - len(ln.lstrip()) for ln in lines if ln.strip())
    return "\n".join(ln[indent:] if ln.strip() else "" for ln in lines)
