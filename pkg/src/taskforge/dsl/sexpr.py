"""S-expression reader with source positions.

Produces a tree of :class:`Atom` / :class:`SList` nodes, each tagged with the
1-based (line, col) where it started. Comments run from ``;`` to end of line.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Atom:
    value: str
    line: int
    col: int


@dataclass(frozen=True)
class SList:
    items: tuple = ()
    line: int = 0
    col: int = 0


@dataclass
class ReadError(Exception):
    message: str
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.message}"


@dataclass
class _Token:
    kind: str  # "(", ")", "atom"
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            col += 1
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            tokens.append(_Token(ch, ch, line, col))
            col += 1
            i += 1
        else:
            start, start_col = i, col
            while i < n and text[i] not in " \t\r\n();":
                i += 1
                col += 1
            word = text[start:i]
            if any(c in word for c in "\"'`"):
                raise ReadError(f"illegal character in token {word!r}", line, start_col)
            tokens.append(_Token("atom", word, line, start_col))
    return tokens


def read_forms(text: str) -> list[Atom | SList]:
    """Read every top-level form. Raises ReadError on malformed input."""
    tokens = _tokenize(text)
    forms: list[Atom | SList] = []
    stack: list[tuple[list, int, int]] = []
    for tok in tokens:
        if tok.kind == "(":
            stack.append(([], tok.line, tok.col))
        elif tok.kind == ")":
            if not stack:
                raise ReadError("unbalanced ')'", tok.line, tok.col)
            items, line, col = stack.pop()
            node = SList(tuple(items), line, col)
            if stack:
                stack[-1][0].append(node)
            else:
                forms.append(node)
        else:
            atom = Atom(tok.text, tok.line, tok.col)
            if stack:
                stack[-1][0].append(atom)
            else:
                forms.append(atom)
    if stack:
        _, line, col = stack[-1]
        raise ReadError("unclosed '('", line, col)
    return forms
