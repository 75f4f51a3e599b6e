"""Tolerant lexical scanner for C text.

Used wherever a full parse is unnecessary or unsafe: comment stripping,
placeholder scans, shingling for MinHash and token accounting. Never
raises; unterminated literals and comments run to end of input.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

_PATTERNS = [
    ("comment", r"/\*.*?(?:\*/|\Z)|//(?:\\\n|[^\n])*"),
    ("string", r'(?:u8|[LuU])?"(?:\\.|[^"\\\n])*"?'),
    ("char", r"(?:[LuU])?'(?:\\.|[^'\\\n])*'?"),
    ("number", r"\.?[0-9](?:[eEpP][+-]|[0-9A-Za-z_.])*"),
    ("ident", r"[A-Za-z_$][A-Za-z0-9_$]*"),
    ("newline", r"\r?\n"),
    ("space", r"[ \t\f\v\r]+|\\\n"),
    ("punct", r"<<=|>>=|\.\.\.|->|\+\+|--|<<|>>|<=|>=|==|!=|&&|\|\||[-+*/%&|^!=<>]=|##|."),
]
_SCANNER = re.compile("|".join(f"(?P<{k}>{p})" for k, p in _PATTERNS), re.DOTALL)

PLACEHOLDER_RE = re.compile(r"(?:func|type|field|var)[1-9][0-9]*")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    start: int
    end: int


def scan(text: str) -> Iterator[Token]:
    """Yield every token of ``text``, whitespace and comments included."""
    for m in _SCANNER.finditer(text):
        yield Token(m.lastgroup, m.group(), m.start(), m.end())


def tokens(text: str) -> list[Token]:
    """Significant tokens only (no whitespace, newlines or comments)."""
    return [t for t in scan(text) if t.kind not in ("space", "newline", "comment")]


def token_texts(text: str) -> list[str]:
    return [t.text for t in tokens(text)]


def identifiers(text: str) -> list[Token]:
    return [t for t in scan(text) if t.kind == "ident"]


def is_placeholder(name: str) -> bool:
    return PLACEHOLDER_RE.fullmatch(name) is not None


def strip_comments(text: str) -> str:
    """Remove comments outside string/char literals.

    A block comment that separates two tokens becomes a single space so
    ``a/**/b`` does not fuse into ``ab``. Line comments keep their newline.
    """
    out: list[str] = []
    for tok in scan(text):
        if tok.kind != "comment":
            out.append(tok.text)
        elif tok.text.startswith("/*"):
            out.append("\n" if "\n" in tok.text else " ")
    return "".join(out)
