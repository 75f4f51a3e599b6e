"""Comment removal and deterministic whitespace canonicalization."""
from __future__ import annotations

import subprocess
from typing import Callable, Optional, Sequence

from decompkit import lexer

Formatter = Callable[[str], str]


def _canonical_whitespace(text: str) -> str:
    lines: list[str] = []
    cur: list[str] = []
    at_line_start = True
    pending_space = False
    for tok in lexer.scan(text):
        if tok.kind == "newline":
            lines.append("".join(cur).rstrip())
            cur, at_line_start, pending_space = [], True, False
        elif tok.kind == "space":
            if tok.text == "\\\n":
                lines.append("".join(cur).rstrip() + " \\")
                cur, at_line_start, pending_space = [], True, False
            elif at_line_start:
                cur.append(tok.text.expandtabs(4).replace("\f", "").replace("\v", "").replace("\r", ""))
            else:
                pending_space = True
        else:
            if pending_space:
                cur.append(" ")
                pending_space = False
            cur.append(tok.text)
            at_line_start = False
    lines.append("".join(cur).rstrip())

    out: list[str] = []
    for line in lines:
        if not line.strip():
            if out and out[-1] != "":
                out.append("")
            continue
        out.append(line)
    while out and out[-1] == "":
        out.pop()
    return "\n".join(out)


def normalize_source(source: str, formatter: Optional[Formatter] = None) -> str:
    """Strip comments, optionally run an external formatter, canonicalize whitespace."""
    text = lexer.strip_comments(source)
    if formatter is not None:
        text = formatter(text)
    return _canonical_whitespace(text)


def normalize_pseudo(pseudo: str, formatter: Optional[Formatter] = None) -> str:
    return normalize_source(pseudo, formatter)


def external_formatter(cmd: Sequence[str], timeout: float = 30.0) -> Formatter:
    """Wrap a stdin->stdout formatter such as ``clang-format``; falls back to
    the input text when the tool fails."""
    def run(text: str) -> str:
        try:
            res = subprocess.run(list(cmd), input=text, capture_output=True, text=True,
                                 timeout=timeout)
        except (OSError, subprocess.SubprocessError):
            return text
        return res.stdout if res.returncode == 0 else text
    return run
