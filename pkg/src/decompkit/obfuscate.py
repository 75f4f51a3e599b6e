"""Source -> IR: rename every non-reserved identifier to a category placeholder.

Placeholders are ``<category><n>`` (``func1``, ``type2``, ``field3``,
``var4``); numbering follows first occurrence in a depth-first pre-order
walk, per category. Replacements are applied back to front on a copy of
the source so earlier byte offsets stay valid.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Optional

from decompkit import c_ast, lexer
from decompkit.c_ast import CATEGORIES
from decompkit.errors import CollisionError, InvertFailed, ParseFailed
from decompkit.reserved import ReservedSet, extract_reserved


def digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8", errors="surrogateescape")).hexdigest()


@dataclass
class RenameMap:
    maps: dict = field(default_factory=lambda: {c: {} for c in CATEGORIES})
    counters: dict = field(default_factory=lambda: {c: 1 for c in CATEGORIES})

    def assign(self, category: str, name: str) -> str:
        table = self.maps[category]
        if name not in table:
            table[name] = f"{category}{self.counters[category]}"
            self.counters[category] += 1
        return table[name]

    def __len__(self) -> int:
        return sum(len(m) for m in self.maps.values())

    def placeholders(self) -> set:
        return {p for m in self.maps.values() for p in m.values()}

    def inverse(self) -> dict:
        inv: dict[str, str] = {}
        for category, table in self.maps.items():
            for original, placeholder in table.items():
                if placeholder in inv:
                    raise InvertFailed(f"placeholder {placeholder} assigned twice")
                inv[placeholder] = original
        return inv

    def to_json(self) -> dict:
        return {c: dict(self.maps[c]) for c in CATEGORIES}

    @classmethod
    def from_json(cls, data: dict) -> "RenameMap":
        rm = cls()
        for c in CATEGORIES:
            rm.maps[c] = dict(data.get(c, {}))
            rm.counters[c] = len(rm.maps[c]) + 1
        return rm


@dataclass(frozen=True)
class IRUnit:
    ir_text: str
    rename_map: RenameMap
    reserved: ReservedSet
    source_digest: str

    def to_record(self) -> dict:
        return {
            "source_digest": self.source_digest,
            "ir_text": self.ir_text,
            "rename_map": self.rename_map.to_json(),
            "reserved_names": self.reserved.sorted(),
        }


def apply_replacements(data: bytes, entries: Iterable[tuple[int, int, str]],
                       descending: bool = True) -> bytes:
    """Splice ``(start, end, text)`` entries into ``data``.

    Offsets index the original buffer. Only back-to-front application is
    correct; ``descending=False`` exists so the ordering requirement can be
    demonstrated.
    """
    ordered = sorted(entries, key=lambda e: e[0], reverse=descending)
    by_start = sorted(ordered, key=lambda e: e[0])
    for (s1, e1, _), (s2, _, _) in zip(by_start, by_start[1:]):
        if s2 < e1:
            raise ValueError(f"overlapping replacements at {s1} and {s2}")
    buf = bytearray(data)
    for start, end, new in ordered:
        buf[start:end] = new.encode("utf-8")
    return bytes(buf)


def obfuscate(source: str, reserved: Optional[ReservedSet] = None) -> IRUnit:
    if reserved is None:
        reserved = extract_reserved("")
    outcome = c_ast.parse(source)
    if outcome.tree is None:
        raise ParseFailed("; ".join(m for _, m in outcome.diagnostics))
    tree = outcome.tree

    rename = RenameMap()
    replacements: list[tuple[int, int, str]] = []
    for occ in c_ast.enumerate_identifiers(tree):
        if occ.name in reserved:
            continue
        new = rename.assign(occ.category, occ.name)
        replacements.append((occ.span[0], occ.span[1], new))

    inverse = rename.inverse()
    for tok in lexer.identifiers(source):
        if lexer.is_placeholder(tok.text) and inverse.get(tok.text, tok.text) != tok.text:
            raise CollisionError(
                f"source token {tok.text!r} at {tok.start} would alias the placeholder "
                f"generated for {inverse[tok.text]!r}"
            )

    ir = apply_replacements(tree.source, replacements)
    return IRUnit(ir.decode("utf-8", errors="surrogateescape"), rename, reserved, digest(source))


def deobfuscate(ir: IRUnit) -> str:
    inverse = ir.rename_map.inverse()
    if not inverse:
        return ir.ir_text
    text = ir.ir_text
    out, pos = [], 0
    for tok in lexer.identifiers(text):
        original = inverse.get(tok.text)
        if original is not None:
            out.append(text[pos:tok.start])
            out.append(original)
            pos = tok.end
    out.append(text[pos:])
    return "".join(out)


def extract_placeholder_set(ir_text: str) -> set:
    return {t.text for t in lexer.identifiers(ir_text) if lexer.is_placeholder(t.text)}
