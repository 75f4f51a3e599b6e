"""Bundled whitelist of names that survive obfuscation.

The table lives in ``data/reserved_names.json`` (C11 + common POSIX, grouped
by the header that declares each name) so users can extend it.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Optional

from decompkit import lexer


def _load() -> dict:
    with resources.files("decompkit.data").joinpath("reserved_names.json").open() as fh:
        return json.load(fh)


_TABLE = _load()
WHITELIST_VERSION: str = _TABLE["version"]
C_KEYWORDS = frozenset(_TABLE["keywords"])

_HEADER_OF: dict[str, str] = {}
_types, _library = set(), set(_TABLE["entry_points"])
for _header, _groups in _TABLE["headers"].items():
    for _kind, _names in _groups.items():
        for _n in _names:
            _HEADER_OF.setdefault(_n, _header)
            (_types if _kind == "types" else _library).add(_n)

STANDARD_TYPES = frozenset(_types)
LIBRARY_NAMES = frozenset(_library)
BASE_RESERVED = C_KEYWORDS | STANDARD_TYPES


def header_for(name: str) -> Optional[str]:
    return _HEADER_OF.get(name)


def is_whitelisted(name: str) -> bool:
    return name in BASE_RESERVED or name in LIBRARY_NAMES


@dataclass(frozen=True)
class ReservedSet:
    names: frozenset

    def __contains__(self, name: str) -> bool:
        return name in self.names

    def __len__(self) -> int:
        return len(self.names)

    def sorted(self) -> list[str]:
        return sorted(self.names)


def extract_reserved(pseudocode: str) -> ReservedSet:
    """Names visible in the pseudocode that are on the whitelist, plus the
    unconditional keyword/standard-type base set."""
    seen = {t.text for t in lexer.identifiers(pseudocode)}
    return ReservedSet(frozenset(BASE_RESERVED | (seen & LIBRARY_NAMES)))
