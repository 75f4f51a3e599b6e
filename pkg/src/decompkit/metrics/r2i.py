"""Relative readability index over a bundled AST feature table.

Features are counted on the tree, normalized per ``per_tokens`` lexical
tokens, mapped into [0, 1] against a per-feature cap (penalties inverted
so 1 is always "more readable") and combined with the table weights.
Output that still fails to parse after header synthesis scores 0.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from decompkit import c_ast, lexer
from decompkit.errors import IncompatibleScores
from decompkit.headers import synthesize_header
from decompkit.reserved import STANDARD_TYPES

_OPAQUE_NAME = re.compile(
    r"[A-Za-z_]|(?:func|type|field|var)[1-9][0-9]*|[av][0-9]+|sub_[0-9A-Fa-f]+"
    r"|(?:FUN|DAT|LAB|PTR|VAR|UNK|off|byte|word|dword|qword|unk)_[0-9A-Fa-f]+"
    r"|[a-z]{1,2}Var[0-9]+|param_[0-9]+|local_[0-9a-fA-F]+"
)


def load_weights(name: str = "r2i_weights.json") -> dict:
    with resources.files("decompkit.data").joinpath(name).open() as fh:
        return json.load(fh)


DEFAULT_WEIGHTS = load_weights()


@dataclass(frozen=True)
class R2IScore:
    value: float
    parse_ok: bool
    feature_vector: dict = field(default_factory=dict)
    weights_id: str = ""


def _number_value(text: str) -> Optional[float]:
    t = text.lower().rstrip("ul")
    try:
        return float(int(t, 0))
    except ValueError:
        try:
            return float(t.rstrip("f"))
        except ValueError:
            return None


def _unparen(node: c_ast.Node) -> c_ast.Node:
    while node.kind == "parenthesized_expression":
        inner = [c for c in node.children if c.named]
        if not inner:
            break
        node = inner[0]
    return node


def count_features(tree: c_ast.SyntaxTree) -> dict:
    counts = dict.fromkeys(
        ("goto", "cast", "pointer_arith_deref", "magic_number", "opaque_identifier",
         "structured_loop", "member_access", "named_user_type"), 0)
    for node in tree.root.walk():
        if node.start < 0:
            continue
        k = node.kind
        if k in ("goto_statement", "labeled_statement"):
            counts["goto"] += 1
        elif k == "cast_expression":
            counts["cast"] += 1
        elif k == "pointer_expression":
            op = next((c for c in node.children if not c.named), None)
            arg = node.child_by_field("argument")
            if op is not None and tree.text(op) == "*" and arg is not None:
                inner = _unparen(arg)
                if inner.kind == "cast_expression" or (
                    inner.kind == "binary_expression"
                    and any(not c.named and tree.text(c) in "+-" for c in inner.children)
                ):
                    counts["pointer_arith_deref"] += 1
        elif k == "number_literal":
            if _number_value(tree.text(node)) not in (0.0, 1.0):
                counts["magic_number"] += 1
        elif k in ("for_statement", "while_statement", "do_statement"):
            counts["structured_loop"] += 1
        elif k == "field_expression":
            counts["member_access"] += 1
        if k in ("identifier", "field_identifier", "type_identifier"):
            name = tree.text(node)
            if _OPAQUE_NAME.fullmatch(name):
                counts["opaque_identifier"] += 1
            elif k == "type_identifier" and name not in STANDARD_TYPES:
                counts["named_user_type"] += 1
    return counts


def r2i_score(gen_src: str, config=None, weights: Optional[dict] = None) -> R2IScore:
    """Score ``gen_src``; ``config`` is accepted for API symmetry (no compile step)."""
    weights = weights or DEFAULT_WEIGHTS
    wid = weights["weights_id"]
    header = synthesize_header(gen_src)
    outcome = c_ast.parse(gen_src, synthesized_header=header or None)
    if not outcome.ok:
        return R2IScore(0.0, False, {}, wid)

    counts = count_features(outcome.tree)
    n_tokens = max(1, len(lexer.tokens(gen_src)))
    per = float(weights.get("per_tokens", 100))
    total_w = 0.0
    acc = 0.0
    vector = {}
    for feat in weights["features"]:
        density = counts[feat["name"]] * per / n_tokens
        level = min(1.0, density / feat["cap"])
        f = 1.0 - level if feat["direction"] == "penalty" else level
        vector[feat["name"]] = f
        acc += feat["weight"] * f
        total_w += feat["weight"]
    value = acc / total_w if total_w else 0.0
    return R2IScore(min(1.0, max(0.0, value)), True, vector, wid)


def mean_r2i(scores: list[R2IScore]) -> float:
    """Mean over all scores, parse failures included as 0."""
    if not scores:
        return 0.0
    ids = {s.weights_id for s in scores}
    if len(ids) > 1:
        raise IncompatibleScores(f"R2I scores from different weight tables: {sorted(ids)}")
    return sum(s.value for s in scores) / len(scores)
