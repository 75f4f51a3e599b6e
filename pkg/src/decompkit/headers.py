"""Best-effort declarations that let a lone function compile.

A generated function usually references types, callees and globals it
never declares. We declare each unresolved name with a shape inferred
from how it is used:

* whitelisted library names pull in their standard header;
* unresolved type names become ``typedef struct T T`` plus a completed
  ``struct T`` carrying every member the function accesses that no local
  struct defines (member types inferred from use: chained ``->`` gets a
  pointer to a catch-all struct, chained ``.`` an embedded one, calls a
  function pointer, subscripts a ``long *``, the rest ``long``);
* unresolved callees get an unprototyped ``int name();``;
* unresolved globals get ``extern`` declarations, ``int`` by default.

The compiler decides whether the result is good enough.
"""
from __future__ import annotations

from collections import defaultdict
from typing import Optional

from decompkit import c_ast
from decompkit.c_ast import Node, SyntaxTree
from decompkit.reserved import C_KEYWORDS, LIBRARY_NAMES, STANDARD_TYPES, header_for

ANY_STRUCT = "__dk_any"
AGG_STRUCT = "__dk_agg"

_TAGGED = ("struct_specifier", "union_specifier", "enum_specifier")


def _unparen(node: Node) -> Node:
    while node.parent is not None and node.parent.kind == "parenthesized_expression":
        node = node.parent
    return node


class _Usage:
    def __init__(self, tree: SyntaxTree):
        self.tree = tree
        self.includes: set[str] = set()
        self.typedef_defined: set[str] = set()
        self.tag_defined: set[str] = set()
        self.typedef_used: set[str] = set()
        self.tag_used: dict[str, str] = {}
        self.fields_defined: set[str] = set()
        self.field_shape: dict[str, set] = defaultdict(set)
        self.field_order: list[str] = []
        self.declared: set[str] = set()
        self.called: list[str] = []
        self.value_shape: dict[str, set] = defaultdict(set)
        self.value_order: list[str] = []
        self._scan()

    def _note_library(self, name: str) -> bool:
        if name in STANDARD_TYPES or name in LIBRARY_NAMES:
            h = header_for(name)
            if h:
                self.includes.add(h)
            return True
        return False

    def _shape_of_use(self, node: Node) -> str:
        outer = _unparen(node)
        p = outer.parent
        if p is None:
            return "scalar"
        if p.kind == "field_expression" and outer.field == "argument":
            op = next((c for c in p.children if not c.named), None)
            return "ptr" if op is not None and self.tree.text(op) == "->" else "agg"
        if p.kind == "call_expression" and outer.field == "function":
            return "fn"
        if p.kind == "subscript_expression" and outer.field == "argument":
            return "array"
        if p.kind == "pointer_expression" and self.tree.text(p).startswith("*"):
            return "array"
        return "scalar"

    def _scan(self) -> None:
        tree = self.tree
        for node in tree.root.walk():
            if node.start < 0:
                continue
            kind = node.kind
            if kind in _TAGGED:
                name_node = node.child_by_field("name")
                if name_node is not None:
                    name = tree.text(name_node)
                    if node.child_by_field("body") is not None:
                        self.tag_defined.add(name)
                    elif kind != "enum_specifier":
                        self.tag_used.setdefault(name, kind.split("_")[0])
            elif kind == "type_definition":
                for c in node.children:
                    if c.field == "declarator":
                        for sub in c.walk():
                            if sub.kind == "type_identifier":
                                self.typedef_defined.add(tree.text(sub))
            elif kind == "field_declaration":
                for sub in node.walk():
                    if sub.kind == "field_identifier":
                        self.fields_defined.add(tree.text(sub))
            elif kind == "type_identifier":
                p = node.parent
                if p is not None and p.kind in _TAGGED:
                    continue
                name = tree.text(node)
                if not self._note_library(name):
                    self.typedef_used.add(name)
            elif kind == "field_identifier":
                p = node.parent
                if p is not None and p.kind == "field_expression":
                    name = tree.text(node)
                    if name not in self.field_shape:
                        self.field_order.append(name)
                    self.field_shape[name].add(self._shape_of_use(p))
            elif kind == "identifier":
                self._scan_identifier(node)

    def _scan_identifier(self, node: Node) -> None:
        tree = self.tree
        name = tree.text(node)
        p = node.parent
        if name in C_KEYWORDS:
            return
        if c_ast._declarator_role(node) is not None or (p is not None and p.kind == "enumerator"):
            self.declared.add(name)
            return
        if p is not None and p.kind in ("preproc_def", "preproc_function_def"):
            self.declared.add(name)
            return
        if self._note_library(name):
            return
        shape = self._shape_of_use(node)
        if shape == "fn":
            if name not in self.called:
                self.called.append(name)
        if name not in self.value_shape:
            self.value_order.append(name)
        self.value_shape[name].add(shape)


def _field_decl(name: str, shapes: set, in_agg: bool) -> str:
    if "ptr" in shapes or ("agg" in shapes and in_agg):
        return f"struct {ANY_STRUCT} *{name};"
    if "agg" in shapes:
        return f"struct {AGG_STRUCT} {name};"
    if "fn" in shapes:
        return f"long (*{name})();"
    if "array" in shapes:
        return f"long *{name};"
    return f"long {name};"


def _value_decl(name: str, shapes: set) -> str:
    if "ptr" in shapes:
        return f"extern struct {ANY_STRUCT} *{name};"
    if "agg" in shapes:
        return f"extern struct {AGG_STRUCT} {name};"
    if "array" in shapes:
        return f"extern long *{name};"
    return f"extern int {name};"


def synthesize_header(ir_text: str, reference_header: Optional[str] = None) -> str:
    """Declarations for every name ``ir_text`` uses but does not declare."""
    if reference_header is not None:
        return reference_header
    outcome = c_ast.parse(ir_text)
    if outcome.tree is None:
        return ""
    u = _Usage(outcome.tree)

    missing_fields = [f for f in u.field_order if f not in u.fields_defined]
    need_typedef = sorted(n for n in u.typedef_used - u.typedef_defined if n not in u.tag_defined)
    need_body = {n: "struct" for n in need_typedef}
    for tag, kw in u.tag_used.items():
        if tag not in u.tag_defined:
            need_body.setdefault(tag, kw)
    for name in u.typedef_used & u.typedef_defined:
        need_body.pop(name, None)

    def body(in_agg: bool) -> str:
        if not missing_fields:
            return "{ long __dk_pad; }"
        members = " ".join(_field_decl(f, u.field_shape[f], in_agg) for f in missing_fields)
        return "{ " + members + " }"

    lines = [f"#include <{h}>" for h in sorted(u.includes)]
    uses_any = bool(missing_fields) or any(
        ("ptr" in s or "agg" in s) for s in u.value_shape.values()
    )
    if uses_any:
        lines.append(f"struct {ANY_STRUCT};")
        lines.append(f"struct {AGG_STRUCT} {body(True)};")
        lines.append(f"struct {ANY_STRUCT} {body(False)};")
    for name in need_typedef:
        lines.append(f"typedef struct {name} {name};")
    for name in sorted(need_body):
        lines.append(f"{need_body[name]} {name} {body(False)};")

    undeclared = [n for n in u.value_order if n not in u.declared]
    for name in undeclared:
        if name in u.called and u.value_shape[name] == {"fn"}:
            lines.append(f"int {name}();")
    for name in undeclared:
        if not (name in u.called and u.value_shape[name] == {"fn"}):
            shapes = u.value_shape[name] - {"fn"}
            lines.append(_value_decl(name, shapes))
    return "\n".join(lines) + ("\n" if lines else "")
