"""Position-annotated C syntax trees and identifier classification.

Trees come from the tree-sitter C grammar, which is error tolerant and
does not need declarations to be visible, so headerless pseudocode-style
functions still produce a usable tree. Every node carries byte offsets
relative to the *source* text (a synthesized header, when given, sits at
negative offsets and is never enumerated).
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Iterator, Optional

import tree_sitter
import tree_sitter_c

from decompkit.reserved import C_KEYWORDS

CATEGORIES = ("func", "type", "field", "var")

IDENTIFIER_KINDS = frozenset(
    {"identifier", "type_identifier", "field_identifier", "statement_identifier"}
)

# Subtrees holding preprocessor tokens rather than C identifiers.
_PREPROC_OPAQUE = frozenset(
    {"preproc_def", "preproc_function_def", "preproc_include", "preproc_call",
     "preproc_params", "preproc_arg", "preproc_defined"}
)
_PREPROC_CONDITIONAL = frozenset({"preproc_ifdef", "preproc_elifdef", "preproc_if", "preproc_elif"})

_DECL_CONTAINERS = frozenset(
    {"init_declarator", "declaration", "parameter_declaration", "field_declaration",
     "type_definition"}
)


@functools.lru_cache(maxsize=1)
def _language() -> tree_sitter.Language:
    return tree_sitter.Language(tree_sitter_c.language())


class Node:
    """One syntax-tree node. Treat as read-only once the tree is built."""

    __slots__ = ("kind", "start", "end", "field", "named", "missing", "parent", "children")

    def __init__(self, kind, start, end, field, named, missing, parent):
        self.kind: str = kind
        self.start: int = start
        self.end: int = end
        self.field: Optional[str] = field
        self.named: bool = named
        self.missing: bool = missing
        self.parent: Optional[Node] = parent
        self.children: list[Node] = []

    def child_by_field(self, name: str) -> Optional["Node"]:
        for c in self.children:
            if c.field == name:
                return c
        return None

    def named_children(self) -> list["Node"]:
        return [c for c in self.children if c.named]

    def walk(self) -> Iterator["Node"]:
        """Depth-first pre-order over this subtree."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def __repr__(self) -> str:
        return f"Node({self.kind!r}, {self.start}, {self.end})"


@dataclass(frozen=True)
class SyntaxTree:
    root: Node
    source_bytes: bytes  # header + "\n" + source when a header was supplied
    base: int = 0  # byte offset where the source begins inside source_bytes

    def raw(self, node: Node) -> bytes:
        return self.source_bytes[node.start + self.base: node.end + self.base]

    def text(self, node: Node) -> str:
        return self.raw(node).decode("utf-8", errors="surrogateescape")

    def in_source(self, node: Node) -> bool:
        return node.start >= 0

    def top_level(self) -> list[Node]:
        return [c for c in self.root.children if c.start >= 0]

    @property
    def source(self) -> bytes:
        return self.source_bytes[self.base:]


@dataclass(frozen=True)
class IdentifierOccurrence:
    name: str
    category: str
    span: tuple[int, int]
    decl_site: bool


@dataclass(frozen=True)
class ParseOutcome:
    status: str  # "ok" | "recovered_with_errors" | "failed"
    tree: Optional[SyntaxTree] = None
    diagnostics: list[tuple[int, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _convert(ts_tree: tree_sitter.Tree, base: int) -> Node:
    cursor = ts_tree.walk()

    def make(parent: Optional[Node]) -> Node:
        n = cursor.node
        return Node(n.type, n.start_byte - base, n.end_byte - base, cursor.field_name,
                    n.is_named, n.is_missing, parent)

    root = make(None)
    cur = root
    while True:
        if cursor.goto_first_child():
            child = make(cur)
            cur.children.append(child)
            cur = child
            continue
        while True:
            if cursor.goto_next_sibling():
                parent = cur.parent
                child = make(parent)
                parent.children.append(child)
                cur = child
                break
            if not cursor.goto_parent():
                return root
            cur = cur.parent


def parse(source: str, synthesized_header: Optional[str] = None) -> ParseOutcome:
    """Parse ``source`` (optionally preceded by a header) into a SyntaxTree."""
    if not source.strip():
        return ParseOutcome("failed", None, [(0, "empty input")])
    src = source.encode("utf-8", errors="surrogateescape")
    if synthesized_header:
        prefix = synthesized_header.encode("utf-8", errors="surrogateescape") + b"\n"
    else:
        prefix = b""
    data = prefix + src
    ts_tree = tree_sitter.Parser(_language()).parse(data)
    base = len(prefix)
    root = _convert(ts_tree, base)
    tree = SyntaxTree(root, data, base)

    diagnostics = []
    for node in root.walk():
        if node.kind == "ERROR":
            diagnostics.append((node.start, "syntax error"))
        elif node.missing:
            diagnostics.append((node.start, f"missing {node.kind}"))
    diagnostics = sorted(set(diagnostics))
    if not diagnostics:
        return ParseOutcome("ok", tree, [])
    top = [c for c in tree.top_level() if c.named and c.kind != "ERROR"]
    if not top:
        return ParseOutcome("failed", None, diagnostics)
    return ParseOutcome("recovered_with_errors", tree, diagnostics)


def _declarator_role(node: Node) -> Optional[str]:
    """'function' or 'object' when ``node`` is the name in a declarator."""
    cur = node
    indirect = False
    while True:
        p = cur.parent
        if p is None:
            return None
        if p.kind in ("parenthesized_declarator", "attributed_declarator"):
            cur = p
            continue
        if cur.field != "declarator":
            return None
        if p.kind == "function_declarator":
            return "object" if indirect else "function"
        if p.kind in ("pointer_declarator", "array_declarator"):
            indirect = True
            cur = p
            continue
        if p.kind in _DECL_CONTAINERS:
            return "object"
        return None


@dataclass(frozen=True)
class NameContext:
    """Translation-unit-wide facts used to keep categories stable per name."""

    functions: frozenset
    objects: frozenset


def name_context(tree: SyntaxTree) -> NameContext:
    funcs, objs = set(), set()
    for node in _identifier_nodes(tree):
        if node.kind != "identifier":
            continue
        role = _declarator_role(node)
        if role == "function":
            funcs.add(tree.text(node))
        elif role == "object" or (node.parent and node.parent.kind == "enumerator"):
            objs.add(tree.text(node))
    return NameContext(frozenset(funcs), frozenset(objs))


def _is_call_target(node: Node) -> bool:
    cur = node
    while cur.parent is not None and cur.parent.kind == "parenthesized_expression":
        cur = cur.parent
    return cur.parent is not None and cur.parent.kind == "call_expression" and cur.field == "function"


def classify(node: Node, tree: SyntaxTree, context: Optional[NameContext] = None) -> tuple[str, str]:
    """Map an identifier node to ``(category, name)``.

    Function declarators and call targets are ``func``; type specifiers,
    tags and typedef names are ``type``; member names are ``field``;
    everything else (parameters, locals, globals, enumerators, labels) is
    ``var``. With a context, a name declared as a function stays ``func``
    everywhere and a name declared as an object stays ``var`` even when
    called through.
    """
    name = tree.text(node)
    kind = node.kind
    if kind == "type_identifier":
        return "type", name
    if kind == "field_identifier":
        return "field", name
    if kind == "statement_identifier":
        return "var", name
    if kind != "identifier":
        return "var", name
    if context is not None:
        if name in context.functions:
            return "func", name
        if name in context.objects:
            return "var", name
    if _declarator_role(node) == "function" or _is_call_target(node):
        return "func", name
    return "var", name


def _is_decl_site(node: Node) -> bool:
    p = node.parent
    if p is None:
        return False
    if node.kind == "identifier":
        return _declarator_role(node) is not None or p.kind == "enumerator"
    if node.kind == "statement_identifier":
        return p.kind == "labeled_statement"
    if node.kind == "field_identifier":
        return _declarator_role(node) is not None
    if node.kind == "type_identifier":
        if p.kind in ("struct_specifier", "union_specifier", "enum_specifier"):
            return p.child_by_field("body") is not None
        return _declarator_role(node) is not None
    return False


def _identifier_nodes(tree: SyntaxTree) -> Iterator[Node]:
    stack = [tree.root]
    while stack:
        node = stack.pop()
        if node.end <= 0 and node is not tree.root:
            continue
        if node.kind in _PREPROC_OPAQUE:
            continue
        if node.kind in IDENTIFIER_KINDS:
            if node.start >= 0:
                yield node
            continue
        children = node.children
        if node.kind in _PREPROC_CONDITIONAL:
            children = [c for c in children if c.field not in ("name", "condition")]
        stack.extend(reversed(children))


def enumerate_identifiers(tree: SyntaxTree) -> list[IdentifierOccurrence]:
    """Every identifier occurrence in source order (depth-first pre-order)."""
    context = name_context(tree)
    out = []
    for node in _identifier_nodes(tree):
        category, name = classify(node, tree, context)
        if name in C_KEYWORDS:
            continue
        out.append(IdentifierOccurrence(name, category, (node.start, node.end), _is_decl_site(node)))
    return out


def function_definitions(tree: SyntaxTree) -> list[Node]:
    return [n for n in tree.top_level() if n.kind == "function_definition"]


def function_name_node(defn: Node) -> Optional[Node]:
    """Name identifier of a function_definition's declarator."""
    decl = defn.child_by_field("declarator")
    while decl is not None:
        if decl.kind == "function_declarator":
            inner = decl.child_by_field("declarator")
            while inner is not None and inner.kind == "parenthesized_declarator":
                inner = next((c for c in inner.children if c.named), None)
            return inner if inner is not None and inner.kind == "identifier" else None
        decl = decl.child_by_field("declarator")
    return None
