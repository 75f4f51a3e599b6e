"""Re-executability: recompile the decompiled function and run the unit tests."""
from __future__ import annotations

import math
import os
import tempfile
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from decompkit import c_ast
from decompkit.errors import AmbiguousTarget, EmptyInput
from decompkit.headers import synthesize_header
from decompkit.obfuscate import apply_replacements
from decompkit.toolchain import CompilerConfig, network_isolation, run_limited, sandbox_env

STAGES = ("none", "compile", "link", "run", "timeout")


@dataclass(frozen=True)
class TestCaseSuite:
    harness_source: str
    expected_exit: int = 0
    timeout: float = 5000.0  # milliseconds

    __test__ = False  # not a pytest class


@dataclass(frozen=True)
class ReexecResult:
    compiled: bool
    linked: bool
    passed: bool
    exit_code: int
    stage_failed: str
    diagnostic: str = ""


def _is_static(defn: c_ast.Node, tree: c_ast.SyntaxTree) -> bool:
    return any(c.kind == "storage_class_specifier" and tree.text(c) == "static"
               for c in defn.children)


def _target_definition(tree: c_ast.SyntaxTree, original_name: str) -> c_ast.Node:
    defs = [d for d in c_ast.function_definitions(tree) if c_ast.function_name_node(d) is not None]
    named = [d for d in defs if tree.text(c_ast.function_name_node(d)) == original_name]
    if len(named) == 1:
        return named[0]
    if len(defs) == 1:
        return defs[0]
    # static helpers next to a single externally visible definition
    public = [d for d in defs if not _is_static(d, tree)]
    if len(public) == 1:
        return public[0]
    raise AmbiguousTarget(f"expected one top-level function definition, found {len(defs)}")


def restore_function_name(gen_src: str, original_name: str) -> str:
    """Rename the target function (declarator, prototypes, self-calls).

    The target is the only definition, or the only non-static one when
    static helpers accompany it.
    """
    outcome = c_ast.parse(gen_src)
    if outcome.tree is None:
        raise AmbiguousTarget("no parsable function definition")
    tree = outcome.tree
    name_node = c_ast.function_name_node(_target_definition(tree, original_name))
    current = tree.text(name_node)
    if current == original_name:
        return gen_src

    spans = []
    for node in tree.root.walk():
        if node.kind != "identifier" or tree.text(node) != current:
            continue
        if c_ast._declarator_role(node) == "function" or c_ast._is_call_target(node):
            spans.append((node.start, node.end, original_name))
    out = apply_replacements(tree.source, spans)
    return out.decode("utf-8", errors="surrogateescape")


def _fail(stage: str, compiled=False, linked=False, code=-1, diag="") -> ReexecResult:
    return ReexecResult(compiled, linked, False, code, stage, diag)


def reexecute(gen_src: str, suite: TestCaseSuite, original_name: str,
              config: Optional[CompilerConfig] = None) -> ReexecResult:
    config = config or CompilerConfig()
    cc = config.resolve()
    try:
        restored = restore_function_name(gen_src, original_name)
    except AmbiguousTarget as exc:
        return _fail("compile", diag=str(exc))

    with tempfile.TemporaryDirectory(prefix="dk-rx-") as scratch:
        gen_c = os.path.join(scratch, "gen.c")
        gen_o = os.path.join(scratch, "gen.o")
        harness_c = os.path.join(scratch, "harness.c")
        prog = os.path.join(scratch, "prog")
        with open(harness_c, "w", encoding="utf-8") as fh:
            fh.write(suite.harness_source)

        # Complete sources compile untouched; the synthesized header is only a
        # fallback, since it cannot know declarations from non-whitelisted headers.
        header = synthesize_header(restored)
        for prefix in ("", header) if header else ("",):
            with open(gen_c, "w", encoding="utf-8", errors="surrogateescape") as fh:
                fh.write(prefix + "\n" + restored if prefix else restored)
            res = run_limited([cc, *config.cflags, "-c", gen_c, "-o", gen_o], cwd=scratch,
                              timeout=config.timeout, memory=config.memory_limit * 2)
            if res.timed_out:
                return _fail("compile", diag="compile timed out")
            if res.returncode == 0 and os.path.exists(gen_o):
                break
        else:
            return _fail("compile", diag=res.stderr.decode("utf-8", "replace")[-1000:])

        res = run_limited([cc, *config.cflags, harness_c, gen_o, "-o", prog, *config.ldflags],
                          cwd=scratch, timeout=config.timeout, memory=config.memory_limit * 2)
        if res.timed_out or res.returncode != 0 or not os.path.exists(prog):
            return _fail("link", compiled=True, diag=res.stderr.decode("utf-8", "replace")[-1000:])

        seconds = suite.timeout / 1000.0
        res = run_limited([*network_isolation(), prog], cwd=scratch, timeout=seconds,
                          memory=config.memory_limit,
                          cpu_seconds=max(1, math.ceil(seconds)), env=sandbox_env())
    if res.timed_out:
        return _fail("timeout", True, True, -9, "run timed out")
    if res.returncode != suite.expected_exit:
        return _fail("run", True, True, res.returncode,
                     res.stderr.decode("utf-8", "replace")[-1000:])
    return ReexecResult(True, True, True, res.returncode, "none")


def reexecutability_rate(results: Sequence[ReexecResult]) -> float:
    if not results:
        raise EmptyInput("no re-execution results")
    return sum(r.passed for r in results) / len(results)


def rates_by_level(results: Iterable[tuple[str, ReexecResult]]) -> dict:
    """Per-level rates plus the sample-weighted overall rate under ``"AVG"``."""
    groups = defaultdict(list)
    for level, res in results:
        groups[level].append(res)
    if not groups:
        raise EmptyInput("no re-execution results")
    out = {lvl: reexecutability_rate(groups[lvl]) for lvl in sorted(groups)}
    out["AVG"] = reexecutability_rate([r for g in groups.values() for r in g])
    return out
