"""RL rewards for the two decompilation phases.

Structure reward (phase 1, pseudocode -> IR)::

    r_placeholder = |I_gen & I_ref| / |I_gen | I_ref|
    r_structure   = 0.0                  if the IR does not compile
                    1.0 + r_placeholder  otherwise

Identifier reward (phase 2, IR -> source): cosine similarity between the
embeddings of generated and reference source.
"""
from __future__ import annotations

import hashlib
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from decompkit.embeddings import EmbeddingProvider, HashedTokenProvider, cosine
from decompkit.errors import ProviderUnavailable, ToolchainMissing
from decompkit.headers import synthesize_header
from decompkit.obfuscate import extract_placeholder_set
from decompkit.toolchain import CompilerConfig, run_limited

__all__ = [
    "CompileVerdict", "StructureReward", "IdentifierReward", "synthesize_header",
    "check_compilable", "placeholder_jaccard", "structure_reward", "identifier_reward",
    "batch_rewards",
]


@dataclass(frozen=True)
class CompileVerdict:
    compiled: bool
    compiler_id: str
    exit_code: int
    stderr_digest: str
    duration: float  # milliseconds
    diagnostic: str = ""
    flags: tuple = ()


@dataclass(frozen=True)
class StructureReward:
    r_placeholder: float
    r_structure: float
    verdict: CompileVerdict
    gen_set: frozenset
    ref_set: frozenset


@dataclass(frozen=True)
class IdentifierReward:
    r_identifier: float
    e_gen: np.ndarray = field(repr=False)
    e_src: np.ndarray = field(repr=False)
    provider_id: str = ""


def check_compilable(ir_text: str, header: str = "",
                     config: Optional[CompilerConfig] = None) -> CompileVerdict:
    """Compile header + IR to an object file (no link) in a scratch dir."""
    config = config or CompilerConfig()
    cc = config.resolve()
    cid = config.compiler_id
    with tempfile.TemporaryDirectory(prefix="dk-cc-") as scratch:
        src = os.path.join(scratch, "unit.c")
        obj = os.path.join(scratch, "unit.o")
        with open(src, "w", encoding="utf-8", errors="surrogateescape") as fh:
            if header:
                fh.write(header)
                fh.write("\n")
            fh.write(ir_text)
        res = run_limited([cc, *config.cflags, "-c", src, "-o", obj], cwd=scratch,
                          timeout=config.timeout, memory=config.memory_limit * 2)
        produced = os.path.exists(obj)
    stderr = res.stderr.decode("utf-8", "replace")
    if res.timed_out:
        diag = f"timeout after {config.timeout}s"
        code = -9
    else:
        diag = stderr[-2000:]
        code = res.returncode
    return CompileVerdict(
        compiled=(not res.timed_out and code == 0 and produced),
        compiler_id=cid,
        exit_code=code,
        stderr_digest=hashlib.sha256(res.stderr).hexdigest(),
        duration=res.duration_ms,
        diagnostic=diag,
        flags=tuple(config.cflags),
    )


def placeholder_jaccard(gen: set, ref: set) -> float:
    """Jaccard of two placeholder sets; two empty sets count as identical."""
    union = len(gen | ref)
    if union == 0:
        return 1.0
    return len(gen & ref) / union


def structure_reward(gen_ir: str, ref_ir: str, reference_header: Optional[str] = None,
                     config: Optional[CompilerConfig] = None) -> StructureReward:
    header = synthesize_header(gen_ir, reference_header)
    verdict = check_compilable(gen_ir, header, config)
    gen_set = frozenset(extract_placeholder_set(gen_ir))
    ref_set = frozenset(extract_placeholder_set(ref_ir))
    j = placeholder_jaccard(gen_set, ref_set)
    r = 1.0 + j if verdict.compiled else 0.0
    return StructureReward(j, r, verdict, gen_set, ref_set)


def identifier_reward(gen_src: str, ref_src: str,
                      provider: Optional[EmbeddingProvider] = None) -> IdentifierReward:
    provider = provider or HashedTokenProvider()
    e_gen = np.asarray(provider.embed(gen_src), dtype=float)
    e_src = np.asarray(provider.embed(ref_src), dtype=float)
    return IdentifierReward(cosine(e_gen, e_src), e_gen, e_src, provider.provider_id)


@dataclass
class RewardConfig:
    compiler: CompilerConfig = field(default_factory=CompilerConfig)
    provider: Optional[EmbeddingProvider] = None
    workers: int = 4


def _record(pair: dict, mode: str, config: RewardConfig) -> dict:
    rec = {"id": pair.get("id"), "mode": mode, "diagnostics": []}
    if mode == "structure":
        r = structure_reward(pair["gen"], pair["ref"], pair.get("header"), config.compiler)
        rec.update(compiled=r.verdict.compiled, r_placeholder=r.r_placeholder,
                   r_structure=r.r_structure, compiler_id=r.verdict.compiler_id)
        if not r.verdict.compiled:
            rec["diagnostics"].append(r.verdict.diagnostic.strip()[-500:])
    elif mode == "identifier":
        r = identifier_reward(pair["gen"], pair["ref"], config.provider)
        rec.update(r_identifier=r.r_identifier, provider_id=r.provider_id)
    else:
        raise ValueError(f"unknown reward mode {mode!r}")
    return rec


def batch_rewards(pairs: Sequence[dict], mode: str,
                  config: Optional[RewardConfig] = None) -> list[dict]:
    """One reward record per ``{"id", "gen", "ref", "header"?}`` pair, in order.

    A failure inside one pair is recorded on that record; only missing
    toolchains and unreachable embedding providers abort the batch.
    """
    config = config or RewardConfig()
    if mode not in ("structure", "identifier"):
        raise ValueError(f"unknown reward mode {mode!r}")
    if not pairs:
        return []
    if mode == "structure":
        config.compiler.resolve()

    def one(pair):
        try:
            return _record(pair, mode, config)
        except (ToolchainMissing, ProviderUnavailable):
            raise
        except Exception as exc:  # noqa: BLE001 - isolate per-sample failures
            rec = {"id": pair.get("id"), "mode": mode, "diagnostics": [f"{type(exc).__name__}: {exc}"]}
            if mode == "structure":
                rec.update(compiled=False, r_placeholder=0.0, r_structure=0.0)
            return rec

    with ThreadPoolExecutor(max_workers=max(1, config.workers)) as pool:
        return list(pool.map(one, pairs))


def verdict_dict(v: CompileVerdict) -> dict:
    return asdict(v)
