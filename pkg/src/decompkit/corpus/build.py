"""Paired (pseudocode, IR, source) corpus construction.

Stages: normalize -> compile_and_strip -> ingest_pseudocode -> obfuscate ->
dedup -> JSONL shards + manifest. Every stage isolates per-sample
failures and the manifest records how many samples each stage let through.
"""
from __future__ import annotations

import configparser
import hashlib
import json
import logging
import os
import shlex
import shutil
import subprocess
import tempfile
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Protocol, Sequence

from decompkit import c_ast, lexer
from decompkit.corpus.minhash import dedup
from decompkit.corpus.normalize import external_formatter, normalize_pseudo, normalize_source
from decompkit.errors import CollisionError, ParseFailed, ProviderUnavailable, ToolchainMissing
from decompkit.obfuscate import obfuscate
from decompkit.reserved import extract_reserved
from decompkit.toolchain import compiler_id, run_limited

log = logging.getLogger(__name__)

LEVELS = ("O0", "O1", "O2", "O3")
_STUB_MAIN = "int main(void) { return 0; }\n"


@dataclass(frozen=True)
class BinaryArtifact:
    source_path: str
    source_stem: str
    compiler: str
    compiler_id: str
    opt_level: str
    path: str
    digest: str
    stripped: bool = True


@dataclass
class CorpusSample:
    id: str
    source: str
    pseudo: str
    ir: str
    opt_level: str
    compiler_id: str
    stripped: bool
    provenance: str


def sample_id(source: str, opt_level: str, compiler_id_: str) -> str:
    h = hashlib.sha256()
    for part in (source, opt_level, compiler_id_):
        h.update(part.encode("utf-8", "surrogateescape"))
        h.update(b"\0")
    return h.hexdigest()


def _sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _defines_main(source: str) -> bool:
    outcome = c_ast.parse(source)
    if outcome.tree is None:
        return False
    tree = outcome.tree
    for defn in c_ast.function_definitions(tree):
        name = c_ast.function_name_node(defn)
        if name is not None and tree.text(name) == "main":
            return True
    return False


def compile_and_strip(source_file: str, levels: Iterable[str], compilers: Iterable[str],
                      out_dir: str, timeout: float = 60.0,
                      failures: Optional[list] = None) -> list[BinaryArtifact]:
    """One stripped executable per (compiler, level) cell.

    Sources are single functions, so a stub ``main`` is linked in and
    unresolved references are tolerated; ``strip --strip-all`` then removes
    the symbol table and debug sections.
    """
    src = Path(source_file)
    text = src.read_text(encoding="utf-8", errors="surrogateescape")
    strip = shutil.which("strip")
    if strip is None:
        raise ToolchainMissing("strip not found on PATH")
    os.makedirs(out_dir, exist_ok=True)
    extra = []
    if not _defines_main(text):
        stub = os.path.join(out_dir, "_stub_main.c")
        with open(stub, "w") as fh:
            fh.write(_STUB_MAIN)
        extra.append(stub)

    artifacts = []
    for cc in sorted(set(compilers)):
        cc_path = shutil.which(cc)
        if cc_path is None:
            raise ToolchainMissing(f"compiler {cc!r} not found on PATH")
        cid = compiler_id(cc_path)
        for level in sorted(set(levels)):
            out = os.path.join(out_dir, f"{src.stem}.{cc}.{level}.elf")
            cmd = [cc_path, f"-{level}", "-std=gnu11", "-w", "-g0", str(src.resolve()), *extra,
                   "-o", out, "-Wl,--unresolved-symbols=ignore-all", "-lm"]
            res = run_limited(cmd, cwd=out_dir, timeout=timeout)
            if res.timed_out or res.returncode != 0 or not os.path.exists(out):
                reason = "timeout" if res.timed_out else res.stderr.decode("utf-8", "replace")[-300:]
                log.info("compile failed: %s %s -%s: %s", src.name, cc, level, reason.strip())
                if failures is not None:
                    failures.append({"source": src.name, "compiler": cc, "level": level,
                                     "reason": "compile failed"})
                continue
            sres = run_limited([strip, "--strip-all", out], cwd=out_dir, timeout=timeout)
            if sres.returncode != 0:
                if failures is not None:
                    failures.append({"source": src.name, "compiler": cc, "level": level,
                                     "reason": "strip failed"})
                continue
            artifacts.append(BinaryArtifact(str(src), src.stem, cc, cid, level, out,
                                            _sha256_file(out)))
    return artifacts


class PseudoProvider(Protocol):
    def lookup(self, artifact: BinaryArtifact) -> Optional[str]: ...


class OfflinePseudoProvider:
    """Precomputed pseudocode files.

    Lookup order: ``<digest>.txt``, ``<stem>/<compiler>-<level>.txt``,
    ``<stem>/<level>.txt``, ``<stem>.txt``.
    """

    def __init__(self, root: str):
        self.root = Path(root)
        if not self.root.is_dir():
            raise ProviderUnavailable(f"pseudocode directory {root} does not exist")

    def lookup(self, artifact: BinaryArtifact) -> Optional[str]:
        stem = artifact.source_stem
        for rel in (f"{artifact.digest}.txt", f"{stem}/{artifact.compiler}-{artifact.opt_level}.txt",
                    f"{stem}/{artifact.opt_level}.txt", f"{stem}.txt"):
            p = self.root / rel
            if p.is_file():
                return p.read_text(encoding="utf-8", errors="surrogateescape")
        return None


class CommandPseudoProvider:
    """Adapter for a headless decompiler: ``{binary}`` in the command is
    replaced by the artifact path and stdout is taken as pseudocode."""

    def __init__(self, command: Sequence[str] | str, timeout: float = 300.0):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        if not self.command or shutil.which(self.command[0]) is None:
            raise ProviderUnavailable(f"decompiler command {self.command[:1]} not found")

    def lookup(self, artifact: BinaryArtifact) -> Optional[str]:
        cmd = [c.replace("{binary}", artifact.path) for c in self.command]
        try:
            res = subprocess.run(cmd, capture_output=True, timeout=self.timeout)
        except subprocess.TimeoutExpired:
            return None
        if res.returncode != 0 or not res.stdout.strip():
            return None
        return res.stdout.decode("utf-8", "replace")


def ingest_pseudocode(artifacts: Sequence[BinaryArtifact], provider: PseudoProvider,
                      dropped: Optional[list] = None) -> list[tuple[BinaryArtifact, str]]:
    pairs = []
    for art in artifacts:
        text = provider.lookup(art)
        if text is None or not text.strip():
            if dropped is not None:
                dropped.append({"source": Path(art.source_path).name, "compiler": art.compiler,
                                "level": art.opt_level, "reason": "no pseudocode"})
            continue
        pairs.append((art, text))
    return pairs


@dataclass
class CorpusConfig:
    input_dir: str
    output_dir: str
    levels: tuple = LEVELS
    compilers: tuple = ("gcc", "clang")
    shard_size: int = 1000
    pseudo_mode: str = "offline"
    pseudo_dir: str = ""
    pseudo_command: str = ""
    dedup_enabled: bool = True
    dedup_field: str = "source"
    shingle_k: int = 8
    num_perm: int = 128
    bands: int = 16
    rows: int = 8
    threshold: float = 0.85
    seed: int = 1
    formatter: str = ""
    compile_timeout: float = 60.0

    @classmethod
    def from_file(cls, path: str) -> "CorpusConfig":
        cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        if not cp.read(path):
            raise FileNotFoundError(path)
        base = Path(path).resolve().parent

        def resolve(p: str) -> str:
            return str((base / p).resolve()) if p else ""

        c = cp["corpus"]
        ps = cp["pseudocode"] if cp.has_section("pseudocode") else {}
        dd = cp["dedup"] if cp.has_section("dedup") else {}
        fm = cp["formatter"] if cp.has_section("formatter") else {}
        cfg = cls(
            input_dir=resolve(c["input_dir"]),
            output_dir=resolve(c["output_dir"]),
            levels=tuple(c.get("levels", " ".join(LEVELS)).replace(",", " ").split()),
            compilers=tuple(c.get("compilers", "gcc clang").replace(",", " ").split()),
            shard_size=int(c.get("shard_size", 1000)),
            compile_timeout=float(c.get("compile_timeout", 60.0)),
            pseudo_mode=ps.get("mode", "offline"),
            pseudo_dir=resolve(ps.get("dir", "")),
            pseudo_command=ps.get("command", ""),
            formatter=fm.get("command", ""),
        )
        if dd:
            cfg.dedup_enabled = cp.getboolean("dedup", "enabled", fallback=True)
            cfg.dedup_field = dd.get("field", cfg.dedup_field)
            cfg.shingle_k = int(dd.get("shingle_k", cfg.shingle_k))
            cfg.num_perm = int(dd.get("num_perm", cfg.num_perm))
            cfg.bands = int(dd.get("bands", cfg.bands))
            cfg.rows = int(dd.get("rows", cfg.rows))
            cfg.threshold = float(dd.get("threshold", cfg.threshold))
            cfg.seed = int(dd.get("seed", cfg.seed))
        if cfg.bands * cfg.rows != cfg.num_perm:
            raise ValueError("dedup: bands * rows must equal num_perm")
        if cfg.dedup_field not in ("source", "pseudo"):
            raise ValueError("dedup: field must be 'source' or 'pseudo'")
        return cfg

    def provider(self) -> PseudoProvider:
        if self.pseudo_mode == "offline":
            return OfflinePseudoProvider(self.pseudo_dir)
        if self.pseudo_mode == "command":
            return CommandPseudoProvider(self.pseudo_command)
        raise ValueError(f"unknown pseudocode mode {self.pseudo_mode!r}")


def _token_count(text: str) -> int:
    return len(lexer.tokens(text))


def build_corpus(config: CorpusConfig) -> dict:
    """Run every stage and write shards plus ``manifest.json``; returns the manifest."""
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for old in out_dir.glob("shard-*.jsonl"):
        old.unlink()
    formatter = external_formatter(shlex.split(config.formatter)) if config.formatter else None
    sources = sorted(Path(config.input_dir).glob("*.c")) if Path(config.input_dir).is_dir() else []
    counts = Counter(input=len(sources))
    drops: list[dict] = []

    normalized: dict[str, str] = {}
    with tempfile.TemporaryDirectory(prefix="dk-corpus-") as work:
        norm_dir = Path(work, "src")
        norm_dir.mkdir()
        for src in sources:
            text = normalize_source(src.read_text(encoding="utf-8", errors="surrogateescape"),
                                    formatter)
            normalized[src.stem] = text
            (norm_dir / src.name).write_text(text + "\n", encoding="utf-8", errors="surrogateescape")
        counts["normalized"] = len(normalized)

        artifacts: list[BinaryArtifact] = []
        for src in sources:
            got = compile_and_strip(str(norm_dir / src.name), config.levels, config.compilers,
                                    str(Path(work, "bin")), config.compile_timeout, drops)
            artifacts.extend(got)
        counts["compiled"] = len(artifacts)
        counts["sources_compiled"] = len({a.source_stem for a in artifacts})

        pairs = ingest_pseudocode(artifacts, config.provider(), drops) if artifacts else []
        counts["paired"] = len(pairs)

    samples: dict[str, CorpusSample] = {}
    reserved_cache: dict[str, object] = {}
    for art, pseudo_raw in pairs:
        source = normalized[art.source_stem]
        pseudo = normalize_pseudo(pseudo_raw, formatter)
        try:
            reserved = reserved_cache.get(pseudo) or extract_reserved(pseudo)
            reserved_cache[pseudo] = reserved
            ir = obfuscate(source, reserved).ir_text
        except (ParseFailed, CollisionError) as exc:
            drops.append({"source": Path(art.source_path).name, "compiler": art.compiler,
                          "level": art.opt_level, "reason": f"obfuscation: {type(exc).__name__}"})
            continue
        sid = sample_id(source, art.opt_level, art.compiler_id)
        samples[sid] = CorpusSample(sid, source, pseudo, ir, art.opt_level, art.compiler_id,
                                    art.stripped, f"{Path(art.source_path).name}:{art.compiler}:-{art.opt_level}")
    counts["obfuscated"] = len(samples)

    dedup_report = []
    if config.dedup_enabled and samples:
        cells = defaultdict(dict)
        for s in samples.values():
            cells[(s.compiler_id, s.opt_level)][s.id] = getattr(s, config.dedup_field)
        for cell in sorted(cells):
            res = dedup(cells[cell], config.threshold, config.bands, config.rows,
                        config.shingle_k, config.seed)
            for d in res.dropped:
                samples.pop(d["id"])
                dedup_report.append({**d, "opt_level": cell[1], "compiler_id": cell[0]})
    counts["deduped"] = len(samples)

    ordered = [samples[k] for k in sorted(samples)]
    shards = []
    size = max(1, config.shard_size)
    for i in range(0, len(ordered), size):
        chunk = ordered[i:i + size]
        name = f"shard-{i // size:05d}.jsonl"
        with open(out_dir / name, "w", encoding="utf-8") as fh:
            for s in chunk:
                fh.write(json.dumps(asdict(s), sort_keys=True) + "\n")
        shards.append({
            "path": name,
            "samples": len(chunk),
            "tokens": {
                "pseudo": sum(_token_count(s.pseudo) for s in chunk),
                "ir": sum(_token_count(s.ir) for s in chunk),
                "source": sum(_token_count(s.source) for s in chunk),
            },
        })

    manifest = {
        "counts": dict(sorted(counts.items())),
        "shards": shards,
        "drops": sorted(drops, key=lambda d: json.dumps(d, sort_keys=True)),
        "dedup": sorted(dedup_report, key=lambda d: d["id"]),
        "parameters": {
            "levels": list(config.levels),
            "compilers": list(config.compilers),
            "pseudo_mode": config.pseudo_mode,
            "dedup": {
                "enabled": config.dedup_enabled,
                "field": config.dedup_field,
                "shingle_k": config.shingle_k,
                "num_perm": config.num_perm,
                "bands": config.bands,
                "rows": config.rows,
                "threshold": config.threshold,
                "seed": config.seed,
                "scope": "per (compiler, opt_level) cell",
                "note": "artifact defaults, not published values",
            },
        },
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
