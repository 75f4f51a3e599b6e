"""Command-line entry point: ``decompkit <verb> ...``."""
from __future__ import annotations

import argparse
import configparser
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional

from decompkit.errors import DecompkitError
from decompkit.toolchain import CompilerConfig

log = logging.getLogger("decompkit")


def _load_settings(path: Optional[str]) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    if path and not cp.read(path):
        raise FileNotFoundError(path)
    return cp


def _compiler(cp: configparser.ConfigParser) -> CompilerConfig:
    cfg = CompilerConfig()
    if cp.has_section("toolchain"):
        t = cp["toolchain"]
        cfg = replace(
            cfg,
            cc=t.get("cc", cfg.cc),
            timeout=float(t.get("timeout", cfg.timeout)),
        )
        if "cflags" in t:
            cfg = replace(cfg, cflags=tuple(t["cflags"].split()))
    return cfg


def _embedding_provider(cp: configparser.ConfigParser):
    from decompkit.embeddings import HashedTokenProvider, HttpEmbeddingProvider

    url = cp.get("embeddings", "url", fallback="") or os.environ.get("DECOMPKIT_EMBED_URL", "")
    return HttpEmbeddingProvider(url) if url else HashedTokenProvider()


def _judge(cp: configparser.ConfigParser):
    from decompkit.metrics.judge import ChatCompletionsJudge

    if cp.has_section("judge") and cp.get("judge", "url", fallback=""):
        j = cp["judge"]
        return ChatCompletionsJudge(j["url"], os.environ.get("DECOMPKIT_JUDGE_KEY", ""),
                                    j.get("model", "gpt-5-mini"))
    return ChatCompletionsJudge.from_env()


def _read_jsonl(path: str) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def _write_jsonl(path: str, records) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def _source_files(path: str) -> list[Path]:
    p = Path(path)
    return sorted(p.glob("*.c")) if p.is_dir() else [p]


def cmd_obfuscate(args, cp) -> int:
    from decompkit.obfuscate import obfuscate
    from decompkit.reserved import extract_reserved

    records, failures = [], 0
    for src in _source_files(args.source):
        pseudo_text = ""
        if args.pseudo:
            pp = Path(args.pseudo)
            cand = pp / f"{src.stem}.txt" if pp.is_dir() else pp
            if cand.exists():
                pseudo_text = cand.read_text()
        try:
            unit = obfuscate(src.read_text(), extract_reserved(pseudo_text))
        except DecompkitError as exc:
            failures += 1
            records.append({"id": src.stem, "error": f"{type(exc).__name__}: {exc}"})
            continue
        records.append({"id": src.stem, **unit.to_record()})
    _write_jsonl(args.out, records)
    log.info("obfuscated %d file(s), %d failure(s)", len(records) - failures, failures)
    return 1 if failures and failures == len(records) else 0


def cmd_reward(args, cp) -> int:
    from decompkit.rewards import RewardConfig, batch_rewards

    if args.pairs:
        pairs = _read_jsonl(args.pairs)
    elif args.gen and args.ref:
        pair = {"id": Path(args.gen).stem, "gen": Path(args.gen).read_text(),
                "ref": Path(args.ref).read_text()}
        if args.header:
            pair["header"] = Path(args.header).read_text()
        pairs = [pair]
    else:
        raise SystemExit("reward: give --pairs, or both --gen and --ref")
    config = RewardConfig(compiler=_compiler(cp), provider=_embedding_provider(cp),
                          workers=args.workers)
    records = batch_rewards(pairs, args.mode, config)
    if args.out:
        _write_jsonl(args.out, records)
    else:
        for rec in records:
            print(json.dumps(rec, sort_keys=True))
    return 0


def _metrics_config(args, cp):
    from decompkit.pipeline import MetricsConfig

    tasks = tuple(t.strip() for t in args.task.split(",") if t.strip())
    unknown = set(tasks) - {"reexec", "r2i", "judge"}
    if unknown:
        raise SystemExit(f"unknown task(s): {', '.join(sorted(unknown))}")
    return MetricsConfig(compiler=_compiler(cp), tasks=tasks,
                         judge=_judge(cp) if "judge" in tasks else None, workers=args.workers)


def cmd_evaluate(args, cp) -> int:
    from decompkit.pipeline import evaluate_outputs, load_benchmark
    from decompkit.report import write_report

    samples = load_benchmark(args.bench)
    gen_path = Path(args.gen)
    if gen_path.suffix == ".json":
        run = json.loads(gen_path.read_text())
        generated = {k: v.get("src_text") for k, v in run["outputs"].items()}
    elif gen_path.is_dir():
        generated = {p.stem: p.read_text() for p in gen_path.glob("*.c")}
    else:
        generated = {r["id"]: r.get("src_text", r.get("gen")) for r in _read_jsonl(args.gen)}
    report = evaluate_outputs(samples, generated, _metrics_config(args, cp))
    paths = write_report(report, args.out, figure=not args.no_figure)
    print(Path(paths["table"]).read_text(), end="")
    return 0


def cmd_corpus_build(args, cp) -> int:
    from decompkit.corpus.build import CorpusConfig, build_corpus

    manifest = build_corpus(CorpusConfig.from_file(args.corpus_config))
    print(json.dumps(manifest["counts"], sort_keys=True))
    return 0


def cmd_pipeline_run(args, cp) -> int:
    from decompkit.pipeline import (
        PipelineConfig,
        load_benchmark,
        make_backend,
        run_benchmark,
        run_two_phase,
        validate_benchmark,
    )
    from decompkit.report import write_report

    compiler = _compiler(cp)
    samples = load_benchmark(args.bench)
    rejected = []
    if not args.no_validate:
        samples, rejected = validate_benchmark(samples, compiler, args.workers)
        for r in rejected:
            log.warning("reference %s fails its own harness (%s); excluded", r["id"], r["stage_failed"])
    config = PipelineConfig(preset=args.preset, workers=args.workers)
    phase1 = make_backend(args.phase1, samples, 1)
    phase2 = make_backend(args.phase2, samples, 2) if config.mode == "two_phase" else None
    run = run_two_phase(samples, phase1, phase2, config)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "run.json").write_text(json.dumps(run.to_json(), indent=2, sort_keys=True) + "\n")
    if args.task:
        report = run_benchmark(samples, run, _metrics_config(args, cp))
        report.metadata["rejected_references"] = rejected
        paths = write_report(report, str(out), figure=not args.no_figure)
        print(Path(paths["table"]).read_text(), end="")
    return 0


def cmd_report(args, cp) -> int:
    from decompkit.report import load_report, write_report

    paths = write_report(load_report(args.input), args.out_dir, figure=not args.no_figure)
    print(Path(paths["table"]).read_text(), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="decompkit", description="Two-phase C decompilation toolkit")
    p.add_argument("--config", help="INI settings file ([toolchain] cc/timeout/cflags, [embeddings] url, [judge] url/model)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="verb", required=True)

    o = sub.add_parser("obfuscate", help="source -> placeholder IR with rename map")
    o.add_argument("--source", required=True, help="C file or directory of .c files")
    o.add_argument("--pseudo", help="pseudocode file, or directory of <stem>.txt")
    o.add_argument("--out", required=True, help="output JSONL")
    o.set_defaults(func=cmd_obfuscate)

    r = sub.add_parser("reward", help="structure or identifier rewards")
    r.add_argument("--mode", choices=("structure", "identifier"), required=True)
    r.add_argument("--pairs", help='JSONL of {"id", "gen", "ref", "header"?}')
    r.add_argument("--gen")
    r.add_argument("--ref")
    r.add_argument("--header")
    r.add_argument("--out")
    r.add_argument("--workers", type=int, default=4)
    r.set_defaults(func=cmd_reward)

    e = sub.add_parser("evaluate", help="score generated sources against a benchmark")
    e.add_argument("--task", default="reexec,r2i", help="comma list of reexec, r2i, judge")
    e.add_argument("--gen", required=True, help="run.json, JSONL of {id, src_text} or dir of .c")
    e.add_argument("--bench", required=True)
    e.add_argument("--out", required=True, help="report directory")
    e.add_argument("--workers", type=int, default=8)
    e.add_argument("--no-figure", action="store_true")
    e.set_defaults(func=cmd_evaluate)

    c = sub.add_parser("corpus", help="training-corpus construction")
    csub = c.add_subparsers(dest="corpus_verb", required=True)
    cb = csub.add_parser("build")
    cb.add_argument("--config", dest="corpus_config", required=True, help="corpus INI file")
    cb.set_defaults(func=cmd_corpus_build)

    pl = sub.add_parser("pipeline", help="two-phase decompilation runs")
    psub = pl.add_subparsers(dest="pipeline_verb", required=True)
    pr = psub.add_parser("run")
    pr.add_argument("--bench", required=True)
    pr.add_argument("--phase1", default="oracle", help="echo | oracle | replay:<file> | http[:<url>]")
    pr.add_argument("--phase2", default="oracle")
    pr.add_argument("--preset", default="pseudo-ir-src")
    pr.add_argument("--task", default="reexec,r2i", help="metrics to compute; empty to skip")
    pr.add_argument("--out", required=True)
    pr.add_argument("--workers", type=int, default=8)
    pr.add_argument("--no-validate", action="store_true", help="skip reference self-check")
    pr.add_argument("--no-figure", action="store_true")
    pr.set_defaults(func=cmd_pipeline_run)

    rp = sub.add_parser("report", help="re-render a report.json")
    rp.add_argument("--in", dest="input", required=True)
    rp.add_argument("--out-dir", required=True)
    rp.add_argument("--no-figure", action="store_true")
    rp.set_defaults(func=cmd_report)
    return p


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args, _load_settings(args.config))
    except (DecompkitError, FileNotFoundError, ValueError) as exc:
        print(f"decompkit: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
