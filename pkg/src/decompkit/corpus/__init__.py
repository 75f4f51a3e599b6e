from decompkit.corpus.build import (
    BinaryArtifact,
    CorpusConfig,
    CorpusSample,
    build_corpus,
    compile_and_strip,
    ingest_pseudocode,
)
from decompkit.corpus.minhash import LshIndex, MinHashSignature, dedup, minhash
from decompkit.corpus.normalize import normalize_pseudo, normalize_source

__all__ = [
    "BinaryArtifact", "CorpusConfig", "CorpusSample", "build_corpus", "compile_and_strip",
    "ingest_pseudocode", "LshIndex", "MinHashSignature", "dedup", "minhash",
    "normalize_pseudo", "normalize_source",
]
