"""MinHash signatures over token shingles and LSH-banded near-duplicate removal."""
from __future__ import annotations

import hashlib
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

import numpy as np

from decompkit import lexer
from decompkit.errors import TextTooShort

MERSENNE_61 = np.uint64((1 << 61) - 1)


def shingles(text: str, k: int) -> set:
    toks = lexer.token_texts(text)
    if len(toks) < k:
        raise TextTooShort(f"{len(toks)} tokens < shingle size {k}")
    return {"\x1f".join(toks[i:i + k]) for i in range(len(toks) - k + 1)}


def exact_jaccard(a: set, b: set) -> float:
    union = len(a | b)
    return len(a & b) / union if union else 1.0


def _hash32(shingle: str) -> int:
    return int.from_bytes(hashlib.blake2b(shingle.encode("utf-8", "surrogateescape"),
                                          digest_size=4).digest(), "little")


def _permutations(m: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    p = int(MERSENNE_61)
    a = rng.integers(1, p, size=m, dtype=np.uint64)
    b = rng.integers(0, p, size=m, dtype=np.uint64)
    return a, b


_LOW32 = np.uint64(0xFFFFFFFF)
_LOW29 = np.uint64((1 << 29) - 1)


def _mod61(v: np.ndarray) -> np.ndarray:
    """Reduce values below 2**64 modulo 2**61 - 1."""
    v = (v & MERSENNE_61) + (v >> np.uint64(61))
    return np.where(v >= MERSENNE_61, v - MERSENNE_61, v)


def _universal(a: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    """(a*x + b) mod 2**61-1 for a, b < 2**61-1 and x < 2**32, without overflow.

    a is split as a_hi * 2**32 + a_lo; the high product is shifted by 2**32
    using 2**61 = 1 (mod p).
    """
    a_hi = (a >> np.uint64(32))[:, None]
    a_lo = (a & _LOW32)[:, None]
    hi = a_hi * x[None, :]  # < 2**61
    hi = _mod61((hi >> np.uint64(29)) + ((hi & _LOW29) << np.uint64(32)))
    lo = _mod61(a_lo * x[None, :])
    return _mod61(hi + lo + b[:, None])


@dataclass(frozen=True)
class MinHashSignature:
    values: np.ndarray = field(repr=False)
    shingle_k: int
    seed: int

    def __len__(self) -> int:
        return len(self.values)

    def similarity(self, other: "MinHashSignature") -> float:
        if len(self) != len(other) or self.seed != other.seed or self.shingle_k != other.shingle_k:
            raise ValueError("signatures built with different parameters")
        return float(np.mean(self.values == other.values))


def minhash_shingles(shingle_set: Iterable[str], m: int, seed: int, k: int) -> MinHashSignature:
    a, b = _permutations(m, seed)
    x = np.fromiter((_hash32(s) for s in shingle_set), dtype=np.uint64)
    if x.size == 0:
        values = np.full(m, MERSENNE_61, dtype=np.uint64)
    else:
        values = _universal(a, b, x).min(axis=1)
    return MinHashSignature(values, k, seed)


def minhash(text: str, k: int = 8, m: int = 128, seed: int = 1) -> MinHashSignature:
    if k < 1 or m < 1:
        raise ValueError("k and m must be positive")
    return minhash_shingles(shingles(text, k), m, seed, k)


class LshIndex:
    """Banded LSH: pairs sharing any band bucket become candidates."""

    def __init__(self, bands: int, rows: int):
        self.bands = bands
        self.rows = rows
        self.m = bands * rows
        self.tables: list[dict] = [defaultdict(list) for _ in range(bands)]

    def add(self, key: str, sig: MinHashSignature) -> None:
        if len(sig) != self.m:
            raise ValueError(f"signature length {len(sig)} != bands*rows = {self.m}")
        for i, table in enumerate(self.tables):
            band = sig.values[i * self.rows:(i + 1) * self.rows]
            table[hashlib.blake2b(band.tobytes(), digest_size=8).digest()].append(key)

    def candidates(self) -> set:
        pairs = set()
        for table in self.tables:
            for bucket in table.values():
                if len(bucket) < 2:
                    continue
                ordered = sorted(set(bucket))
                for i, x in enumerate(ordered):
                    for y in ordered[i + 1:]:
                        pairs.add((x, y))
        return pairs


def s_curve(s: float, bands: int, rows: int) -> float:
    """Probability that a pair of similarity ``s`` becomes a candidate."""
    return 1.0 - (1.0 - s ** rows) ** bands


@dataclass
class DedupResult:
    kept: list
    dropped: list  # [{"id", "representative", "similarity"}]
    exempt: list  # too short to shingle; kept
    candidates: int = 0


class _UnionFind:
    def __init__(self, keys: Iterable[str]):
        self.parent = {k: k for k in keys}

    def find(self, x: str) -> str:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: str, y: str) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            lo, hi = sorted((rx, ry))
            self.parent[hi] = lo


def dedup(samples: Mapping[str, str], threshold: float = 0.85, bands: int = 16, rows: int = 8,
          k: int = 8, seed: int = 1,
          signatures: Optional[Mapping[str, MinHashSignature]] = None) -> DedupResult:
    """Cluster near-duplicates and keep the lowest id of each cluster.

    ``samples`` maps id -> text. Candidates come from LSH banding and are
    confirmed by estimated similarity >= ``threshold`` before merging.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    m = bands * rows
    sigs: dict[str, MinHashSignature] = {}
    exempt = []
    for key in sorted(samples):
        if signatures is not None and key in signatures:
            sigs[key] = signatures[key]
            continue
        try:
            sigs[key] = minhash(samples[key], k=k, m=m, seed=seed)
        except TextTooShort:
            exempt.append(key)

    index = LshIndex(bands, rows)
    for key, sig in sigs.items():
        index.add(key, sig)
    cands = index.candidates()
    uf = _UnionFind(sigs)
    for x, y in sorted(cands):
        if sigs[x].similarity(sigs[y]) >= threshold:
            uf.union(x, y)

    kept, dropped = [], []
    for key in sorted(sigs):
        rep = uf.find(key)
        if rep == key:
            kept.append(key)
        else:
            dropped.append({"id": key, "representative": rep,
                            "similarity": sigs[key].similarity(sigs[rep])})
    kept = sorted(kept + exempt)
    return DedupResult(kept, dropped, exempt, len(cands))
