"""Text embedding providers for the identifier reward."""
from __future__ import annotations

import hashlib
import json
import math
import os
import threading
import urllib.error
import urllib.request
from typing import Optional, Protocol, Sequence

import numpy as np

from decompkit import lexer
from decompkit.errors import ProviderUnavailable

ENV_EMBED_URL = "DECOMPKIT_EMBED_URL"


class EmbeddingProvider(Protocol):
    provider_id: str
    dimension: int

    def embed(self, text: str) -> np.ndarray: ...


class HashedTokenProvider:
    """Deterministic hashed token-frequency vectors, unit-normalized.

    Offline stand-in for a learned code embedding: shared tokens raise the
    cosine, differing identifiers lower it.
    """

    def __init__(self, dimension: int = 1024, seed: int = 0):
        self.dimension = dimension
        self.seed = seed
        self.provider_id = f"hashed-token-v1/d{dimension}/s{seed}"

    def _bucket(self, token: str) -> int:
        h = hashlib.blake2b(token.encode("utf-8", "surrogateescape"), digest_size=8,
                            salt=self.seed.to_bytes(8, "little"))
        return int.from_bytes(h.digest(), "little") % self.dimension

    def embed(self, text: str) -> np.ndarray:
        toks = lexer.token_texts(text) or [text]
        vec = np.zeros(self.dimension)
        for tok in toks:
            vec[self._bucket(tok)] += 1.0
        return vec / np.linalg.norm(vec)


class HttpEmbeddingProvider:
    """JSON over HTTP: POST ``{"text": ...}`` -> ``{"vector": [...]}``."""

    def __init__(self, url: str, timeout: float = 30.0, provider_id: Optional[str] = None,
                 max_in_flight: int = 8):
        self.url = url
        self.timeout = timeout
        self.provider_id = provider_id or f"http:{url}"
        self.dimension = 0
        self._gate = threading.BoundedSemaphore(max_in_flight)

    @classmethod
    def from_env(cls) -> "HttpEmbeddingProvider":
        url = os.environ.get(ENV_EMBED_URL)
        if not url:
            raise ProviderUnavailable(f"{ENV_EMBED_URL} is not set")
        return cls(url)

    def embed(self, text: str) -> np.ndarray:
        body = json.dumps({"text": text}).encode()
        req = urllib.request.Request(self.url, data=body,
                                     headers={"Content-Type": "application/json"})
        try:
            with self._gate, urllib.request.urlopen(req, timeout=self.timeout) as resp:
                payload = json.loads(resp.read())
        except (urllib.error.URLError, OSError, ValueError) as exc:
            raise ProviderUnavailable(f"embedding endpoint {self.url}: {exc}") from exc
        vec = np.asarray(payload.get("vector") or payload.get("embedding"), dtype=float)
        if vec.ndim != 1 or vec.size == 0:
            raise ProviderUnavailable(f"embedding endpoint {self.url} returned no vector")
        self.dimension = vec.size
        return vec


def cosine(a: Sequence[float], b: Sequence[float]) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    value = float(np.dot(a, b) / (na * nb))
    return max(-1.0, min(1.0, value)) if math.isfinite(value) else 0.0
