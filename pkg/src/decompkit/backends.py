"""Model backends for the two decompilation phases.

All backends implement ``generate(prompt, params) -> text``. Besides the
HTTP client there are offline ones: an echo backend for plumbing checks,
oracle backends built from ground truth (upper-bound runs) and a replay
backend serving recorded responses.
"""
from __future__ import annotations

import hashlib
import json
import os
import re
import threading
import urllib.error
import urllib.request
from typing import Iterable, Optional, Protocol

from decompkit.errors import BackendUnavailable
from decompkit.obfuscate import IRUnit, deobfuscate

ENV_BACKEND_URL = "DECOMPKIT_BACKEND_URL"

GREEDY = {"temperature": 0.0, "top_p": 1.0, "do_sample": False, "max_new_tokens": 2048}

_FENCE = re.compile(r"```[A-Za-z0-9_+-]*\n(.*?)\n```", re.DOTALL)


class ModelBackend(Protocol):
    backend_id: str

    def generate(self, prompt: str, params: Optional[dict] = None) -> str: ...


def extract_code(text: str) -> str:
    """Content of the last fenced block, or ``text`` itself when unfenced."""
    blocks = _FENCE.findall(text)
    return blocks[-1] if blocks else text


def prompt_key(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8", "surrogateescape")).hexdigest()


class EchoBackend:
    backend_id = "echo"

    def generate(self, prompt: str, params: Optional[dict] = None) -> str:
        return extract_code(prompt)


class LookupBackend:
    """Answers with a fixed mapping from prompt payload to response text."""

    def __init__(self, table: dict, backend_id: str):
        self.table = dict(table)
        self.backend_id = backend_id

    def generate(self, prompt: str, params: Optional[dict] = None) -> str:
        payload = extract_code(prompt)
        try:
            return self.table[payload]
        except KeyError:
            raise BackendUnavailable(f"{self.backend_id}: no entry for prompt payload") from None


def ground_truth_ir_backend(pairs: Iterable[tuple[str, str]]) -> LookupBackend:
    """Phase-1 oracle: pseudocode -> its true IR."""
    return LookupBackend(dict(pairs), "oracle-ir")


class RenameMapOracleBackend:
    """Phase-2 oracle: inverts the stored rename map of the matching IR."""

    backend_id = "oracle-names"

    def __init__(self, units: Iterable[IRUnit]):
        self.units = {u.ir_text: u for u in units}

    def generate(self, prompt: str, params: Optional[dict] = None) -> str:
        unit = self.units.get(extract_code(prompt))
        if unit is None:
            raise BackendUnavailable("oracle-names: IR not produced by a known rename map")
        return deobfuscate(unit)


class ReplayBackend:
    """Serves responses recorded as JSONL ``{"prompt_sha256", "text"}``."""

    def __init__(self, path: str):
        self.path = path
        self.backend_id = f"replay:{os.path.basename(path)}"
        self.responses = {}
        try:
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        rec = json.loads(line)
                        self.responses[rec["prompt_sha256"]] = rec["text"]
        except OSError as exc:
            raise BackendUnavailable(f"cannot read recording {path}: {exc}") from exc

    def generate(self, prompt: str, params: Optional[dict] = None) -> str:
        try:
            return self.responses[prompt_key(prompt)]
        except KeyError:
            raise BackendUnavailable(f"{self.backend_id}: prompt not recorded") from None

    @staticmethod
    def record(path: str, prompt: str, text: str) -> None:
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps({"prompt_sha256": prompt_key(prompt), "text": text}) + "\n")


class HttpBackend:
    """JSON over HTTP: POST ``{"prompt", "params"}`` -> ``{"text"}``."""

    def __init__(self, url: str, timeout: float = 600.0, max_in_flight: int = 4,
                 backend_id: Optional[str] = None):
        self.url = url
        self.timeout = timeout
        self.backend_id = backend_id or f"http:{url}"
        self._gate = threading.BoundedSemaphore(max_in_flight)

    def generate(self, prompt: str, params: Optional[dict] = None) -> str:
        body = json.dumps({"prompt": prompt, "params": params or GREEDY}).encode()
        req = urllib.request.Request(self.url, data=body,
                                     headers={"Content-Type": "application/json"})
        try:
            with self._gate, urllib.request.urlopen(req, timeout=self.timeout) as resp:
                return json.loads(resp.read())["text"]
        except (urllib.error.URLError, OSError, ValueError, KeyError) as exc:
            raise BackendUnavailable(f"backend {self.url}: {exc}") from exc
