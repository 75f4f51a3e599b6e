"""LLM-as-judge scoring of recovered identifier quality (1-5)."""
from __future__ import annotations

import json
import os
import re
import threading
import urllib.error
import urllib.request
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Protocol

from decompkit.errors import JudgeUnavailable, RatingUnparseable

ENV_JUDGE_URL = "DECOMPKIT_JUDGE_URL"
ENV_JUDGE_KEY = "DECOMPKIT_JUDGE_KEY"
ENV_JUDGE_MODEL = "DECOMPKIT_JUDGE_MODEL"

_RATING = re.compile(r"^\s*RATING:\s*([1-5])\s*$", re.MULTILINE)


def prompt_template() -> str:
    return resources.files("decompkit.data").joinpath("judge_prompt.txt").read_text()


class JudgeClient(Protocol):
    model_id: str

    def complete(self, prompt: str) -> str: ...


@dataclass(frozen=True)
class JudgeScore:
    rating: int
    rationale_text: str
    judge_model_id: str


class ChatCompletionsJudge:
    """OpenAI-compatible ``/chat/completions`` client with an in-flight cap."""

    def __init__(self, url: str, api_key: str = "", model: str = "gpt-5-mini",
                 timeout: float = 120.0, max_in_flight: int = 4):
        self.url = url
        self.api_key = api_key
        self.model_id = model
        self.timeout = timeout
        self._gate = threading.BoundedSemaphore(max_in_flight)

    @classmethod
    def from_env(cls) -> "ChatCompletionsJudge":
        url = os.environ.get(ENV_JUDGE_URL)
        if not url:
            raise JudgeUnavailable(f"{ENV_JUDGE_URL} is not set")
        return cls(url, os.environ.get(ENV_JUDGE_KEY, ""),
                   os.environ.get(ENV_JUDGE_MODEL, "gpt-5-mini"))

    def complete(self, prompt: str) -> str:
        body = json.dumps({
            "model": self.model_id,
            "messages": [{"role": "user", "content": prompt}],
        }).encode()
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        req = urllib.request.Request(self.url, data=body, headers=headers)
        try:
            with self._gate, urllib.request.urlopen(req, timeout=self.timeout) as resp:
                payload = json.loads(resp.read())
            return payload["choices"][0]["message"]["content"]
        except (urllib.error.URLError, OSError, ValueError, KeyError, IndexError) as exc:
            raise JudgeUnavailable(f"judge endpoint {self.url}: {exc}") from exc


def parse_rating(reply: str) -> Optional[int]:
    matches = _RATING.findall(reply or "")
    return int(matches[-1]) if matches else None


def judge_identifier_quality(gen_src: str, ref_src: str, client: JudgeClient,
                             attempts: int = 3, template: Optional[str] = None) -> JudgeScore:
    template = template or prompt_template()
    prompt = template.replace("{reference}", ref_src).replace("{generated}", gen_src)
    for _ in range(max(1, attempts)):
        reply = client.complete(prompt)
        rating = parse_rating(reply)
        if rating is not None:
            rationale = _RATING.sub("", reply).strip()
            return JudgeScore(rating, rationale, getattr(client, "model_id", "unknown"))
    raise RatingUnparseable(f"no RATING line after {attempts} attempts")
