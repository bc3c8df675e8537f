"""External-service clients and their deterministic test doubles.

The LLM transport is a single-endpoint JSON completion contract (prompt
in, text out); the text-to-motion backend receives both conditioning
texts and returns a motion payload. Endpoints and credentials come from
LLM_ENDPOINT / LLM_API_KEY / T2M_ENDPOINT unless configured explicitly.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import requests

from .motion import MotionSequence
from .motion_io import motion_from_json, motion_to_json
from .textgen import EMPTY_TOKEN

DEFAULT_TIMEOUT_S = 30.0


class ClientError(RuntimeError):
    pass


class BackendError(ClientError):
    pass


class HttpCompletionClient:
    """POSTs {"prompt": ...} to the completion endpoint, expects {"text": ...}."""

    def __init__(self, endpoint=None, api_key=None, timeout_s=DEFAULT_TIMEOUT_S):
        self.endpoint = endpoint or os.environ.get("LLM_ENDPOINT")
        self.api_key = api_key if api_key is not None else os.environ.get("LLM_API_KEY")
        self.timeout_s = timeout_s
        if not self.endpoint:
            raise ClientError("no completion endpoint configured (set LLM_ENDPOINT)")

    def complete(self, prompt: str) -> str:
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            response = requests.post(
                self.endpoint, json={"prompt": prompt}, headers=headers, timeout=self.timeout_s
            )
            response.raise_for_status()
            payload = response.json()
        except requests.RequestException as exc:
            raise ClientError(f"completion request to {self.endpoint} failed: {exc}") from exc
        if not isinstance(payload, dict) or not isinstance(payload.get("text"), str):
            raise ClientError(f"completion endpoint {self.endpoint} returned no text field")
        return payload["text"]


class HttpT2MBackend:
    """Text-to-motion backend speaking the JSON motion wire format."""

    def __init__(self, endpoint=None, timeout_s=DEFAULT_TIMEOUT_S):
        self.endpoint = endpoint or os.environ.get("T2M_ENDPOINT")
        self.timeout_s = timeout_s
        if not self.endpoint:
            raise BackendError("no generator endpoint configured (set T2M_ENDPOINT)")

    def generate(self, coarse_text, detailed_text, target_length=None) -> MotionSequence:
        body = {
            "coarse_text": coarse_text,
            "detailed_text": detailed_text,
            "target_length": target_length,
        }
        try:
            response = requests.post(self.endpoint, json=body, timeout=self.timeout_s)
            response.raise_for_status()
            payload = response.json()
        except requests.RequestException as exc:
            raise BackendError(f"generation request to {self.endpoint} failed: {exc}") from exc
        return motion_from_json(payload)


# ---------------------------------------------------------------------------
# Deterministic stub generator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StubFixture:
    id: str
    coarse_text: str
    detailed_text: str
    motion: MotionSequence


def _token_set(text):
    import re

    return {t for t in re.split(r"[^a-z0-9]+", text.lower()) if t}


def _jaccard(a, b):
    if not a and not b:
        return 0.0
    union = a | b
    return len(a & b) / len(union) if union else 0.0


# Detail overlap dominates when the query carries detail text; the coarse
# caption acts as a weaker prior so detail edits can retarget retrieval.
DETAIL_WEIGHT = 1.0
COARSE_WEIGHT = 0.25


def stub_score(coarse_query, detail_query, fixture: StubFixture):
    score = COARSE_WEIGHT * _jaccard(_token_set(coarse_query), _token_set(fixture.coarse_text))
    if detail_query and detail_query != EMPTY_TOKEN:
        score += DETAIL_WEIGHT * _jaccard(
            _token_set(detail_query), _token_set(fixture.detailed_text)
        )
    return score


def stub_generate(coarse_text, detailed_text, fixtures) -> MotionSequence:
    """Nearest stored fixture by token-overlap score; ties break by id."""
    if not fixtures:
        raise BackendError("stub fixture store is empty")
    if not coarse_text:
        raise BackendError("coarse text must be non-empty")
    best = max(fixtures, key=lambda f: (stub_score(coarse_text, detailed_text, f), f.id))
    return best.motion


@dataclass
class StubT2MBackend:
    """In-process test double retrieving the closest stored fixture."""

    fixtures: list
    calls: list = field(default_factory=list)

    def generate(self, coarse_text, detailed_text, target_length=None) -> MotionSequence:
        self.calls.append((coarse_text, detailed_text, target_length))
        return stub_generate(coarse_text, detailed_text, self.fixtures)


def load_stub_fixtures(registry_path):
    """Read a stub-fixture registry JSON written by the demo workspace."""
    import json
    from pathlib import Path

    from .motion_io import load_motion

    registry_path = Path(registry_path)
    base = registry_path.parent
    fixtures = []
    for entry in json.loads(registry_path.read_text(encoding="utf-8")):
        motion, _ = load_motion(base / entry["motion_file"])
        fixtures.append(
            StubFixture(entry["id"], entry["coarse_text"], entry["detailed_text"], motion)
        )
    return fixtures


__all__ = [
    "BackendError",
    "ClientError",
    "HttpCompletionClient",
    "HttpT2MBackend",
    "StubFixture",
    "StubT2MBackend",
    "load_stub_fixtures",
    "motion_to_json",
    "stub_generate",
    "stub_score",
]
