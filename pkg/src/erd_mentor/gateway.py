"""Pluggable LLM execution: a chat-completions HTTP backend and a scripted mock.

The wire protocol is the de-facto chat-completions shape
(``POST {endpoint}/chat/completions`` with a single user message carrying
the whole prompt body), which covers the commercial APIs and the local
inference servers that mimic them. Every call produces an
:class:`LlmExchange` holding the verbatim request and response for audit;
the exchange never contains credentials, only the name of the environment
variable they came from.

The mock backend replays a script: a JSON map from prompt digest to a list
of responses, consumed one per call (the last entry repeats when the list
runs out), with ``"*"`` as a wildcard sequence for prompts not listed. That
makes a full pipeline run a pure function of the script.
"""

from __future__ import annotations

import json
import os
import random
import threading
import time
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Callable, Protocol, TypeVar

from .prompts import PromptText, ShapeMismatch, UnparseableResponse

T = TypeVar("T")

ENDPOINT_ENV = "ERD_MENTOR_LLM_ENDPOINT"
MODEL_ENV = "ERD_MENTOR_LLM_MODEL"
KEY_VAR_ENV = "ERD_MENTOR_LLM_KEY_VAR"

#: Appended to the prompt when a reply could not be parsed into the
#: requested shape and we ask again.
CORRECTIVE_INSTRUCTION = "Respond with only the JSON object in the specified shape."


class GatewayError(Exception):
    retryable = False


class GatewayTimeout(GatewayError):
    retryable = True


class RateLimited(GatewayError):
    retryable = True


class AuthFailure(GatewayError):
    retryable = False


class BackendError(GatewayError):
    def __init__(self, status: int | None, body: str, retryable: bool = False):
        super().__init__(f"backend error {status}: {body[:200]}")
        self.status = status
        self.body = body
        self.retryable = retryable


class StructuredOutputFailure(GatewayError):
    """Every parse attempt failed; carries the raw texts for diagnosis."""

    def __init__(self, message: str, attempts: list[str], exchanges: list["LlmExchange"]):
        super().__init__(message)
        self.attempts = attempts
        self.exchanges = exchanges


@dataclass(frozen=True)
class LlmConfig:
    endpoint: str = ""
    model: str = "gpt-4"
    temperature: float = 0.2
    max_output_tokens: int | None = None
    timeout: float = 60.0
    max_retries: int = 2
    api_key_var: str = "ERD_MENTOR_LLM_KEY"

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature must be in [0, 2], got {self.temperature}")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")

    @classmethod
    def from_env(cls, **overrides) -> "LlmConfig":
        values = {
            "endpoint": os.environ.get(ENDPOINT_ENV, ""),
            "model": os.environ.get(MODEL_ENV, "gpt-4"),
            "api_key_var": os.environ.get(KEY_VAR_ENV, "ERD_MENTOR_LLM_KEY"),
        }
        values.update(overrides)
        return cls(**values)


@dataclass(frozen=True)
class LlmExchange:
    """Audit record of one round trip, persisted verbatim."""

    id: str
    prompt_digest: str
    request: str
    response: str
    latency_ms: float
    backend_id: str
    timestamp: str
    token_usage: dict | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "prompt_digest": self.prompt_digest,
            "request": self.request,
            "response": self.response,
            "latency_ms": self.latency_ms,
            "backend_id": self.backend_id,
            "timestamp": self.timestamp,
            "token_usage": self.token_usage,
        }


@dataclass
class BackendReply:
    text: str
    token_usage: dict | None = None


class Backend(Protocol):
    id: str

    def send(self, digest: str, payload: dict, timeout: float) -> BackendReply: ...


class HttpChatBackend:
    """Chat-completions endpoint speaking the common JSON wire shape."""

    def __init__(self, endpoint: str, api_key_var: str):
        if not endpoint:
            raise ValueError("HTTP backend needs an endpoint URL")
        self.endpoint = endpoint.rstrip("/")
        self.api_key_var = api_key_var
        self.id = f"http:{self.endpoint}"

    def send(self, digest: str, payload: dict, timeout: float) -> BackendReply:
        import requests

        headers = {}
        api_key = os.environ.get(self.api_key_var, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        try:
            response = requests.post(f"{self.endpoint}/chat/completions",
                                     json=payload, headers=headers, timeout=timeout)
        except requests.Timeout as exc:
            raise GatewayTimeout(str(exc)) from exc
        except requests.RequestException as exc:
            raise BackendError(None, str(exc), retryable=True) from exc
        if response.status_code == 429:
            raise RateLimited(f"rate limited: {response.text[:200]}")
        if response.status_code in (401, 403):
            raise AuthFailure(f"authentication rejected (HTTP {response.status_code})")
        if response.status_code >= 500:
            raise BackendError(response.status_code, response.text, retryable=True)
        if response.status_code >= 400:
            raise BackendError(response.status_code, response.text)
        try:
            body = response.json()
            text = body["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise BackendError(response.status_code, response.text) from exc
        usage = body.get("usage") if isinstance(body, dict) else None
        return BackendReply(text=text, token_usage=usage)


class MockBackend:
    """Deterministic scripted backend for tests, CI and offline runs."""

    id = "mock"

    def __init__(self, script: dict):
        self._sequences: dict[str, list[str]] = {}
        for digest, responses in script.items():
            if isinstance(responses, str):
                responses = [responses]
            if not isinstance(responses, list) or not responses:
                raise ValueError(f"mock script entry {digest!r} must be a non-empty list")
            self._sequences[digest] = [str(r) for r in responses]
        self._counters: dict[str, int] = {}
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path: str) -> "MockBackend":
        with open(path, "r", encoding="utf-8") as handle:
            return cls(json.load(handle))

    def send(self, digest: str, payload: dict, timeout: float) -> BackendReply:
        key = digest if digest in self._sequences else "*"
        if key not in self._sequences:
            raise BackendError(None, f"mock script has no entry for digest {digest}")
        with self._lock:
            index = self._counters.get(key, 0)
            self._counters[key] = index + 1
        responses = self._sequences[key]
        return BackendReply(text=responses[min(index, len(responses) - 1)])


class LlmGateway:
    """Executes prompts against a backend with retry, backoff and auditing."""

    def __init__(self, backend: Backend, config: LlmConfig, max_concurrency: int = 4,
                 sleep: Callable[[float], None] = time.sleep,
                 rng: random.Random | None = None):
        self.backend = backend
        self.config = config
        self._slots = threading.BoundedSemaphore(max_concurrency)
        self._sleep = sleep
        self._rng = rng or random.Random()

    def _payload(self, body: str) -> dict:
        payload: dict = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": body}],
            "temperature": self.config.temperature,
        }
        if self.config.max_output_tokens is not None:
            payload["max_tokens"] = self.config.max_output_tokens
        return payload

    def _complete_body(self, digest: str, body: str) -> tuple[str, LlmExchange]:
        payload = self._payload(body)
        attempt = 0
        while True:
            started = time.perf_counter()
            try:
                with self._slots:
                    reply = self.backend.send(digest, payload, self.config.timeout)
            except GatewayError as exc:
                if not exc.retryable or attempt >= self.config.max_retries:
                    raise
                # exponential backoff, base 1s, doubling, with jitter
                delay = (2 ** attempt) + self._rng.uniform(0.0, 0.5)
                self._sleep(delay)
                attempt += 1
                continue
            latency_ms = (time.perf_counter() - started) * 1000.0
            exchange = LlmExchange(
                id=f"ex_{uuid.uuid4().hex[:12]}",
                prompt_digest=digest,
                request=json.dumps(payload),
                response=reply.text,
                latency_ms=latency_ms,
                backend_id=self.backend.id,
                timestamp=datetime.now(timezone.utc).isoformat(),
                token_usage=reply.token_usage,
            )
            return reply.text, exchange

    def complete(self, prompt: PromptText) -> tuple[str, LlmExchange]:
        """One round trip; transport-level failures retry with backoff."""
        return self._complete_body(prompt.input_digest, prompt.body)

    def complete_structured(self, prompt: PromptText,
                            parser: Callable[[str], T]) -> tuple[T, list[LlmExchange]]:
        """Round trips until ``parser`` accepts the reply.

        A reply the parser rejects triggers a re-ask with a corrective
        instruction appended, up to ``max_retries`` extra attempts. The
        prompt digest stays that of the original prompt so scripted mocks
        can answer re-asks as a sequence.
        """
        exchanges: list[LlmExchange] = []
        attempts: list[str] = []
        body = prompt.body
        for round_no in range(self.config.max_retries + 1):
            if round_no > 0:
                body = f"{prompt.body}\n\n{CORRECTIVE_INSTRUCTION}"
            text, exchange = self._complete_body(prompt.input_digest, body)
            exchanges.append(exchange)
            attempts.append(text)
            try:
                return parser(text), exchanges
            except (UnparseableResponse, ShapeMismatch):
                continue
        raise StructuredOutputFailure(
            f"no parseable {prompt.kind} response after {len(attempts)} attempts",
            attempts=attempts, exchanges=exchanges,
        )
