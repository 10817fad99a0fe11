"""Uniform chat-completion gateway with structured-output enforcement.

One abstraction covers every model endpoint the system talks to: live
HTTP providers (openai / anthropic / gemini chat APIs, translated at the
edge), a deterministic ordered mock for unit tests, and a route-keyed
scripted provider that can drive a whole round offline.

``complete_structured`` is total: it either returns a value that
validates against the supplied JSON schema or raises
:class:`SchemaViolation` carrying every attempt, never unvalidated
text.  Validation failures are repaired by feeding the validator's
error text back to the model as a user message, up to the caller's
repair budget.
"""

from __future__ import annotations

import json
import logging
import os
import re
import threading
import time
from dataclasses import dataclass, field

import jsonschema

logger = logging.getLogger(__name__)

ROLES = ("system", "user", "assistant")


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------


class GatewayError(Exception):
    transient = False


class Timeout(GatewayError):
    transient = True


class RateLimited(GatewayError):
    transient = True


class ProviderError(GatewayError):
    def __init__(self, message: str, transient: bool = False):
        super().__init__(message)
        self.transient = transient


class AuthMissing(GatewayError):
    pass


class ScriptExhausted(GatewayError):
    pass


class SchemaViolation(GatewayError):
    """All structured attempts failed; ``attempts`` records each one."""

    def __init__(self, message: str, attempts: list["StructuredAttempt"]):
        super().__init__(message)
        self.attempts = attempts


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"role must be one of {ROLES}, got {self.role!r}")
        if self.role in ("system", "user") and not self.content:
            raise ValueError(f"{self.role} message content must be non-empty")


@dataclass(frozen=True)
class ModelProfile:
    provider: str
    model_name: str
    temperature: float = 0.7
    max_output_tokens: int = 4096
    request_timeout: float = 60.0
    rate_limit: int = 4

    def __post_init__(self) -> None:
        if self.rate_limit < 1:
            raise ValueError("rate_limit must be >= 1")
        if self.request_timeout <= 0:
            raise ValueError("request_timeout must be > 0")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True)
class SchemaSpec:
    """A JSON-Schema structural description of a required model output."""

    document: dict

    def __post_init__(self) -> None:
        jsonschema.Draft202012Validator.check_schema(self.document)

    def validation_errors(self, value: object) -> list[str]:
        validator = jsonschema.Draft202012Validator(self.document)
        errors = sorted(validator.iter_errors(value), key=lambda e: (list(e.absolute_path), e.message))
        return [f"{'/'.join(str(p) for p in err.absolute_path) or '<root>'}: {err.message}" for err in errors]


@dataclass
class CompletionResult:
    text: str
    prompt_tokens: int = 0
    completion_tokens: int = 0
    latency: float = 0.0
    attempts: int = 1  # transport attempts incl. transient retries

    def __post_init__(self) -> None:
        if self.prompt_tokens < 0 or self.completion_tokens < 0:
            raise ValueError("token counts must be >= 0")


@dataclass
class StructuredAttempt:
    completion: CompletionResult
    errors: list[str] = field(default_factory=list)


@dataclass
class StructuredResult:
    value: object
    attempts: list[StructuredAttempt]

    @property
    def attempt_count(self) -> int:
        return len(self.attempts)

    @property
    def total_usage(self) -> tuple[int, int]:
        prompt = sum(a.completion.prompt_tokens for a in self.attempts)
        completion = sum(a.completion.completion_tokens for a in self.attempts)
        return prompt, completion


# ---------------------------------------------------------------------------
# Providers
# ---------------------------------------------------------------------------


def _estimate_tokens(text: str) -> int:
    # whitespace tokens are a good-enough proxy for mock accounting
    return len(text.split())


class MockProvider:
    """Deterministic ordered-script provider.

    ``script`` entries are response strings or exceptions to raise.
    Responses are consumed strictly in order; running past the end
    raises :class:`ScriptExhausted`.
    """

    def __init__(self, script: list):
        if not script:
            raise ValueError("mock script must be non-empty")
        self._script = list(script)
        self._cursor = 0
        self._lock = threading.Lock()

    def complete(self, profile: ModelProfile, messages: list[ChatMessage], route: str | None = None) -> CompletionResult:
        with self._lock:
            if self._cursor >= len(self._script):
                raise ScriptExhausted(f"mock script exhausted after {len(self._script)} responses")
            entry = self._script[self._cursor]
            self._cursor += 1
        if isinstance(entry, Exception):
            raise entry
        prompt_tokens = sum(_estimate_tokens(m.content) for m in messages)
        return CompletionResult(text=entry, prompt_tokens=prompt_tokens, completion_tokens=_estimate_tokens(entry))


class ScriptedProvider:
    """Route-keyed deterministic provider for whole-round offline runs.

    ``routes`` maps a route key (e.g. ``"1AC/harms/1/drafter"``) to a
    response.  Keys may be ``fnmatch`` patterns; exact matches win, then
    patterns in insertion order.  Responses are JSON-serializable values
    (serialized at call time) or strings; the special form
    ``{"$error": "provider"|"timeout"|"rate_limited"}`` raises instead.
    Routes are reusable, so one ``*/reviewer`` entry can approve every
    draft of a round.
    """

    def __init__(self, routes: dict[str, object]):
        if not routes:
            raise ValueError("scripted routes must be non-empty")
        self._routes = dict(routes)

    @classmethod
    def from_file(cls, path) -> "ScriptedProvider":
        payload = json.loads(open(path, "r", encoding="utf-8").read())
        return cls(payload["routes"] if "routes" in payload else payload)

    def _lookup(self, route: str) -> object:
        if route in self._routes:
            return self._routes[route]
        import fnmatch

        for pattern, value in self._routes.items():
            if fnmatch.fnmatchcase(route, pattern):
                return value
        raise ScriptExhausted(f"no scripted response for route {route!r}")

    def complete(self, profile: ModelProfile, messages: list[ChatMessage], route: str | None = None) -> CompletionResult:
        if route is None:
            raise ProviderError("scripted provider requires a route hint")
        entry = self._lookup(route)
        if isinstance(entry, dict) and "$error" in entry:
            kind = entry["$error"]
            if kind == "timeout":
                raise Timeout(f"scripted timeout at {route}")
            if kind == "rate_limited":
                raise RateLimited(f"scripted rate limit at {route}")
            raise ProviderError(f"scripted provider error at {route}", transient=bool(entry.get("transient")))
        text = entry if isinstance(entry, str) else json.dumps(entry, ensure_ascii=False)
        prompt_tokens = sum(_estimate_tokens(m.content) for m in messages)
        return CompletionResult(text=text, prompt_tokens=prompt_tokens, completion_tokens=_estimate_tokens(text))


class HttpChatProvider:
    """Live chat-completion provider; request translation happens here.

    Credentials come from per-provider environment variables and are
    checked before any network call.
    """

    ENV_VARS = {
        "openai": "OPENAI_API_KEY",
        "anthropic": "ANTHROPIC_API_KEY",
        "gemini": "GEMINI_API_KEY",
    }

    def __init__(self, kind: str, base_url: str | None = None):
        if kind not in self.ENV_VARS:
            raise ValueError(f"unknown provider kind {kind!r}")
        self.kind = kind
        self.base_url = base_url

    def _api_key(self) -> str:
        var = self.ENV_VARS[self.kind]
        key = os.environ.get(var)
        if not key:
            raise AuthMissing(f"set {var} to use the {self.kind} provider")
        return key

    def complete(self, profile: ModelProfile, messages: list[ChatMessage], route: str | None = None) -> CompletionResult:
        key = self._api_key()
        import httpx

        started = time.monotonic()
        try:
            if self.kind == "openai":
                url = (self.base_url or "https://api.openai.com/v1") + "/chat/completions"
                payload = {
                    "model": profile.model_name,
                    "temperature": profile.temperature,
                    "max_tokens": profile.max_output_tokens,
                    "messages": [{"role": m.role, "content": m.content} for m in messages],
                }
                resp = httpx.post(url, json=payload, timeout=profile.request_timeout,
                                  headers={"Authorization": f"Bearer {key}"})
                self._raise_for_status(resp)
                data = resp.json()
                text = data["choices"][0]["message"]["content"]
                usage = data.get("usage", {})
                prompt_tokens = usage.get("prompt_tokens", 0)
                completion_tokens = usage.get("completion_tokens", 0)
            elif self.kind == "anthropic":
                url = (self.base_url or "https://api.anthropic.com/v1") + "/messages"
                system = "\n\n".join(m.content for m in messages if m.role == "system")
                payload = {
                    "model": profile.model_name,
                    "max_tokens": profile.max_output_tokens,
                    "temperature": profile.temperature,
                    "messages": [{"role": m.role, "content": m.content} for m in messages if m.role != "system"],
                }
                if system:
                    payload["system"] = system
                resp = httpx.post(url, json=payload, timeout=profile.request_timeout,
                                  headers={"x-api-key": key, "anthropic-version": "2023-06-01"})
                self._raise_for_status(resp)
                data = resp.json()
                text = "".join(part.get("text", "") for part in data.get("content", []))
                usage = data.get("usage", {})
                prompt_tokens = usage.get("input_tokens", 0)
                completion_tokens = usage.get("output_tokens", 0)
            else:  # gemini
                base = self.base_url or "https://generativelanguage.googleapis.com/v1beta"
                url = f"{base}/models/{profile.model_name}:generateContent"
                system = "\n\n".join(m.content for m in messages if m.role == "system")
                contents = [
                    {"role": "model" if m.role == "assistant" else "user", "parts": [{"text": m.content}]}
                    for m in messages
                    if m.role != "system"
                ]
                payload: dict = {
                    "contents": contents,
                    "generationConfig": {
                        "temperature": profile.temperature,
                        "maxOutputTokens": profile.max_output_tokens,
                    },
                }
                if system:
                    payload["systemInstruction"] = {"parts": [{"text": system}]}
                resp = httpx.post(url, json=payload, timeout=profile.request_timeout,
                                  headers={"x-goog-api-key": key})
                self._raise_for_status(resp)
                data = resp.json()
                parts = data["candidates"][0]["content"]["parts"]
                text = "".join(part.get("text", "") for part in parts)
                meta = data.get("usageMetadata", {})
                prompt_tokens = meta.get("promptTokenCount", 0)
                completion_tokens = meta.get("candidatesTokenCount", 0)
        except httpx.TimeoutException as exc:
            raise Timeout(str(exc)) from exc
        except httpx.HTTPError as exc:
            raise ProviderError(str(exc), transient=True) from exc
        latency = time.monotonic() - started
        return CompletionResult(text=text, prompt_tokens=prompt_tokens,
                                completion_tokens=completion_tokens, latency=latency)

    @staticmethod
    def _raise_for_status(resp) -> None:
        if resp.status_code == 429:
            raise RateLimited(f"{resp.status_code}: {resp.text[:200]}")
        if resp.status_code >= 500:
            raise ProviderError(f"{resp.status_code}: {resp.text[:200]}", transient=True)
        if resp.status_code >= 400:
            raise ProviderError(f"{resp.status_code}: {resp.text[:200]}")


def default_providers() -> dict[str, object]:
    return {kind: HttpChatProvider(kind) for kind in HttpChatProvider.ENV_VARS}


# ---------------------------------------------------------------------------
# Gateway
# ---------------------------------------------------------------------------

_FENCE_RE = re.compile(r"```(?:json)?\s*\n(.*?)```", re.DOTALL)


def extract_json(text: str):
    """Parse model output as JSON, tolerating a markdown code fence."""
    candidate = text.strip()
    fenced = _FENCE_RE.search(candidate)
    if fenced:
        candidate = fenced.group(1).strip()
    return json.loads(candidate)


class Gateway:
    """Thread-safe front door to all model providers.

    Transient failures (timeouts, rate limits, 5xx) retry up to
    ``retry_attempts`` with exponential backoff; per-profile in-flight
    concurrency is capped at ``profile.rate_limit``.
    """

    def __init__(
        self,
        providers: dict[str, object] | None = None,
        retry_attempts: int = 3,
        backoff_base: float = 1.0,
        sleep=time.sleep,
    ):
        self._providers = providers if providers is not None else default_providers()
        self.retry_attempts = retry_attempts
        self.backoff_base = backoff_base
        self._sleep = sleep
        self._limits: dict[tuple[str, str], threading.BoundedSemaphore] = {}
        self._limits_lock = threading.Lock()
        self.calls = 0  # total provider calls, incl. retries

    def _provider(self, profile: ModelProfile):
        try:
            return self._providers[profile.provider]
        except KeyError:
            raise ProviderError(f"no provider registered for {profile.provider!r}") from None

    def _semaphore(self, profile: ModelProfile) -> threading.BoundedSemaphore:
        key = (profile.provider, profile.model_name)
        with self._limits_lock:
            sem = self._limits.get(key)
            if sem is None:
                sem = threading.BoundedSemaphore(profile.rate_limit)
                self._limits[key] = sem
            return sem

    def complete(self, profile: ModelProfile, messages: list[ChatMessage], route: str | None = None) -> CompletionResult:
        if not messages:
            raise ValueError("messages must be non-empty")
        provider = self._provider(profile)
        sem = self._semaphore(profile)
        last_error: GatewayError | None = None
        with sem:
            for attempt in range(1, self.retry_attempts + 1):
                try:
                    self.calls += 1
                    result = provider.complete(profile, messages, route=route)
                    result.attempts = attempt
                    return result
                except GatewayError as exc:
                    if not exc.transient or attempt == self.retry_attempts:
                        raise
                    last_error = exc
                    delay = self.backoff_base * (2 ** (attempt - 1))
                    logger.warning("transient %s from %s (attempt %d/%d), backing off %.1fs",
                                   type(exc).__name__, profile.provider, attempt, self.retry_attempts, delay)
                    self._sleep(delay)
        raise last_error  # pragma: no cover - loop always returns or raises

    def complete_structured(
        self,
        profile: ModelProfile,
        messages: list[ChatMessage],
        schema: SchemaSpec,
        repair_budget: int = 2,
        route: str | None = None,
    ) -> StructuredResult:
        if repair_budget < 0:
            raise ValueError("repair_budget must be >= 0")
        attempts: list[StructuredAttempt] = []
        convo = list(messages)
        for _ in range(repair_budget + 1):
            completion = self.complete(profile, convo, route=route)
            try:
                value = extract_json(completion.text)
            except json.JSONDecodeError as exc:
                errors = [f"invalid JSON: {exc}"]
            else:
                errors = schema.validation_errors(value)
                if not errors:
                    attempts.append(StructuredAttempt(completion=completion))
                    return StructuredResult(value=value, attempts=attempts)
            attempts.append(StructuredAttempt(completion=completion, errors=errors))
            # repair: echo the invalid output, then the validator text verbatim
            convo = convo + [
                ChatMessage("assistant", completion.text or "(empty)"),
                ChatMessage(
                    "user",
                    "Your previous output failed validation:\n"
                    + "\n".join(f"- {e}" for e in errors)
                    + "\nRespond again with only a corrected JSON object.",
                ),
            ]
        raise SchemaViolation(
            f"output failed schema validation after {len(attempts)} attempts", attempts
        )
