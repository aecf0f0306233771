"""Text-generation providers: prompt text in, completion text out.

Three interchangeable implementations: a live HTTP service, fixture replay
keyed by prompt hash (offline, deterministic), and scripted sequences for
fault-injection tests.  All are safe under concurrent calls.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path

import requests

from ..errors import ProviderError

DEFAULT_AUTH_ENV_VAR = "LOGIC_LM_API_KEY"


@dataclass(frozen=True)
class ProviderConfig:
    """Wire settings for a live provider plus the prompting knobs shared by
    every provider (temperature 0 and two in-context examples by default)."""

    endpoint_url: str = ""
    model_name: str = ""
    auth_env_var: str = DEFAULT_AUTH_ENV_VAR
    temperature: float = 0.0
    num_examples: int = 2
    timeout_seconds: float = 60.0
    prompt_field: str = "prompt"  # "messages" switches to chat-style payload
    completion_path: str = "choices.0.text"

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.num_examples < 0:
            raise ValueError("num_examples must be >= 0")


class Provider:
    """Base class; subclasses implement _complete.  Tracks call counts
    (total and per routing key) behind a lock."""

    def __init__(self):
        self._lock = threading.Lock()
        self.call_count = 0
        self.calls_by_key: dict[str, int] = {}

    def complete(self, prompt: str, key: str | None = None) -> str:
        with self._lock:
            self.call_count += 1
            if key is not None:
                self.calls_by_key[key] = self.calls_by_key.get(key, 0) + 1
        return self._complete(prompt, key)

    def _complete(self, prompt: str, key: str | None) -> str:
        raise NotImplementedError


def prompt_key(prompt: str) -> str:
    """Replay fixtures are keyed by this hash of the exact prompt text."""
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class LiveProvider(Provider):
    """POSTs {model, prompt-or-messages, temperature} as JSON and extracts
    one completion text field from the response.

    The auth token is read from the configured environment variable and sent
    as a Bearer header; it is never logged or echoed in errors.
    """

    def __init__(self, config: ProviderConfig):
        super().__init__()
        if not config.endpoint_url:
            raise ValueError("LiveProvider needs an endpoint_url")
        self.config = config

    def _complete(self, prompt: str, key: str | None) -> str:
        cfg = self.config
        body: dict = {"model": cfg.model_name, "temperature": cfg.temperature}
        if cfg.prompt_field == "messages":
            body["messages"] = [{"role": "user", "content": prompt}]
        else:
            body[cfg.prompt_field] = prompt
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(cfg.auth_env_var, "")
        if token:
            headers["Authorization"] = "Bearer " + token
        try:
            response = requests.post(
                cfg.endpoint_url,
                json=body,
                headers=headers,
                timeout=cfg.timeout_seconds,
            )
        except requests.RequestException as exc:
            raise ProviderError(
                "provider request failed: %s" % exc.__class__.__name__
            ) from exc
        if response.status_code != 200:
            raise ProviderError(
                "provider returned HTTP %d" % response.status_code
            )
        try:
            payload = response.json()
        except ValueError:
            raise ProviderError("provider response is not JSON") from None
        return self._extract(payload, cfg.completion_path)

    @staticmethod
    def _extract(payload, path: str) -> str:
        node = payload
        for part in path.split("."):
            try:
                node = node[int(part)] if part.isdigit() else node[part]
            except (KeyError, IndexError, TypeError):
                raise ProviderError(
                    "provider response has no field at %r" % path
                ) from None
        if not isinstance(node, str):
            raise ProviderError("completion field at %r is not text" % path)
        return node


class ReplayProvider(Provider):
    """Offline fixtures: sha256(prompt) first, then the routing key."""

    def __init__(self, fixtures: dict[str, str]):
        super().__init__()
        self.fixtures = dict(fixtures)

    @classmethod
    def from_file(cls, path: str | Path) -> "ReplayProvider":
        data = json.loads(Path(path).read_text())
        if not isinstance(data, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in data.items()
        ):
            raise ProviderError("replay fixture file must map strings to strings")
        return cls(data)

    def _complete(self, prompt: str, key: str | None) -> str:
        hashed = prompt_key(prompt)
        if hashed in self.fixtures:
            return self.fixtures[hashed]
        if key is not None and key in self.fixtures:
            return self.fixtures[key]
        raise ProviderError(
            "no replay fixture for prompt hash %s%s"
            % (hashed[:12], " or key %r" % key if key else "")
        )


@dataclass
class _Queue:
    items: list[str] = field(default_factory=list)
    cursor: int = 0


class ScriptedProvider(Provider):
    """Scripted completions, consumed in order.

    `scripts` maps a routing key (usually the problem id) to its response
    sequence; a plain list acts as one global sequence.  Running past the
    end of a script is a ProviderError.
    """

    def __init__(self, scripts: dict[str, list[str]] | list[str]):
        super().__init__()
        if isinstance(scripts, list):
            self._queues = {None: _Queue(list(scripts))}
        else:
            self._queues = {k: _Queue(list(v)) for k, v in scripts.items()}

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedProvider":
        data = json.loads(Path(path).read_text())
        return cls(data)

    def _complete(self, prompt: str, key: str | None) -> str:
        with self._lock:
            queue = self._queues.get(key) or self._queues.get(None)
            if queue is None:
                raise ProviderError("no script for key %r" % key)
            if queue.cursor >= len(queue.items):
                raise ProviderError(
                    "script for key %r exhausted after %d responses"
                    % (key, len(queue.items))
                )
            item = queue.items[queue.cursor]
            queue.cursor += 1
            return item
