"""Chat-completion clients and provider routing.

A model id like "openai/gpt-4.1" routes to the provider named by its
prefix; ids without a known prefix (including ids whose slash belongs
to the model name itself) fall through to the default provider. All
providers speak the OpenAI-style chat completions wire format here.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Protocol

import requests

from ..errors import ClientRejected, ClientTimeout, ConfigError

__all__ = [
    "STANDARD_STYLE",
    "STRUCTURED_REASONING_STYLE",
    "DEFAULT_TEMPERATURE",
    "DEFAULT_MAX_TOKENS",
    "DEFAULT_PROVIDER",
    "PROVIDER_ROUTES",
    "ModelClientConfig",
    "ProviderRoute",
    "ChatClient",
    "HttpChatClient",
    "ScriptedClient",
    "resolve_provider",
]

STANDARD_STYLE = "standard"
STRUCTURED_REASONING_STYLE = "structured-reasoning"

DEFAULT_TEMPERATURE = 0.3
DEFAULT_MAX_TOKENS = 16000


@dataclass(frozen=True)
class ProviderRoute:
    name: str
    base_url: str
    api_key_env: str


PROVIDER_ROUTES: dict[str, ProviderRoute] = {
    "openai": ProviderRoute("openai", "https://api.openai.com/v1", "OPENAI_API_KEY"),
    "anthropic": ProviderRoute("anthropic", "https://api.anthropic.com/v1", "ANTHROPIC_API_KEY"),
    "gemini": ProviderRoute(
        "gemini", "https://generativelanguage.googleapis.com/v1beta/openai", "GEMINI_API_KEY"
    ),
    "x-ai": ProviderRoute("x-ai", "https://api.x.ai/v1", "XAI_API_KEY"),
    "deepseek": ProviderRoute("deepseek", "https://api.deepseek.com/v1", "DEEPSEEK_API_KEY"),
    "moonshot": ProviderRoute("moonshot", "https://api.moonshot.ai/v1", "MOONSHOT_API_KEY"),
    "together": ProviderRoute("together", "https://api.together.xyz/v1", "TOGETHER_API_KEY"),
}

DEFAULT_PROVIDER = "together"


def resolve_provider(
    model: str,
    routes: dict[str, ProviderRoute] | None = None,
    default_provider: str = DEFAULT_PROVIDER,
) -> tuple[ProviderRoute, str]:
    """Split a model id into (provider route, provider-local model id)."""
    table = PROVIDER_ROUTES if routes is None else routes
    prefix, _, rest = model.partition("/")
    if rest and prefix in table:
        return table[prefix], rest
    if default_provider not in table:
        raise ConfigError(f"unknown default provider {default_provider!r}")
    return table[default_provider], model


@dataclass(frozen=True)
class ModelClientConfig:
    """Sampling settings for one model.

    The structured-reasoning style never sends temperature or token
    limits; constructing such a config zeroes both fields so the
    request payload cannot carry them.
    """

    model: str
    temperature: float | None = DEFAULT_TEMPERATURE
    max_tokens: int | None = DEFAULT_MAX_TOKENS
    style: str = STANDARD_STYLE

    def __post_init__(self) -> None:
        if self.style not in (STANDARD_STYLE, STRUCTURED_REASONING_STYLE):
            raise ConfigError(f"unknown sampling style {self.style!r}")
        if self.style == STRUCTURED_REASONING_STYLE:
            object.__setattr__(self, "temperature", None)
            object.__setattr__(self, "max_tokens", None)

    def request_payload(self, provider_model: str, prompt: str) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "model": provider_model,
            "messages": [{"role": "user", "content": prompt}],
        }
        if self.temperature is not None:
            payload["temperature"] = self.temperature
        if self.max_tokens is not None:
            payload["max_tokens"] = self.max_tokens
        return payload


class ChatClient(Protocol):
    def complete(self, prompt: str, config: ModelClientConfig) -> str: ...


# transport(url, headers, payload, timeout) -> (status code, response body)
Transport = Callable[[str, dict[str, str], dict[str, Any], float], tuple[int, Any]]


def _requests_transport(url: str, headers: dict[str, str],
                        payload: dict[str, Any], timeout: float) -> tuple[int, Any]:
    response = requests.post(url, headers=headers, json=payload, timeout=timeout)
    try:
        body = response.json()
    except ValueError:
        body = response.text
    return response.status_code, body


class HttpChatClient:
    """One blocking chat completion per decision."""

    def __init__(
        self,
        routes: dict[str, ProviderRoute] | None = None,
        default_provider: str = DEFAULT_PROVIDER,
        timeout: float = 120.0,
        transport: Transport | None = None,
    ) -> None:
        self.routes = PROVIDER_ROUTES if routes is None else routes
        self.default_provider = default_provider
        self.timeout = timeout
        self._transport = transport or _requests_transport

    def complete(self, prompt: str, config: ModelClientConfig) -> str:
        route, model = resolve_provider(config.model, self.routes, self.default_provider)
        api_key = os.environ.get(route.api_key_env, "")
        if not api_key:
            raise ClientRejected(f"missing credential {route.api_key_env} for {route.name}")
        headers = {
            "Authorization": f"Bearer {api_key}",
            "Content-Type": "application/json",
        }
        url = f"{route.base_url}/chat/completions"
        payload = config.request_payload(model, prompt)
        try:
            status, body = self._transport(url, headers, payload, self.timeout)
        except requests.Timeout as exc:
            raise ClientTimeout(f"{route.name} timed out after {self.timeout}s") from exc
        except requests.RequestException as exc:
            raise ClientRejected(f"{route.name} request failed: {exc}") from exc
        if status >= 400:
            raise ClientRejected(f"{route.name} returned HTTP {status}: {body}")
        try:
            content = body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ClientRejected(f"{route.name} returned an unexpected body shape") from exc
        if not isinstance(content, str):
            raise ClientRejected(f"{route.name} returned non-text content")
        return content


class ScriptedClient:
    """Deterministic stand-in for tests and replays.

    Returns the scripted responses in order, repeating the last one
    once the script is exhausted; records every prompt it was shown.
    """

    def __init__(self, responses: Iterable[str]) -> None:
        self.responses = list(responses)
        if not self.responses:
            raise ValueError("scripted client needs at least one response")
        self.prompts: list[str] = []
        self._cursor = 0

    def complete(self, prompt: str, config: ModelClientConfig) -> str:
        self.prompts.append(prompt)
        index = min(self._cursor, len(self.responses) - 1)
        self._cursor += 1
        return self.responses[index]
