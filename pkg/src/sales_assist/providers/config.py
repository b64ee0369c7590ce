"""Provider selection and credentials, resolved from the environment."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Mapping

from ..errors import ProviderAuthError

LLM_PROVIDERS = ("openai", "anthropic", "gemini", "mock")
STT_PROVIDERS = ("deepgram", "mock")
TTS_PROVIDERS = ("elevenlabs", "mock", "disabled")

_CREDENTIAL_KEYS = {
    "openai": "OPENAI_API_KEY",
    "anthropic": "ANTHROPIC_API_KEY",
    "gemini": "GEMINI_API_KEY",
    "deepgram": "DEEPGRAM_API_KEY",
    "elevenlabs": "ELEVENLABS_API_KEY",
}

ENV_VARS = ("LLM_PROVIDER", "LLM_MODEL", "TTS_PROVIDER") + tuple(_CREDENTIAL_KEYS.values())

_DEFAULT_MODELS = {
    "openai": "gpt-4o",
    "anthropic": "claude-sonnet-4-20250514",
    "gemini": "gemini-2.0-flash",
    "mock": "mock-1",
}


@dataclass(frozen=True)
class MockDelays:
    """Artificial per-stage latencies for the mock LLM, in seconds."""

    detection: float = 0.0
    retrieval: float = 0.0
    generation: float = 0.0

    @classmethod
    def parse(cls, spec: str) -> "MockDelays":
        """Parse a ``d,r,g`` string such as ``0.7,0.8,1.3``."""
        parts = [p.strip() for p in spec.split(",")]
        if len(parts) != 3:
            raise ValueError("delays must be three comma-separated seconds: d,r,g")
        d, r, g = (float(p) for p in parts)
        return cls(detection=d, retrieval=r, generation=g)


@dataclass
class ProviderConfig:
    llm_provider: str = "mock"
    llm_model: str = "mock-1"
    stt_provider: str = "mock"
    tts_provider: str = "mock"
    credentials: dict[str, str] = field(default_factory=dict)
    mock_delays: MockDelays = field(default_factory=MockDelays)

    def validate(self) -> None:
        if self.llm_provider not in LLM_PROVIDERS:
            raise ValueError(f"unknown llm_provider {self.llm_provider!r}")
        if self.stt_provider not in STT_PROVIDERS:
            raise ValueError(f"unknown stt_provider {self.stt_provider!r}")
        if self.tts_provider not in TTS_PROVIDERS:
            raise ValueError(f"unknown tts_provider {self.tts_provider!r}")
        for provider in (self.llm_provider, self.stt_provider, self.tts_provider):
            if provider in _CREDENTIAL_KEYS:
                self.require_credential(provider)

    def require_credential(self, provider: str) -> str:
        key = _CREDENTIAL_KEYS[provider]
        value = self.credentials.get(key, "")
        if not value:
            raise ProviderAuthError(f"{provider} requires {key}", provider=provider)
        return value

    def non_secret_dict(self) -> dict:
        """Echo of the configuration safe to expose over HTTP."""
        return {
            "llm_provider": self.llm_provider,
            "llm_model": self.llm_model,
            "stt_provider": self.stt_provider,
            "tts_provider": self.tts_provider,
            "mock_delays": {
                "detection": self.mock_delays.detection,
                "retrieval": self.mock_delays.retrieval,
                "generation": self.mock_delays.generation,
            },
            "credentials_present": sorted(k for k, v in self.credentials.items() if v),
        }


def from_env(env: Mapping[str, str] | None = None) -> ProviderConfig:
    """Build a ProviderConfig from environment variables.

    ``LLM_PROVIDER`` and ``TTS_PROVIDER`` select adapters (default mock);
    the STT provider becomes deepgram whenever ``DEEPGRAM_API_KEY`` is set.
    """
    env = os.environ if env is None else env
    llm_provider = env.get("LLM_PROVIDER", "mock").lower()
    credentials = {k: env[k] for k in _CREDENTIAL_KEYS.values() if env.get(k)}
    return ProviderConfig(
        llm_provider=llm_provider,
        llm_model=env.get("LLM_MODEL") or _DEFAULT_MODELS.get(llm_provider, "mock-1"),
        stt_provider="deepgram" if env.get("DEEPGRAM_API_KEY") else "mock",
        tts_provider=env.get("TTS_PROVIDER", "mock").lower(),
        credentials=credentials,
    )
