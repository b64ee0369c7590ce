"""Provider-agnostic access to STT, LLM, and TTS services.

The factory functions below pick an adapter from the ProviderConfig enums;
pipeline code never branches on provider names itself.
"""

from __future__ import annotations

from ..errors import ProviderAuthError, TtsNotConfiguredError
from .base import (
    AudioFormat,
    LlmRequest,
    LlmResponse,
    REQUIRED_AUDIO_FORMAT,
    SttEvent,
    check_audio_format,
)
from .config import MockDelays, ProviderConfig, from_env
from .mock import SILENT_MP3, MockLlmClient, MockSttSession, mock_tts

__all__ = [
    "AudioFormat",
    "LlmRequest",
    "LlmResponse",
    "MockDelays",
    "MockLlmClient",
    "MockSttSession",
    "ProviderConfig",
    "REQUIRED_AUDIO_FORMAT",
    "SILENT_MP3",
    "SttEvent",
    "from_env",
    "make_llm_client",
    "stt_open_stream",
    "tts_synthesize",
]


def make_llm_client(config: ProviderConfig, http_client=None):
    """Return the LLM adapter selected by ``config.llm_provider``."""
    provider = config.llm_provider
    if provider == "mock":
        return MockLlmClient(config.mock_delays, model_id=config.llm_model)
    from . import live

    adapters = {
        "openai": live.OpenAiClient,
        "anthropic": live.AnthropicClient,
        "gemini": live.GeminiClient,
    }
    if provider not in adapters:
        raise ValueError(f"unknown llm_provider {provider!r}")
    config.require_credential(provider)
    return adapters[provider](config, http_client=http_client)


def stt_open_stream(
    config: ProviderConfig,
    audio_format: AudioFormat = REQUIRED_AUDIO_FORMAT,
    script: list[dict] | None = None,
):
    """Open a streaming STT session (scripted for the mock provider)."""
    check_audio_format(audio_format)
    if config.stt_provider == "mock":
        return MockSttSession(script or [])
    if config.stt_provider == "deepgram":
        from . import live

        return live.DeepgramSttSession(config)
    raise ValueError(f"unknown stt_provider {config.stt_provider!r}")


def tts_synthesize(config: ProviderConfig, text: str, voice_id: str) -> bytes:
    """Synthesize MP3 speech for ``text`` with the configured provider."""
    if config.tts_provider == "disabled":
        raise TtsNotConfiguredError("TTS provider is disabled", provider="disabled")
    if config.tts_provider == "mock":
        return mock_tts(text, voice_id)
    if config.tts_provider == "elevenlabs":
        from . import live

        return live.elevenlabs_synthesize(config, text, voice_id)
    raise ValueError(f"unknown tts_provider {config.tts_provider!r}")
