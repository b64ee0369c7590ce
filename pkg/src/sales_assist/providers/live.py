"""Live adapters for the hosted LLM, TTS, and STT services.

Each LLM adapter is one HTTPS round-trip with a 15s timeout and a single
retry on transient transport failures. Adapters accept an injected
httpx.Client so tests can stub the wire without touching adapter code.
These paths are exercised by credential-gated smoke tests only.
"""

from __future__ import annotations

import json
import time
import urllib.parse
from typing import Iterator

import httpx

from ..errors import (
    ProviderAuthError,
    ProviderConnectionError,
    ProviderProtocolError,
    ProviderTimeoutError,
)
from .base import LlmRequest, LlmResponse, SttEvent, check_request
from .config import ProviderConfig

DEFAULT_TIMEOUT_S = 15.0

OPENAI_URL = "https://api.openai.com/v1/chat/completions"
ANTHROPIC_URL = "https://api.anthropic.com/v1/messages"
GEMINI_URL_TEMPLATE = (
    "https://generativelanguage.googleapis.com/v1beta/models/{model}:generateContent"
)
ELEVENLABS_URL_TEMPLATE = "https://api.elevenlabs.io/v1/text-to-speech/{voice_id}"
DEEPGRAM_WSS = "wss://api.deepgram.com/v1/listen"


class _HttpLlmClient:
    provider_id = "unknown"

    def __init__(self, config: ProviderConfig, http_client: httpx.Client | None = None):
        self.config = config
        self.model_id = config.llm_model
        self._client = http_client or httpx.Client(timeout=DEFAULT_TIMEOUT_S)

    def complete(self, request: LlmRequest) -> LlmResponse:
        check_request(request)
        started = time.perf_counter()
        response = self._post_with_retry(*self._build(request))
        if response.status_code in (401, 403):
            raise ProviderAuthError(
                f"{self.provider_id} rejected credentials (HTTP {response.status_code})",
                provider=self.provider_id)
        if response.status_code >= 400:
            raise ProviderProtocolError(
                f"{self.provider_id} returned HTTP {response.status_code}: {response.text[:200]}",
                provider=self.provider_id)
        try:
            text = self._extract(response.json())
        except (KeyError, IndexError, TypeError, json.JSONDecodeError) as exc:
            raise ProviderProtocolError(
                f"{self.provider_id} payload not understood: {exc}",
                provider=self.provider_id) from exc
        return LlmResponse(
            text=text,
            latency=time.perf_counter() - started,
            provider_id=self.provider_id,
            model_id=self.model_id,
        )

    def _post_with_retry(self, url: str, headers: dict, payload: dict) -> httpx.Response:
        last_exc: Exception | None = None
        for attempt in range(2):
            try:
                return self._client.post(url, headers=headers, json=payload)
            except httpx.TimeoutException as exc:
                raise ProviderTimeoutError(
                    f"{self.provider_id} timed out after {DEFAULT_TIMEOUT_S}s",
                    provider=self.provider_id) from exc
            except httpx.TransportError as exc:
                last_exc = exc
        raise ProviderConnectionError(
            f"{self.provider_id} unreachable: {last_exc}", provider=self.provider_id)

    def _build(self, request: LlmRequest) -> tuple[str, dict, dict]:
        raise NotImplementedError

    def _extract(self, payload: dict) -> str:
        raise NotImplementedError


class OpenAiClient(_HttpLlmClient):
    provider_id = "openai"

    def _build(self, request: LlmRequest):
        key = self.config.require_credential("openai")
        payload = {
            "model": self.model_id,
            "messages": [
                {"role": "system", "content": request.system_prompt},
                {"role": "user", "content": request.user_prompt},
            ],
            "max_tokens": request.max_output_tokens,
        }
        if request.expects_json:
            payload["response_format"] = {"type": "json_object"}
        return OPENAI_URL, {"Authorization": f"Bearer {key}"}, payload

    def _extract(self, payload: dict) -> str:
        return payload["choices"][0]["message"]["content"]


class AnthropicClient(_HttpLlmClient):
    provider_id = "anthropic"

    def _build(self, request: LlmRequest):
        key = self.config.require_credential("anthropic")
        headers = {"x-api-key": key, "anthropic-version": "2023-06-01"}
        payload = {
            "model": self.model_id,
            "system": request.system_prompt,
            "messages": [{"role": "user", "content": request.user_prompt}],
            "max_tokens": request.max_output_tokens,
        }
        return ANTHROPIC_URL, headers, payload

    def _extract(self, payload: dict) -> str:
        return payload["content"][0]["text"]


class GeminiClient(_HttpLlmClient):
    provider_id = "gemini"

    def _build(self, request: LlmRequest):
        key = self.config.require_credential("gemini")
        url = GEMINI_URL_TEMPLATE.format(model=self.model_id)
        url = f"{url}?key={urllib.parse.quote(key)}"
        payload = {
            "system_instruction": {"parts": [{"text": request.system_prompt}]},
            "contents": [{"role": "user", "parts": [{"text": request.user_prompt}]}],
            "generationConfig": {"maxOutputTokens": request.max_output_tokens},
        }
        return url, {}, payload

    def _extract(self, payload: dict) -> str:
        return payload["candidates"][0]["content"]["parts"][0]["text"]


def elevenlabs_synthesize(
    config: ProviderConfig,
    text: str,
    voice_id: str,
    http_client: httpx.Client | None = None,
) -> bytes:
    key = config.require_credential("elevenlabs")
    client = http_client or httpx.Client(timeout=DEFAULT_TIMEOUT_S)
    url = ELEVENLABS_URL_TEMPLATE.format(voice_id=voice_id)
    try:
        response = client.post(
            url,
            headers={"xi-api-key": key, "accept": "audio/mpeg"},
            json={"text": text, "model_id": "eleven_turbo_v2_5"},
        )
    except httpx.TimeoutException as exc:
        raise ProviderTimeoutError("elevenlabs timed out", provider="elevenlabs") from exc
    except httpx.TransportError as exc:
        raise ProviderConnectionError(f"elevenlabs unreachable: {exc}",
                                      provider="elevenlabs") from exc
    if response.status_code in (401, 403):
        raise ProviderAuthError("elevenlabs rejected credentials", provider="elevenlabs")
    if response.status_code >= 400:
        raise ProviderProtocolError(
            f"elevenlabs returned HTTP {response.status_code}", provider="elevenlabs")
    if not response.content:
        raise ProviderProtocolError("elevenlabs returned empty audio", provider="elevenlabs")
    return response.content


class DeepgramSttSession:
    """Streaming STT over the Deepgram WebSocket API.

    Configured with interim results on and a 1500 ms utterance-end timeout.
    Requires the optional ``websockets`` dependency; exercised only by
    credential-gated smoke tests.
    """

    def __init__(self, config: ProviderConfig, model: str = "nova-2"):
        key = config.require_credential("deepgram")
        try:
            from websockets.sync.client import connect
        except ImportError as exc:  # pragma: no cover - optional dependency
            raise ProviderConnectionError(
                "live STT needs the 'websockets' package (pip install sales-assist[live])",
                provider="deepgram") from exc
        params = urllib.parse.urlencode({
            "encoding": "linear16",
            "sample_rate": 16000,
            "channels": 1,
            "model": model,
            "interim_results": "true",
            "utterance_end_ms": 1500,
            "punctuate": "true",
        })
        try:
            self._ws = connect(
                f"{DEEPGRAM_WSS}?{params}",
                additional_headers={"Authorization": f"Token {key}"},
            )
        except Exception as exc:
            message = str(exc)
            if "401" in message or "403" in message:
                raise ProviderAuthError("deepgram rejected credentials",
                                        provider="deepgram") from exc
            raise ProviderConnectionError(f"deepgram unreachable: {message}",
                                          provider="deepgram") from exc
        self._closed = False

    def push_audio(self, chunk: bytes) -> None:
        if self._closed:
            from ..errors import SessionClosedError
            raise SessionClosedError("push_audio on a closed session", provider="deepgram")
        self._ws.send(chunk)

    def iter_events(self) -> Iterator[SttEvent]:
        while not self._closed:
            try:
                raw = self._ws.recv()
            except Exception:
                return
            if isinstance(raw, bytes):
                continue
            message = json.loads(raw)
            if message.get("type") != "Results":
                continue
            alternatives = message.get("channel", {}).get("alternatives", [])
            if not alternatives:
                continue
            text = alternatives[0].get("transcript", "")
            if not text:
                continue
            start = float(message.get("start", 0.0))
            yield SttEvent(
                text=text,
                is_final=bool(message.get("is_final")),
                start_time=start,
                end_time=start + float(message.get("duration", 0.0)),
                channel_speaker=None,
            )

    def close(self) -> None:
        if not self._closed:
            self._closed = True
            try:
                self._ws.send(json.dumps({"type": "CloseStream"}))
                self._ws.close()
            except Exception:
                pass
