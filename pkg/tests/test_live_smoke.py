"""Credential-gated smoke tests for the live provider adapters.

These hit real vendor APIs; set LIVE_SMOKE=1 plus the matching key to run
them. CI and the acceptance suite run entirely on mocks.
"""

import os

import pytest

from sales_assist.providers import LlmRequest, from_env, make_llm_client, tts_synthesize

_OPTED_IN = os.environ.get("LIVE_SMOKE") == "1"


def _gate(key):
    return pytest.mark.skipif(
        not (_OPTED_IN and os.environ.get(key)),
        reason=f"live smoke needs LIVE_SMOKE=1 and {key}")


@_gate("ANTHROPIC_API_KEY")
def test_anthropic_completion_smoke():
    config = from_env()
    config.llm_provider = "anthropic"
    response = make_llm_client(config).complete(
        LlmRequest("Reply with the word ok.", "ok?", max_output_tokens=8))
    assert response.text


@_gate("GEMINI_API_KEY")
def test_gemini_completion_smoke():
    config = from_env()
    config.llm_provider = "gemini"
    response = make_llm_client(config).complete(
        LlmRequest("Reply with the word ok.", "ok?", max_output_tokens=8))
    assert response.text


@_gate("ELEVENLABS_API_KEY")
def test_elevenlabs_tts_smoke():
    config = from_env()
    config.tts_provider = "elevenlabs"
    audio = tts_synthesize(config, "Hello there.", "21m00Tcm4TlvDq8ikWAM")
    assert audio[:2] in (b"\xff\xfb", b"ID")  # MP3 frame sync or ID3 header


@_gate("DEEPGRAM_API_KEY")
def test_deepgram_stream_smoke():
    from sales_assist.providers import stt_open_stream

    config = from_env()
    session = stt_open_stream(config)
    session.push_audio(b"\x00" * 3200)
    session.close()
