"""Wire-level datatypes shared by all provider adapters."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ContractViolationError


@dataclass(frozen=True)
class AudioFormat:
    sample_rate: int = 16000
    bit_depth: int = 16
    channels: int = 1
    encoding: str = "linear16"


REQUIRED_AUDIO_FORMAT = AudioFormat()


def check_audio_format(fmt: AudioFormat) -> None:
    if fmt != REQUIRED_AUDIO_FORMAT:
        raise ContractViolationError(
            f"streaming STT requires 16 kHz 16-bit mono linear PCM, got {fmt}")


@dataclass(frozen=True)
class SttEvent:
    """One interim or final transcript piece from the STT stream."""

    text: str
    is_final: bool
    start_time: float
    end_time: float
    channel_speaker: str | None = None

    def __post_init__(self):
        if self.end_time < self.start_time:
            raise ValueError("end_time must be >= start_time")


@dataclass(frozen=True)
class LlmRequest:
    system_prompt: str
    user_prompt: str
    expects_json: bool = False
    max_output_tokens: int = 512


@dataclass(frozen=True)
class LlmResponse:
    text: str
    latency: float
    provider_id: str
    model_id: str


def check_request(request: LlmRequest) -> None:
    if not request.system_prompt or not request.user_prompt:
        raise ValueError("LLM prompts must be non-empty")
