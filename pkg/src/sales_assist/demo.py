"""Scripted sales-call demo engine.

The canonical script is a 25-turn insurance call. Nine rep turns are marked
DYNAMIC: each follows a customer question, runs the real pipeline, and speaks
a reply generated from the resulting card. The engine is strictly lock-step:
it emits one turn (transcript + TTS audio, plus the suggestion card for
question turns) and waits for the client's demo_next acknowledgment before
advancing.
"""

from __future__ import annotations

import asyncio
import base64
import hashlib
import json
import logging
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Awaitable, Callable

from . import messages
from .errors import DemoAbortedError, ProviderError, ScriptValidationError, TtsNotConfiguredError
from .pipeline import SessionPipeline, TranscriptSegment
from .providers import LlmRequest

logger = logging.getLogger(__name__)

DYNAMIC_MARKER = "DYNAMIC"
EXPECTED_TURNS = 25
EXPECTED_DYNAMIC = 9
TURN_SPACING_S = 6.0
TURN_SPEECH_S = 5.0

DEMO_REPLY_SYSTEM_PROMPT = (
    "You are the sales representative on a live call. Write a short spoken reply "
    "(1-3 sentences) to the customer's last question, grounded in the answer "
    "provided. Keep it warm and conversational."
)


@dataclass(frozen=True)
class DemoTurn:
    turn_id: int
    speaker: str
    text: str  # the DYNAMIC marker for generated rep turns
    voice_id: str
    is_dynamic: bool
    triggers_pipeline: bool


def default_script_path() -> Path:
    return Path(str(resources.files("sales_assist.assets").joinpath("demo_script.json")))


def load_script(path: str | Path) -> list[DemoTurn]:
    """Load and validate a demo script file.

    The script must contain exactly 25 turns with exactly 9 DYNAMIC rep
    turns, each immediately following a customer turn that asks a question.
    """
    try:
        raw = json.loads(Path(path).read_text("utf-8"))
    except FileNotFoundError as exc:
        raise ScriptValidationError(f"script file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ScriptValidationError(f"script is not valid JSON: {exc}") from exc
    if not isinstance(raw, list):
        raise ScriptValidationError("script must be a JSON array of turns")
    if len(raw) != EXPECTED_TURNS:
        raise ScriptValidationError(
            f"script must contain exactly {EXPECTED_TURNS} turns, got {len(raw)}")

    turns: list[DemoTurn] = []
    for index, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise ScriptValidationError(f"turn {index + 1} is not an object")
        for field_name in ("turn_id", "speaker", "text", "voice_id"):
            if field_name not in entry:
                raise ScriptValidationError(f"turn {index + 1} missing field {field_name!r}")
        if entry["turn_id"] != index + 1:
            raise ScriptValidationError(
                f"turn_id must be sequential from 1; turn {index + 1} has {entry['turn_id']}")
        if entry["speaker"] not in ("rep", "customer"):
            raise ScriptValidationError(f"turn {index + 1} has unknown speaker")
        is_dynamic = entry["text"] == DYNAMIC_MARKER
        if is_dynamic:
            if entry["speaker"] != "rep":
                raise ScriptValidationError(f"DYNAMIC turn {index + 1} must be a rep turn")
            if index == 0:
                raise ScriptValidationError("DYNAMIC turn cannot open the script")
            prev = raw[index - 1]
            if prev["speaker"] != "customer" or "?" not in prev["text"]:
                raise ScriptValidationError(
                    f"DYNAMIC turn {index + 1} must follow a customer question")
        turns.append(DemoTurn(
            turn_id=index + 1,
            speaker=entry["speaker"],
            text=entry["text"],
            voice_id=entry["voice_id"],
            is_dynamic=is_dynamic,
            triggers_pipeline=False,  # fixed up below
        ))

    dynamic_count = sum(t.is_dynamic for t in turns)
    if dynamic_count != EXPECTED_DYNAMIC:
        raise ScriptValidationError(
            f"script must contain exactly {EXPECTED_DYNAMIC} DYNAMIC turns, got {dynamic_count}")

    return [
        DemoTurn(
            t.turn_id, t.speaker, t.text, t.voice_id, t.is_dynamic,
            triggers_pipeline=(index + 1 < len(turns) and turns[index + 1].is_dynamic),
        )
        for index, t in enumerate(turns)
    ]


class TtsCache:
    """Memoizes synthesized audio by (text, voice) so repeat demos are free."""

    def __init__(self, synthesize: Callable[[str, str], bytes]):
        self._synthesize = synthesize
        self._store: dict[str, bytes] = {}

    def get(self, text: str, voice_id: str) -> bytes:
        key = hashlib.sha256(f"{voice_id}\x00{text}".encode()).hexdigest()
        if key not in self._store:
            self._store[key] = self._synthesize(text, voice_id)
        return self._store[key]


class DemoEngine:
    """Runs one scripted call against emit/ack callbacks supplied by the session."""

    def __init__(
        self,
        turns: list[DemoTurn],
        pipeline: SessionPipeline,
        llm,
        tts: Callable[[str, str], bytes],
        ack_timeout_s: float = 120.0,
    ):
        self.turns = turns
        self.pipeline = pipeline
        self.llm = llm
        self.tts_cache = TtsCache(tts)
        self.ack_timeout_s = ack_timeout_s
        self.last_card = None

    async def run(
        self,
        emit: Callable[[messages.WsMessage], Awaitable[None]],
        next_ack: Callable[[], Awaitable[int]],
    ) -> None:
        for index, turn in enumerate(self.turns):
            start = index * TURN_SPACING_S
            end = start + TURN_SPEECH_S
            text = turn.text
            if turn.is_dynamic:
                text = await asyncio.to_thread(self._spoken_reply)
            await emit(messages.TranscriptUpdate(turn.speaker, text, True, start, end))
            await emit(messages.AudioPlay(turn.turn_id, self._audio_b64(text, turn.voice_id),
                                          turn.speaker))

            segment = TranscriptSegment(turn.speaker, text, True, start, end)
            if turn.triggers_pipeline:
                card = await asyncio.to_thread(
                    self.pipeline.process_final_segment, segment, end)
                if card is not None:
                    self.last_card = card
                    from .gateway import card_to_message  # local import avoids a cycle

                    await emit(card_to_message(card))
                else:
                    logger.warning("demo turn %d produced no card", turn.turn_id)
            else:
                self.pipeline.buffer.append(segment, now=end)

            await self._await_ack(emit, next_ack, turn.turn_id)
        await emit(messages.Status("demo_ended"))

    async def _await_ack(self, emit, next_ack, turn_id: int) -> None:
        while True:
            try:
                ack = await asyncio.wait_for(next_ack(), timeout=self.ack_timeout_s)
            except asyncio.TimeoutError:
                await emit(messages.ErrorMessage(
                    "demo_timeout", f"no demo_next within {self.ack_timeout_s:.0f}s"))
                raise DemoAbortedError(f"stalled waiting for ack of turn {turn_id}")
            if ack == turn_id:
                return
            await emit(messages.ErrorMessage(
                "wrong_turn", f"expected demo_next for turn {turn_id}, got {ack}"))

    def _audio_b64(self, text: str, voice_id: str) -> str:
        try:
            audio = self.tts_cache.get(text, voice_id)
        except TtsNotConfiguredError:
            return ""
        except ProviderError as exc:
            logger.warning("TTS failed for demo turn: %s", exc)
            return ""
        return base64.b64encode(audio).decode("ascii")

    def _spoken_reply(self) -> str:
        answer = self.last_card.answer if self.last_card is not None else ""
        request = LlmRequest(
            system_prompt=DEMO_REPLY_SYSTEM_PROMPT,
            user_prompt=f"Card answer: {answer}" if answer else "Card answer: (none)",
            max_output_tokens=128,
        )
        return self.llm.complete(request).text.strip() or "Let me walk you through that."
