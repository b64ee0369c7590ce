"""WebSocket session server bridging clients to the pipeline.

One WebSocket connection maps to one session. Inbound frames are handled in
arrival order; outbound frames of a session are serialized through a send
lock, so emission order is preserved per session. Pipeline stages run in a
worker thread to keep the event loop responsive while mock delays or live
HTTP calls are in flight.
"""

from __future__ import annotations

import asyncio
import logging
import threading
import time
import uuid
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from . import demo as demo_mod
from . import kb as kb_mod
from . import messages, providers
from .errors import ProviderError, SalesAssistError, StorageError
from .pipeline import SessionPipeline, SuggestionCard, TranscriptSegment
from .synth import generate_synthetic_dataset

logger = logging.getLogger(__name__)


def card_to_message(card: SuggestionCard) -> messages.SuggestionCardMessage:
    return messages.SuggestionCardMessage(
        card_id=card.card_id,
        question=card.question,
        answer=card.answer,
        category=card.category,
        confidence=card.confidence,
        source=card.source,
        timings=card.timings.as_dict(),
    )


class GatewaySession:
    """Server-side state for one connected client."""

    def __init__(self, websocket: WebSocket, app_state):
        self.websocket = websocket
        self.state = app_state
        self.session_id = uuid.uuid4().hex[:12]
        self.mode = "live"
        self.started_at = time.monotonic()
        self.pipeline = SessionPipeline(app_state.kb, app_state.llm)
        self.stt_session = None
        self._last_final_end = 0.0
        self._send_lock = asyncio.Lock()
        self._demo_task: asyncio.Task | None = None
        self._demo_acks: asyncio.Queue[int] = asyncio.Queue()
        self._stt_pump: asyncio.Task | None = None

    def clock(self) -> float:
        return time.monotonic() - self.started_at

    async def emit(self, message: messages.WsMessage) -> None:
        async with self._send_lock:
            await self.websocket.send_text(messages.serialize(message))

    async def on_text(self, raw: str) -> None:
        parsed = messages.parse(raw)
        if isinstance(parsed, messages.ProtocolError):
            await self.emit(messages.ErrorMessage("protocol_error", parsed.reason))
            return
        if isinstance(parsed, messages.TextInput):
            await self.handle_text_input(parsed)
        elif isinstance(parsed, messages.DemoNext):
            if self._demo_task is None or self._demo_task.done():
                await self.emit(messages.ErrorMessage("no_demo", "no demo in progress"))
            else:
                self._demo_acks.put_nowait(parsed.turn_id)
        elif isinstance(parsed, messages.Status) and parsed.state == "demo_start":
            await self.start_demo()
        else:
            await self.emit(messages.ErrorMessage(
                "unsupported_type",
                f"clients may not send {messages.message_type(parsed)!r} frames"))

    async def handle_text_input(self, message: messages.TextInput) -> None:
        text = message.text.strip()
        if not text:
            await self.emit(messages.ErrorMessage("empty_text", "text_input.text is empty"))
            return
        # never timestamp behind a final we already processed (the scripted
        # mock STT replays faster than wall clock)
        now = max(self.clock(), self._last_final_end)
        segment = TranscriptSegment(message.speaker, text, True, now, now)
        await self.emit(messages.TranscriptUpdate(
            segment.speaker, segment.text, True, segment.start_time, segment.end_time))
        await self._process_segment(segment, now)

    async def _process_segment(self, segment: TranscriptSegment, now: float) -> None:
        self._last_final_end = max(self._last_final_end, segment.end_time)
        try:
            card = await asyncio.to_thread(
                self.pipeline.process_final_segment, segment, now)
        except (ProviderError, SalesAssistError) as exc:
            logger.warning("session %s pipeline error: %s", self.session_id, exc)
            await self.emit(messages.ErrorMessage("pipeline_error", str(exc)))
            return
        if card is not None:
            await self.emit(card_to_message(card))

    async def on_binary(self, chunk: bytes) -> None:
        if self.mode != "live":
            await self.emit(messages.ErrorMessage(
                "wrong_mode", "binary audio is only accepted in live mode"))
            return
        if self.stt_session is None:
            try:
                self.stt_session = providers.stt_open_stream(
                    self.state.config, script=self.state.stt_script)
            except ProviderError as exc:
                await self.emit(messages.ErrorMessage("stt_error", str(exc)))
                return
            self._stt_pump = asyncio.create_task(self._pump_stt_events())
        try:
            self.stt_session.push_audio(chunk)
        except ProviderError as exc:
            await self.emit(messages.ErrorMessage("stt_error", str(exc)))

    async def _pump_stt_events(self) -> None:
        """Bridge the (possibly blocking) STT event stream onto the loop.

        Event timestamps are stream-relative; they are rebased onto the
        session clock so audio and text_input segments share one time base
        in the conversation buffer.
        """
        loop = asyncio.get_running_loop()
        queue: asyncio.Queue = asyncio.Queue()
        stt = self.stt_session
        stream_t0 = self.clock()

        def reader() -> None:
            try:
                for event in stt.iter_events():
                    loop.call_soon_threadsafe(queue.put_nowait, event)
            finally:
                loop.call_soon_threadsafe(queue.put_nowait, None)

        threading.Thread(target=reader, daemon=True).start()
        while True:
            event = await queue.get()
            if event is None:
                return
            speaker = event.channel_speaker or self.state.live_speaker
            start = stream_t0 + event.start_time
            end = stream_t0 + event.end_time
            await self.emit(messages.TranscriptUpdate(
                speaker, event.text, event.is_final, start, end))
            if event.is_final:
                segment = TranscriptSegment(speaker, event.text, True, start, end)
                await self._process_segment(segment, end)

    async def start_demo(self) -> None:
        if self._demo_task is not None and not self._demo_task.done():
            await self.emit(messages.ErrorMessage("demo_running", "a demo is already running"))
            return
        if self.state.demo_turns is None:
            await self.emit(messages.ErrorMessage("demo_unavailable", "no demo script loaded"))
            return
        self.mode = "demo"
        while not self._demo_acks.empty():
            self._demo_acks.get_nowait()
        self._demo_task = asyncio.create_task(self._run_demo())

    async def _run_demo(self) -> None:
        engine = demo_mod.DemoEngine(
            self.state.demo_turns,
            pipeline=self.pipeline,
            llm=self.state.llm,
            tts=self.state.tts,
            ack_timeout_s=self.state.demo_ack_timeout_s,
        )
        try:
            await engine.run(self.emit, self._demo_acks.get)
        except demo_mod.DemoAbortedError as exc:
            logger.warning("session %s demo aborted: %s", self.session_id, exc)
        finally:
            self.mode = "live"

    async def shutdown(self) -> None:
        for task in (self._demo_task, self._stt_pump):
            if task is not None and not task.done():
                task.cancel()
        if self.stt_session is not None:
            self.stt_session.close()


def create_app(
    db_path: str | Path,
    config: providers.ProviderConfig | None = None,
    *,
    auto_seed: bool = True,
    demo_script_path: str | Path | None = None,
    stt_script: list[dict] | None = None,
    live_speaker: str = "customer",
    demo_ack_timeout_s: float = 120.0,
) -> FastAPI:
    """Build the FastAPI app serving /ws, /health, and /config.

    With ``auto_seed`` the store is initialized and seeded with the canonical
    dataset (seed 0) on first startup when empty.
    """
    config = config or providers.ProviderConfig()
    config.validate()
    app = FastAPI(title="sales-assist gateway")

    kb = None
    try:
        kb = kb_mod.init_schema(db_path)
        if auto_seed and kb.stats().products == 0:
            kb.seed(generate_synthetic_dataset(0))
    except StorageError as exc:
        logger.error("knowledge base unavailable at %s: %s", db_path, exc)
        kb = None

    demo_turns = None
    try:
        demo_turns = demo_mod.load_script(demo_script_path or demo_mod.default_script_path())
    except SalesAssistError as exc:
        logger.error("demo script unavailable: %s", exc)

    app.state.kb = kb
    app.state.config = config
    app.state.llm = providers.make_llm_client(config)
    app.state.tts = lambda text, voice_id: providers.tts_synthesize(config, text, voice_id)
    app.state.demo_turns = demo_turns
    app.state.stt_script = stt_script
    app.state.live_speaker = live_speaker
    app.state.demo_ack_timeout_s = demo_ack_timeout_s

    @app.get("/health")
    def health():
        if app.state.kb is None:
            return {"status": "degraded", "kb": None}
        return {"status": "ok", "kb": app.state.kb.stats().as_dict()}

    @app.get("/config")
    def config_echo():
        return app.state.config.non_secret_dict()

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        await websocket.accept()
        if app.state.kb is None:
            await websocket.send_text(messages.serialize(
                messages.ErrorMessage("kb_unavailable", "knowledge base is not available")))
            await websocket.close()
            return
        session = GatewaySession(websocket, app.state)
        await session.emit(messages.Status("connected"))
        try:
            while True:
                frame = await websocket.receive()
                if frame["type"] == "websocket.disconnect":
                    break
                if frame.get("bytes") is not None:
                    await session.on_binary(frame["bytes"])
                elif frame.get("text") is not None:
                    await session.on_text(frame["text"])
        except WebSocketDisconnect:
            pass
        finally:
            await session.shutdown()

    return app
