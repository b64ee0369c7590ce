import base64
import copy
import json

import pytest
from fastapi.testclient import TestClient

from sales_assist.demo import TtsCache, default_script_path, load_script
from sales_assist.errors import ScriptValidationError
from sales_assist.gateway import create_app
from sales_assist.providers import SILENT_MP3


@pytest.fixture(scope="module")
def canonical_turns():
    return load_script(default_script_path())


@pytest.fixture(scope="module")
def raw_script():
    return json.loads(default_script_path().read_text("utf-8"))


class TestLoadScript:
    def test_canonical_counts(self, canonical_turns):
        assert len(canonical_turns) == 25
        assert sum(t.is_dynamic for t in canonical_turns) == 9
        assert sum(t.triggers_pipeline for t in canonical_turns) == 9

    def test_dynamic_follows_customer_question(self, canonical_turns):
        for i, turn in enumerate(canonical_turns):
            if turn.is_dynamic:
                prev = canonical_turns[i - 1]
                assert prev.speaker == "customer"
                assert "?" in prev.text
                assert prev.triggers_pipeline

    def test_wrong_turn_count_rejected(self, tmp_path, raw_script):
        short = raw_script[:24]
        path = tmp_path / "short.json"
        path.write_text(json.dumps(short))
        with pytest.raises(ScriptValidationError, match="25"):
            load_script(path)

    def test_dynamic_opener_rejected(self, tmp_path, raw_script):
        bad = copy.deepcopy(raw_script)
        bad[0]["text"] = "DYNAMIC"
        path = tmp_path / "opener.json"
        path.write_text(json.dumps(bad))
        with pytest.raises(ScriptValidationError):
            load_script(path)

    def test_dynamic_after_statement_rejected(self, tmp_path, raw_script):
        bad = copy.deepcopy(raw_script)
        bad[3]["text"] = "No question here."  # turn 4 precedes a DYNAMIC turn
        path = tmp_path / "statement.json"
        path.write_text(json.dumps(bad))
        with pytest.raises(ScriptValidationError):
            load_script(path)

    def test_nonsequential_ids_rejected(self, tmp_path, raw_script):
        bad = copy.deepcopy(raw_script)
        bad[5]["turn_id"] = 99
        path = tmp_path / "ids.json"
        path.write_text(json.dumps(bad))
        with pytest.raises(ScriptValidationError):
            load_script(path)

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(ScriptValidationError):
            load_script(tmp_path / "absent.json")


def run_demo_over_ws(app, collect_audio=False):
    """Drive a full demo as a headless client; returns the emitted frames."""
    frames = []
    emitted_turns = 0
    acked = 0
    with TestClient(app).websocket_connect("/ws") as ws:
        assert json.loads(ws.receive_text())["state"] == "connected"
        ws.send_text(json.dumps({"type": "status", "state": "demo_start"}))
        while True:
            frame = json.loads(ws.receive_text())
            frames.append(frame)
            if frame["type"] == "transcript_update" and frame["is_final"]:
                emitted_turns += 1
                assert emitted_turns - acked in (0, 1), "lock-step violated"
            if frame["type"] == "audio_play":
                if collect_audio:
                    assert base64.b64decode(frame["audio_b64"]) == SILENT_MP3
                ws.send_text(json.dumps({"type": "demo_next", "turn_id": frame["turn_id"]}))
                acked += 1
            if frame["type"] == "status" and frame["state"] == "demo_ended":
                break
    return frames


@pytest.fixture(scope="module")
def frames(tmp_path_factory):
    app = create_app(tmp_path_factory.mktemp("demo") / "kb.db")
    return run_demo_over_ws(app, collect_audio=True)


class TestDemoRun:
    def test_frame_counts(self, frames):
        kinds = {}
        for frame in frames:
            kinds[frame["type"]] = kinds.get(frame["type"], 0) + 1
        assert kinds["transcript_update"] == 25
        assert kinds["audio_play"] == 25
        assert kinds["suggestion_card"] == 9
        assert kinds["status"] == 1
        assert frames[-1] == {"type": "status", "state": "demo_ended", "detail": ""}

    def test_cards_sit_between_question_and_dynamic_turn(self, frames, canonical_turns):
        dynamic_ids = {t.turn_id for t in canonical_turns if t.is_dynamic}
        transcript_turn = 0
        for frame in frames:
            if frame["type"] == "transcript_update":
                transcript_turn += 1
            elif frame["type"] == "suggestion_card":
                # the next transcript to appear must be the DYNAMIC rep turn
                assert transcript_turn + 1 in dynamic_ids

    def test_dynamic_replies_ground_in_card_answer(self, frames):
        cards = iter(f for f in frames if f["type"] == "suggestion_card")
        for frame in frames:
            if frame["type"] == "transcript_update" and frame["speaker"] == "rep" \
                    and frame["text"].startswith("Great question."):
                card = next(cards)
                assert card["answer"] in frame["text"]

    def test_trace_deterministic_modulo_timings(self, tmp_path_factory):
        """Two runs produce identical frames once measured timings are masked
        (audio payloads excluded by contract, though the mock is stable too)."""

        def normalize(frames):
            out = []
            for frame in frames:
                frame = dict(frame)
                if frame["type"] == "suggestion_card":
                    frame["timings"] = "<measured>"
                if frame["type"] == "audio_play":
                    frame.pop("audio_b64")
                out.append(frame)
            return out

        app_a = create_app(tmp_path_factory.mktemp("demo-a") / "kb.db")
        app_b = create_app(tmp_path_factory.mktemp("demo-b") / "kb.db")
        assert normalize(run_demo_over_ws(app_a)) == normalize(run_demo_over_ws(app_b))


class TestHandshake:
    def test_wrong_turn_id_errors_without_advancing(self, tmp_path):
        app = create_app(tmp_path / "kb.db")
        with TestClient(app).websocket_connect("/ws") as ws:
            assert json.loads(ws.receive_text())["state"] == "connected"
            ws.send_text(json.dumps({"type": "status", "state": "demo_start"}))
            assert json.loads(ws.receive_text())["type"] == "transcript_update"
            assert json.loads(ws.receive_text())["type"] == "audio_play"
            ws.send_text(json.dumps({"type": "demo_next", "turn_id": 99}))
            frame = json.loads(ws.receive_text())
            assert frame["type"] == "error"
            assert frame["code"] == "wrong_turn"
            ws.send_text(json.dumps({"type": "demo_next", "turn_id": 1}))
            follow = json.loads(ws.receive_text())
            assert follow["type"] == "transcript_update"  # turn 2 only after the right ack

    def test_stalled_client_blocks_then_aborts(self, tmp_path):
        app = create_app(tmp_path / "kb.db", demo_ack_timeout_s=0.4)
        with TestClient(app).websocket_connect("/ws") as ws:
            assert json.loads(ws.receive_text())["state"] == "connected"
            ws.send_text(json.dumps({"type": "status", "state": "demo_start"}))
            first = json.loads(ws.receive_text())
            second = json.loads(ws.receive_text())
            assert first["type"] == "transcript_update"  # exactly one turn emitted
            assert second["type"] == "audio_play"
            third = json.loads(ws.receive_text())
            assert third["type"] == "error"
            assert third["code"] == "demo_timeout"


def test_tts_cache_synthesizes_once():
    calls = []

    def synth(text, voice):
        calls.append((text, voice))
        return b"audio"

    cache = TtsCache(synth)
    cache.get("hello", "v1")
    cache.get("hello", "v1")
    cache.get("hello", "v2")
    assert len(calls) == 2
