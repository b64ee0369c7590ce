import json
import random
import string

import pytest

from sales_assist.messages import (
    AudioPlay,
    DemoNext,
    ErrorMessage,
    ProtocolError,
    Status,
    SuggestionCardMessage,
    TextInput,
    TranscriptUpdate,
    message_type,
    parse,
    serialize,
)

_ALPHABET = string.ascii_letters + string.digits + " .,?!'\"\\/:;{}[]-_\n\t" + "é漢字€"


def _text(rng, max_len=60):
    return "".join(rng.choice(_ALPHABET) for _ in range(rng.randrange(0, max_len)))


def _timings(rng):
    return {k: round(rng.uniform(0, 5), 6)
            for k in ("detection", "retrieval", "generation", "total")}


BUILDERS = {
    "transcript_update": lambda rng: TranscriptUpdate(
        rng.choice(["rep", "customer"]), _text(rng), rng.random() < 0.5,
        round(rng.uniform(0, 500), 3), round(rng.uniform(500, 1000), 3)),
    "suggestion_card": lambda rng: SuggestionCardMessage(
        f"card-{rng.randrange(999)}", _text(rng), _text(rng),
        rng.choice(["coverage", "pricing", "policy_terms", "claims", "general"]),
        round(rng.uniform(0, 1), 4), _text(rng, 30), _timings(rng)),
    "audio_play": lambda rng: AudioPlay(
        rng.randrange(1, 26), _text(rng, 200), rng.choice(["rep", "customer"])),
    "status": lambda rng: Status(
        rng.choice(["connected", "demo_start", "demo_ended"]), _text(rng, 20)),
    "error": lambda rng: ErrorMessage(
        rng.choice(["protocol_error", "empty_text", "wrong_mode"]), _text(rng)),
    "text_input": lambda rng: TextInput(_text(rng), rng.choice(["rep", "customer"])),
    "demo_next": lambda rng: DemoNext(rng.randrange(1, 26)),
}


def random_message(rng):
    return BUILDERS[rng.choice(sorted(BUILDERS))](rng)


class TestSerialize:
    def test_status_example(self):
        assert serialize(Status("connected")) == (
            '{"type":"status","state":"connected","detail":""}')

    def test_demo_next_example(self):
        assert serialize(DemoNext(3)) == '{"type":"demo_next","turn_id":3}'

    def test_suggestion_card_roundtrips_all_payload_fields(self):
        card = SuggestionCardMessage(
            "card-1", "q?", "a", "coverage", 0.9, "faqs",
            {"detection": 0.7, "retrieval": 0.8, "generation": 1.3, "total": 2.8})
        frame = json.loads(serialize(card))
        assert set(frame) == {"type", "card_id", "question", "answer", "category",
                              "confidence", "source", "timings"}
        assert parse(serialize(card)) == card

    def test_type_field_first(self):
        frame = serialize(TextInput("hello"))
        assert frame.startswith('{"type":"text_input"')

    def test_non_message_rejected(self):
        with pytest.raises(TypeError):
            serialize({"type": "status"})


class TestParse:
    def test_text_input(self):
        message = parse('{"type":"text_input","speaker":"customer","text":"hi"}')
        assert message == TextInput("hi", "customer")

    def test_text_input_speaker_default(self):
        assert parse('{"type":"text_input","text":"hi"}') == TextInput("hi", "customer")

    def test_unknown_type(self):
        err = parse('{"type":"bogus"}')
        assert isinstance(err, ProtocolError)
        assert "bogus" in err.reason

    def test_invalid_json(self):
        err = parse("{not json")
        assert isinstance(err, ProtocolError)
        assert err.reason == "invalid JSON"

    def test_missing_field_named(self):
        err = parse('{"type":"demo_next"}')
        assert isinstance(err, ProtocolError)
        assert err.field_name == "turn_id"

    def test_wrong_field_type(self):
        err = parse('{"type":"demo_next","turn_id":"three"}')
        assert isinstance(err, ProtocolError)
        assert err.field_name == "turn_id"

    def test_bool_not_accepted_as_int(self):
        err = parse('{"type":"demo_next","turn_id":true}')
        assert isinstance(err, ProtocolError)

    def test_invalid_speaker(self):
        err = parse('{"type":"text_input","text":"hi","speaker":"narrator"}')
        assert isinstance(err, ProtocolError)
        assert err.field_name == "speaker"

    def test_extra_fields_ignored(self):
        message = parse('{"type":"demo_next","turn_id":2,"debug":"yes"}')
        assert message == DemoNext(2)

    def test_non_object_frame(self):
        assert isinstance(parse("[1,2]"), ProtocolError)


def test_roundtrip_property():
    """parse(serialize(m)) == m over randomized instances of all 7 types."""
    rng = random.Random(2024)
    seen_types = set()
    for _ in range(2000):
        message = random_message(rng)
        seen_types.add(message_type(message))
        decoded = parse(serialize(message))
        assert decoded == message, f"round-trip mismatch for {message!r}"
    assert len(seen_types) == 7
