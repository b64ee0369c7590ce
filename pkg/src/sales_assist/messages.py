"""WebSocket message catalog and JSON codec.

Seven message types flow between dashboard and server. Frames are single
JSON objects with a ``type`` discriminator; parsing returns either a typed
message or a ``ProtocolError`` value (the server answers those with an
``error`` frame instead of disconnecting). Unknown extra fields on inbound
frames are ignored for forward compatibility.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Union

SPEAKERS = ("rep", "customer")


@dataclass(frozen=True)
class TranscriptUpdate:
    speaker: str
    text: str
    is_final: bool
    start_time: float
    end_time: float


@dataclass(frozen=True)
class SuggestionCardMessage:
    card_id: str
    question: str
    answer: str
    category: str
    confidence: float
    source: str
    timings: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class AudioPlay:
    turn_id: int
    audio_b64: str
    speaker: str


@dataclass(frozen=True)
class Status:
    state: str
    detail: str = ""


@dataclass(frozen=True)
class ErrorMessage:
    code: str
    message: str


@dataclass(frozen=True)
class TextInput:
    text: str
    speaker: str = "customer"


@dataclass(frozen=True)
class DemoNext:
    turn_id: int


WsMessage = Union[
    TranscriptUpdate, SuggestionCardMessage, AudioPlay, Status,
    ErrorMessage, TextInput, DemoNext,
]


@dataclass(frozen=True)
class ProtocolError:
    reason: str
    field_name: str = ""


_TIMING_KEYS = ("detection", "retrieval", "generation", "total")

# type tag -> (class, [(field, kinds, required, default)])
_CATALOG: dict[str, tuple[type, list[tuple[str, tuple[type, ...], bool, Any]]]] = {
    "transcript_update": (TranscriptUpdate, [
        ("speaker", (str,), True, None),
        ("text", (str,), True, None),
        ("is_final", (bool,), True, None),
        ("start_time", (int, float), True, None),
        ("end_time", (int, float), True, None),
    ]),
    "suggestion_card": (SuggestionCardMessage, [
        ("card_id", (str,), True, None),
        ("question", (str,), True, None),
        ("answer", (str,), True, None),
        ("category", (str,), True, None),
        ("confidence", (int, float), True, None),
        ("source", (str,), True, None),
        ("timings", (dict,), True, None),
    ]),
    "audio_play": (AudioPlay, [
        ("turn_id", (int,), True, None),
        ("audio_b64", (str,), True, None),
        ("speaker", (str,), True, None),
    ]),
    "status": (Status, [
        ("state", (str,), True, None),
        ("detail", (str,), False, ""),
    ]),
    "error": (ErrorMessage, [
        ("code", (str,), True, None),
        ("message", (str,), True, None),
    ]),
    "text_input": (TextInput, [
        ("text", (str,), True, None),
        ("speaker", (str,), False, "customer"),
    ]),
    "demo_next": (DemoNext, [
        ("turn_id", (int,), True, None),
    ]),
}

_TYPE_BY_CLASS = {cls: tag for tag, (cls, _) in _CATALOG.items()}


def message_type(message: WsMessage) -> str:
    return _TYPE_BY_CLASS[type(message)]


def serialize(message: WsMessage) -> str:
    """Canonical JSON frame: ``type`` first, declared field order, compact."""
    tag = _TYPE_BY_CLASS.get(type(message))
    if tag is None:
        raise TypeError(f"not a protocol message: {type(message)!r}")
    payload: dict[str, Any] = {"type": tag}
    for name, _kinds, _required, _default in _CATALOG[tag][1]:
        value = getattr(message, name)
        if name == "timings":
            value = {k: float(value.get(k, 0.0)) for k in _TIMING_KEYS}
        payload[name] = value
    return json.dumps(payload, separators=(",", ":"), ensure_ascii=False)


def parse(frame: str) -> WsMessage | ProtocolError:
    """Decode one text frame into a typed message.

    Malformed JSON, unknown types, missing fields, and wrong field types all
    come back as ProtocolError values naming the offender.
    """
    try:
        data = json.loads(frame)
    except (json.JSONDecodeError, TypeError):
        return ProtocolError("invalid JSON")
    if not isinstance(data, dict):
        return ProtocolError("frame must be a JSON object")
    tag = data.get("type")
    if not isinstance(tag, str) or tag not in _CATALOG:
        return ProtocolError(f"unknown type {tag!r}", field_name="type")
    cls, spec = _CATALOG[tag]
    kwargs: dict[str, Any] = {}
    for name, kinds, required, default in spec:
        if name not in data:
            if required:
                return ProtocolError(f"missing field {name!r}", field_name=name)
            kwargs[name] = default
            continue
        value = data[name]
        if bool in kinds:
            if not isinstance(value, bool):
                return ProtocolError(f"field {name!r} must be a boolean", field_name=name)
        elif kinds == (int,):
            if isinstance(value, bool) or not isinstance(value, int):
                return ProtocolError(f"field {name!r} must be an integer", field_name=name)
        elif not isinstance(value, kinds) or isinstance(value, bool):
            kind_names = " or ".join(k.__name__ for k in kinds)
            return ProtocolError(f"field {name!r} must be {kind_names}", field_name=name)
        if kinds == (int, float):
            value = float(value)
        if name == "timings":
            try:
                value = {k: float(value.get(k, 0.0)) for k in _TIMING_KEYS}
            except (TypeError, ValueError):
                return ProtocolError("field 'timings' must map stages to seconds",
                                     field_name="timings")
        if name == "speaker" and tag == "text_input" and value not in SPEAKERS:
            return ProtocolError(f"speaker must be one of {SPEAKERS}", field_name="speaker")
        kwargs[name] = value
    return cls(**kwargs)
