"""Deterministic offline stand-ins for the three external services.

The mock LLM is a pure function of its prompts plus the rule table below, so
end-to-end tests and benchmarks run without credentials and always produce
the same output for the same input.

Dispatch: the mock recognizes which pipeline stage is calling by a marker
substring in the system prompt ("question spotter", "SQLite SELECT query",
"sales answer writer", "spoken reply").

Detection rules:
  * the examined text is the last "Customer:" line of the conversation block;
  * detected is true iff that text contains "?" or its first word is one of
    what/how/is/does/can/when/who/which/why;
  * the extracted question is the first sentence containing "?", else the
    first sentence starting with an interrogative word;
  * category comes from the first matching keyword group, in order:
      coverage      deductible, coverage, covered, out-of-pocket, limit
      pricing       premium*, pric*, cost*, tier*
      policy_terms  renew*, cancel*, term*
      claims        claim*
    (* marks prefix match) and otherwise general;
  * confidence is fixed at 0.90.

SQL rules: the question's longest run of capitalized words (ignoring the
sentence-initial word) is treated as a product name and filters an FAQ/products
join; with no product phrase the category keyword picks the table to query,
and general questions filter FAQs by the question's longest word.

Answer rules: "Based on <table>: <first row summary>." when rows exist,
otherwise a fixed sentence containing "not found in the product database".
"""

from __future__ import annotations

import json
import re
import time
from typing import Iterator

from ..errors import SessionClosedError
from .base import LlmRequest, LlmResponse, SttEvent, check_request
from .config import MockDelays

DETECTION_MARKER = "question spotter"
SQL_MARKER = "SQLite SELECT query"
ANSWER_MARKER = "sales answer writer"
DEMO_REPLY_MARKER = "spoken reply"

INTERROGATIVES = ("what", "how", "is", "does", "can", "when", "who", "which", "why")

CATEGORY_RULES = [
    ("coverage", re.compile(r"\b(deductible|coverage|covered|out[- ]of[- ]pocket|limit)\b", re.I)),
    ("pricing", re.compile(r"\b(premium|pric|cost|tier)\w*", re.I)),
    ("policy_terms", re.compile(r"\b(renew|cancel|term)\w*", re.I)),
    ("claims", re.compile(r"\bclaim\w*", re.I)),
]

NOT_FOUND_ANSWER = (
    "I could not confirm that detail; it was not found in the product database. "
    "Offer to follow up with specifics right after the call."
)

_SENTENCE_SPLIT = re.compile(r"(?<=[.?!])\s+")
_CAP_TOKEN = re.compile(r"^[A-Z][A-Za-z0-9'&-]*$")
_NUM_TOKEN = re.compile(r"^\d+$")

# 1 second of silent 32 kbps 48 kHz mono MPEG-1 Layer III: 42 frames of
# 96 bytes (header 0xFF 0xFB 0x14 0xC0, zeroed payload = digital silence).
SILENT_MP3 = (b"\xff\xfb\x14\xc0" + b"\x00" * 92) * 42


class MockLlmClient:
    """Rule-based LLM double; see the module docstring for the rule table."""

    provider_id = "mock"

    def __init__(self, delays: MockDelays | None = None, model_id: str = "mock-1"):
        self.delays = delays or MockDelays()
        self.model_id = model_id

    def complete(self, request: LlmRequest) -> LlmResponse:
        check_request(request)
        started = time.perf_counter()
        system = request.system_prompt
        if DETECTION_MARKER in system:
            delay, text = self.delays.detection, _detect(request.user_prompt)
        elif SQL_MARKER in system:
            delay, text = self.delays.retrieval, _generate_sql(request.user_prompt)
        elif ANSWER_MARKER in system:
            delay, text = self.delays.generation, _generate_answer(request.user_prompt)
        elif DEMO_REPLY_MARKER in system:
            delay, text = self.delays.generation, _demo_reply(request.user_prompt)
        else:
            delay, text = 0.0, f"echo: {request.user_prompt}"
        if delay > 0:
            time.sleep(delay)
        return LlmResponse(
            text=text,
            latency=time.perf_counter() - started,
            provider_id=self.provider_id,
            model_id=self.model_id,
        )


def _last_customer_line(context: str) -> str | None:
    line = None
    for raw in context.splitlines():
        stripped = raw.strip()
        if stripped.lower().startswith("customer:"):
            line = stripped.split(":", 1)[1].strip()
    return line


def classify_category(question: str) -> str:
    for category, pattern in CATEGORY_RULES:
        if pattern.search(question):
            return category
    return "general"


def _extract_question_sentence(text: str) -> str:
    sentences = [s.strip() for s in _SENTENCE_SPLIT.split(text) if s.strip()]
    for sentence in sentences:
        if "?" in sentence:
            return sentence
    for sentence in sentences:
        first = re.split(r"\W+", sentence.lower(), maxsplit=1)[0]
        if first in INTERROGATIVES:
            return sentence
    return text.strip()


def _detect(user_prompt: str) -> str:
    text = _last_customer_line(user_prompt)
    detected = False
    question = ""
    if text:
        first = re.split(r"\W+", text.lower().strip(), maxsplit=1)[0] if text.strip() else ""
        detected = "?" in text or first in INTERROGATIVES
        if detected:
            question = _extract_question_sentence(text)
    payload = {
        "detected": detected,
        "question": question,
        "category": classify_category(question) if detected else "general",
        "confidence": 0.9 if detected else 0.0,
    }
    return json.dumps(payload)


def extract_product_phrase(question: str) -> str | None:
    """Longest run of capitalized tokens, skipping the sentence-initial word."""
    tokens = question.split()
    runs: list[list[str]] = []
    current: list[str] = []
    for index, raw in enumerate(tokens):
        token = raw.strip(".,!?;:()\"'")
        capitalized = bool(_CAP_TOKEN.match(token)) and index > 0
        numeric = bool(_NUM_TOKEN.match(token))
        if capitalized or (numeric and current):
            current.append(token)
        else:
            if current:
                runs.append(current)
            current = []
    if current:
        runs.append(current)
    runs = [r for r in runs if len(r) >= 2 and any(_CAP_TOKEN.match(t) for t in r)]
    if not runs:
        return None
    return " ".join(max(runs, key=len))


def _question_from_prompt(user_prompt: str) -> str:
    for line in user_prompt.splitlines():
        if line.strip().lower().startswith("question:"):
            return line.split(":", 1)[1].strip()
    return user_prompt.strip()


def _generate_sql(user_prompt: str) -> str:
    question = _question_from_prompt(user_prompt)
    phrase = extract_product_phrase(question)
    if phrase:
        safe = phrase.replace("'", "''")
        return (
            "SELECT f.id AS id, p.name AS product_name, f.question, f.answer "
            "FROM faqs f JOIN products p ON f.product_id = p.id "
            f"WHERE p.name LIKE '%{safe}%' ORDER BY f.id LIMIT 5"
        )
    category = classify_category(question)
    if category == "pricing":
        return (
            "SELECT t.id AS id, p.name AS product_name, t.tier_name, t.monthly_premium, "
            "t.annual_premium, t.age_min, t.age_max "
            "FROM pricing_tiers t JOIN products p ON t.product_id = p.id "
            "ORDER BY t.id LIMIT 5"
        )
    if category == "coverage":
        return (
            "SELECT c.id AS id, p.name AS product_name, c.coverage_type, c.amount, c.deductible "
            "FROM coverage_details c JOIN products p ON c.product_id = p.id "
            "ORDER BY c.id LIMIT 5"
        )
    if category == "policy_terms":
        return (
            "SELECT pt.id AS id, p.name AS product_name, pt.term_length, pt.renewal_policy, "
            "pt.cancellation_policy "
            "FROM policy_terms pt JOIN products p ON pt.product_id = p.id "
            "ORDER BY pt.id LIMIT 5"
        )
    keyword = _longest_word(question)
    return (
        "SELECT f.id AS id, p.name AS product_name, f.question, f.answer "
        "FROM faqs f JOIN products p ON f.product_id = p.id "
        f"WHERE f.question LIKE '%{keyword}%' OR f.answer LIKE '%{keyword}%' "
        "ORDER BY f.id LIMIT 5"
    )


def _longest_word(question: str) -> str:
    words = re.findall(r"[a-z]+", question.lower())
    if not words:
        return ""
    return max(words, key=len).replace("'", "''")


def _generate_answer(user_prompt: str) -> str:
    first_row = None
    for line in user_prompt.splitlines():
        stripped = line.strip()
        if stripped.startswith("- [") and "]" in stripped:
            first_row = stripped
            break
    if first_row is None:
        return NOT_FOUND_ANSWER
    table = first_row[3:first_row.index("]")]
    summary = first_row[first_row.index("]") + 1:].strip()
    return f"Based on {table}: {summary}."


def _demo_reply(user_prompt: str) -> str:
    answer = ""
    for line in user_prompt.splitlines():
        if line.strip().lower().startswith("card answer:"):
            answer = line.split(":", 1)[1].strip()
    if not answer:
        return "Good question. Let me check that and get right back to you."
    return f"Great question. {answer}"


class MockSttSession:
    """Scripted STT session: ignores audio bytes, replays a fixed transcript.

    Script entries are dicts with speaker, text, start_time, end_time, and an
    optional interim_prefixes list; each prefix becomes an interim event that
    the final event supersedes.
    """

    def __init__(self, script: list[dict]):
        self.script = script
        self._closed = False

    def push_audio(self, chunk: bytes) -> None:
        if self._closed:
            raise SessionClosedError("push_audio on a closed session", provider="mock")

    def iter_events(self) -> Iterator[SttEvent]:
        for entry in self.script:
            if self._closed:
                return
            start = float(entry["start_time"])
            end = float(entry["end_time"])
            speaker = entry.get("speaker")
            prefixes = entry.get("interim_prefixes") or []
            span = max(end - start, 0.0)
            for i, prefix in enumerate(prefixes):
                tick = start + span * (i + 1) / (len(prefixes) + 1)
                yield SttEvent(prefix, False, start, tick, speaker)
            yield SttEvent(entry["text"], True, start, end, speaker)

    def close(self) -> None:
        self._closed = True


def mock_tts(text: str, voice_id: str) -> bytes:
    """Fixed one-second silent MP3, byte-identical for every input."""
    return SILENT_MP3
