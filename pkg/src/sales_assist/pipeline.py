"""Core conversation-to-suggestion dataflow.

Final transcript segments enter a rolling 60-second buffer; customer turns
trigger question detection; detected, non-duplicate questions fan out to
hybrid retrieval (FAQ keyword match plus validated text-to-SQL) and answer
generation. Every stage is timed, and the result is a SuggestionCard ready
for the dashboard.
"""

from __future__ import annotations

import json
import logging
import re
import time
from dataclasses import dataclass, field
from typing import Any, Optional

from . import sqlguard
from .errors import ContractViolationError, ProviderError, RetrievalError, SalesAssistError
from .kb import KnowledgeBase
from .providers import LlmRequest

logger = logging.getLogger(__name__)

WINDOW_SECONDS = 60.0
DEDUP_WINDOW_SECONDS = 120.0
FAQ_TOP_K = 5
MERGED_ROW_CAP = 10

CATEGORIES = ("coverage", "pricing", "policy_terms", "claims", "general")
SPEAKERS = ("rep", "customer")
_SPEAKER_LABELS = {"rep": "Rep", "customer": "Customer"}

# marker phrases in the system prompts double as dispatch keys for the mock
DETECTION_SYSTEM_PROMPT = (
    "You are a question spotter for live insurance sales calls. Read the recent "
    "conversation and decide whether the customer just asked a product question. "
    "Respond with JSON only: {\"detected\": true|false, \"question\": \"...\", "
    "\"category\": \"coverage|pricing|policy_terms|claims|general\", "
    "\"confidence\": 0.0-1.0}."
)

SCHEMA_DESCRIPTION = """Tables:
  products(id, name, category, description)
  coverage_details(id, product_id, coverage_type, amount, deductible, conditions)
  policy_terms(id, product_id, term_length, renewal_policy, cancellation_policy)
  faqs(id, product_id, question, answer)
  pricing_tiers(id, product_id, tier_name, monthly_premium, annual_premium, age_min, age_max)"""

SQL_SYSTEM_PROMPT = (
    "You translate an insurance product question into one SQLite SELECT query. "
    "Reply with the bare SQL statement, nothing else. Read-only: never write, "
    "alter, or drop anything. Limit results to 5 rows.\n" + SCHEMA_DESCRIPTION
)

ANSWER_SYSTEM_PROMPT = (
    "You are a sales answer writer. Turn the retrieved rows into a concise, "
    "salesperson-friendly answer of 2-4 sentences. Quote the exact figures from "
    "the rows, keep the wording natural, and say plainly when the rows do not "
    "contain the requested detail instead of guessing."
)

_NORMALIZE_STRIP = re.compile(r"[^a-z0-9\s]+")
_WS = re.compile(r"\s+")


def normalize_question(text: str) -> str:
    """Lowercase, strip punctuation, collapse whitespace."""
    return _WS.sub(" ", _NORMALIZE_STRIP.sub(" ", text.lower())).strip()


@dataclass(frozen=True)
class TranscriptSegment:
    speaker: str
    text: str
    is_final: bool
    start_time: float
    end_time: float

    def __post_init__(self):
        if self.speaker not in SPEAKERS:
            raise ValueError(f"speaker must be one of {SPEAKERS}")
        if self.end_time < self.start_time:
            raise ValueError("end_time must be >= start_time")


@dataclass(frozen=True)
class DetectedQuestion:
    detected: bool
    question: str = ""
    category: str = "general"
    confidence: float = 0.0


@dataclass(frozen=True)
class RetrievedRow:
    source: str  # faq_match | generated_sql
    table: str
    payload: dict[str, Any]


@dataclass
class RetrievalResult:
    rows: list[RetrievedRow] = field(default_factory=list)
    generated_sql: Optional[str] = None
    sql_failure: Optional[str] = None  # rejection reason or execution error
    strategy_timings: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class StageTimings:
    detection: float
    retrieval: float
    generation: float
    total: float

    def as_dict(self) -> dict[str, float]:
        return {
            "detection": self.detection,
            "retrieval": self.retrieval,
            "generation": self.generation,
            "total": self.total,
        }


@dataclass(frozen=True)
class SuggestionCard:
    card_id: str
    question: str
    answer: str
    category: str
    confidence: float
    source: str
    timings: StageTimings


class ConversationBuffer:
    """Rolling window of final transcript segments, ordered by end time."""

    def __init__(self, window_s: float = WINDOW_SECONDS):
        self.window_s = window_s
        self._segments: list[TranscriptSegment] = []

    @property
    def segments(self) -> list[TranscriptSegment]:
        return list(self._segments)

    def append(self, segment: TranscriptSegment, now: float | None = None) -> None:
        """Add a final segment and evict everything older than the window.

        ``now`` defaults to the segment's own end time; interim segments are
        a contract violation.
        """
        if not segment.is_final:
            raise ContractViolationError("only final segments enter the buffer")
        self._segments.append(segment)
        self._segments.sort(key=lambda s: s.end_time)
        self.evict(segment.end_time if now is None else now)

    def evict(self, now: float) -> None:
        cutoff = now - self.window_s
        self._segments = [s for s in self._segments if s.end_time >= cutoff]

    def context(self) -> str:
        """Chronological "Speaker: text" lines for the detection prompt."""
        return "\n".join(
            f"{_SPEAKER_LABELS[s.speaker]}: {s.text}" for s in self._segments
        )


class QuestionDeduper:
    """Remembers normalized question texts for a sliding time window."""

    def __init__(self, window_s: float = DEDUP_WINDOW_SECONDS):
        self.window_s = window_s
        self._seen: dict[str, float] = {}

    def is_duplicate(self, question: str, now: float) -> bool:
        """True when the question was recorded within the window.

        A miss records the question (or refreshes a stale record), so the
        first occurrence always returns False.
        """
        key = normalize_question(question)
        if not key:
            return False
        first_seen = self._seen.get(key)
        if first_seen is not None and now - first_seen <= self.window_s:
            return True
        self._seen[key] = now
        self._prune(now)
        return False

    def _prune(self, now: float) -> None:
        cutoff = now - self.window_s
        self._seen = {k: t for k, t in self._seen.items() if t >= cutoff}


def detect_question(llm, context: str) -> DetectedQuestion:
    """Ask the LLM whether the context ends in a customer product question.

    Malformed JSON gets one repair re-prompt, then falls back to a negative
    result with a logged warning; a live call must not crash on a bad parse.
    """
    if not context:
        raise ValueError("context must be non-empty")
    request = LlmRequest(
        system_prompt=DETECTION_SYSTEM_PROMPT,
        user_prompt=f"Conversation:\n{context}",
        expects_json=True,
    )
    response = llm.complete(request)
    parsed = _parse_detection_json(response.text)
    if parsed is None:
        repair = LlmRequest(
            system_prompt=DETECTION_SYSTEM_PROMPT,
            user_prompt=(
                f"Conversation:\n{context}\n\n"
                "Your previous reply was not valid JSON. Respond again with the "
                "JSON object only."
            ),
            expects_json=True,
        )
        parsed = _parse_detection_json(llm.complete(repair).text)
    if parsed is None:
        logger.warning("question detector returned unparseable JSON twice; treating as no question")
        return DetectedQuestion(detected=False)
    return parsed


def _parse_detection_json(text: str) -> DetectedQuestion | None:
    candidate = text.strip()
    if candidate.startswith("```"):
        candidate = re.sub(r"^```[a-zA-Z]*\n?|\n?```$", "", candidate).strip()
    if not candidate.startswith("{"):
        match = re.search(r"\{.*\}", candidate, re.S)
        if not match:
            return None
        candidate = match.group(0)
    try:
        data = json.loads(candidate)
    except json.JSONDecodeError:
        return None
    if not isinstance(data, dict) or "detected" not in data:
        return None
    detected = bool(data["detected"])
    question = str(data.get("question") or "")
    if not detected:
        return DetectedQuestion(detected=False)
    if not question:
        return DetectedQuestion(detected=False)
    category = str(data.get("category") or "general")
    if category not in CATEGORIES:
        category = "general"
    try:
        confidence = float(data.get("confidence", 0.0))
    except (TypeError, ValueError):
        confidence = 0.0
    confidence = min(1.0, max(0.0, confidence))
    return DetectedQuestion(True, question, category, confidence)


def validate_readonly_sql(sql: str) -> sqlguard.Verdict:
    """Safety gate for generated SQL; see :mod:`sales_assist.sqlguard`."""
    return sqlguard.validate_readonly_sql(sql)


def _clean_sql(text: str) -> str:
    sql = text.strip()
    if sql.startswith("```"):
        sql = re.sub(r"^```[a-zA-Z]*\n?|\n?```$", "", sql).strip()
    return sql


def _primary_table(sql: str) -> str:
    match = re.search(r"\bFROM\s+([A-Za-z_][A-Za-z0-9_]*)", sql, re.I)
    return match.group(1).lower() if match else "query"


def _row_key(row: RetrievedRow) -> tuple:
    row_id = row.payload.get("id")
    if row_id is not None:
        return (row.table, row_id)
    return (row.table, tuple(sorted((k, repr(v)) for k, v in row.payload.items())))


def retrieve(llm, kb: KnowledgeBase, question: DetectedQuestion) -> RetrievalResult:
    """Hybrid retrieval: FAQ keyword match plus validated text-to-SQL.

    FAQ rows rank first in the merged list; duplicates collapse on the
    (table, id) identity and the merge stops at 10 rows. A rejected or
    failing generated query never sinks the result - the FAQ rows still
    come back with the failure reason recorded.
    """
    if not question.detected:
        raise ContractViolationError("retrieve requires a detected question")
    result = RetrievalResult()
    faq_error: Exception | None = None

    started = time.perf_counter()
    faq_rows: list[RetrievedRow] = []
    try:
        for faq, _score in kb.faq_keyword_search(question.question, limit=FAQ_TOP_K):
            faq_rows.append(RetrievedRow(
                source="faq_match",
                table="faqs",
                payload={"id": faq.id, "product_id": faq.product_id,
                         "question": faq.question, "answer": faq.answer},
            ))
    except SalesAssistError as exc:
        faq_error = exc
        logger.warning("FAQ search failed: %s", exc)
    result.strategy_timings["faq_search"] = time.perf_counter() - started

    started = time.perf_counter()
    sql_rows: list[RetrievedRow] = []
    sql_error: Exception | None = None
    try:
        request = LlmRequest(
            system_prompt=SQL_SYSTEM_PROMPT,
            user_prompt=f"Question: {question.question}",
        )
        result.generated_sql = _clean_sql(llm.complete(request).text)
    except ProviderError as exc:
        sql_error = exc
        logger.warning("text-to-SQL generation failed: %s", exc)
    result.strategy_timings["sql_generation"] = time.perf_counter() - started

    started = time.perf_counter()
    if result.generated_sql:
        verdict = sqlguard.validate_readonly_sql(result.generated_sql)
        if not verdict.accepted:
            result.sql_failure = f"rejected: {verdict.reason}"
        else:
            try:
                table = _primary_table(result.generated_sql)
                for row in kb.execute_readonly_sql(result.generated_sql):
                    sql_rows.append(RetrievedRow("generated_sql", table, row))
            except SalesAssistError as exc:
                sql_error = exc
                result.sql_failure = f"execution failed: {exc}"
    elif sql_error is not None:
        result.sql_failure = f"generation failed: {sql_error}"
    result.strategy_timings["sql_execution"] = time.perf_counter() - started

    if faq_error is not None and sql_error is not None:
        raise RetrievalError(
            f"both strategies failed (faq: {faq_error}; sql: {sql_error})") from faq_error

    seen: set[tuple] = set()
    for row in faq_rows + sql_rows:
        key = _row_key(row)
        if key in seen:
            continue
        seen.add(key)
        result.rows.append(row)
        if len(result.rows) >= MERGED_ROW_CAP:
            break
    return result


def _format_rows(retrieval: RetrievalResult, max_value_chars: int = 220) -> str:
    if not retrieval.rows:
        return "- (none)"
    lines = []
    for row in retrieval.rows:
        parts = []
        for key, value in row.payload.items():
            text = str(value)
            if len(text) > max_value_chars:
                text = text[:max_value_chars] + "..."
            parts.append(f"{key}={text}")
        lines.append(f"- [{row.table}] " + "; ".join(parts))
    return "\n".join(lines)


def generate_answer(llm, question: DetectedQuestion, retrieval: RetrievalResult) -> str:
    """Produce the card answer text from the retrieved rows."""
    if not question.detected:
        raise ContractViolationError("generate_answer requires a detected question")
    request = LlmRequest(
        system_prompt=ANSWER_SYSTEM_PROMPT,
        user_prompt=(
            f"Question: {question.question}\n"
            f"Data rows:\n{_format_rows(retrieval)}"
        ),
        max_output_tokens=256,
    )
    answer = llm.complete(request).text.strip()
    if not answer:
        answer = "That detail was not found in the product database."
    return answer


def describe_sources(retrieval: RetrievalResult) -> str:
    """Human-readable summary of which tables and strategies fed the answer."""
    seen: list[str] = []
    for row in retrieval.rows:
        label = f"{row.table} ({row.source})"
        if label not in seen:
            seen.append(label)
    return ", ".join(seen)


class SessionPipeline:
    """Per-session state: buffer, dedup memory, and the staged card flow."""

    def __init__(self, kb: KnowledgeBase, llm, dedup_enabled: bool = True):
        self.kb = kb
        self.llm = llm
        self.buffer = ConversationBuffer()
        self.deduper = QuestionDeduper()
        self.dedup_enabled = dedup_enabled
        self._card_seq = 0

    def process_final_segment(
        self, segment: TranscriptSegment, now: float | None = None
    ) -> SuggestionCard | None:
        """Run the staged flow for one final segment.

        Rep turns only update the buffer. Customer turns trigger detection;
        a detected, non-duplicate question continues through retrieval and
        answer generation, and the card carries wall-clock stage timings.
        """
        if not segment.is_final:
            raise ContractViolationError("only final segments are processed")
        now = segment.end_time if now is None else now
        self.buffer.append(segment, now=now)
        if segment.speaker != "customer":
            return None

        total_start = time.perf_counter()
        detection = detect_question(self.llm, self.buffer.context())
        detection_s = time.perf_counter() - total_start
        if not detection.detected:
            return None
        if self.dedup_enabled and self.deduper.is_duplicate(detection.question, now):
            logger.debug("suppressed duplicate question: %s", detection.question)
            return None

        stage_start = time.perf_counter()
        retrieval = retrieve(self.llm, self.kb, detection)
        retrieval_s = time.perf_counter() - stage_start

        stage_start = time.perf_counter()
        answer = generate_answer(self.llm, detection, retrieval)
        generation_s = time.perf_counter() - stage_start
        total_s = time.perf_counter() - total_start

        self._card_seq += 1
        return SuggestionCard(
            card_id=f"card-{self._card_seq}",
            question=detection.question,
            answer=answer,
            category=detection.category,
            confidence=detection.confidence,
            source=describe_sources(retrieval),
            timings=StageTimings(detection_s, retrieval_s, generation_s, total_s),
        )
