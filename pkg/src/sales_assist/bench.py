"""Latency benchmark harness.

Runs the 20-question set through the detect/retrieve/generate pipeline on
the text-input path (no STT), records per-stage wall-clock timings after a
warm-up pass, aggregates them per category, compares against the manual
CRM-search baseline, and emits the report files (JSON, three CSVs, and a
markdown summary).

Standard deviations are population (divide by N), noted in the report
metadata. Savings formulas:

    speedup            = baseline_mean / measured_mean
    per-10-question    = 10 * (baseline_mean - measured_mean) / 60   minutes
    per-20-calls       = 200 * (baseline_mean - measured_mean) / 3600 hours
"""

from __future__ import annotations

import csv
import json
import logging
import statistics
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .errors import ProviderError, SalesAssistError
from .kb import KnowledgeBase
from .pipeline import SessionPipeline, TranscriptSegment
from .providers import ProviderConfig, make_llm_client

logger = logging.getLogger(__name__)

BENCH_CATEGORIES = ("coverage", "pricing", "policy_terms", "claims",
                    "eligibility", "cross_product")
CATEGORY_QUOTA = {"coverage": 4, "pricing": 4, "policy_terms": 3,
                  "claims": 3, "eligibility": 3, "cross_product": 3}
QUESTION_COUNT = 20
STAGES = ("detection", "retrieval", "generation")
_QUESTION_SPACING_S = 30.0


class BenchValidationError(SalesAssistError):
    pass


@dataclass(frozen=True)
class BenchmarkQuestion:
    id: int
    text: str
    category: str


@dataclass(frozen=True)
class BenchmarkSample:
    question_id: int
    category: str
    detected: bool
    timings: dict[str, float]
    error: str | None = None

    def as_dict(self) -> dict[str, Any]:
        data = {
            "question_id": self.question_id,
            "category": self.category,
            "detected": self.detected,
            "timings": dict(self.timings),
        }
        if self.error:
            data["error"] = self.error
        return data


@dataclass(frozen=True)
class BaselineModel:
    overall_mean_s: float
    range_s: tuple[float, float]
    per_category_mean_s: dict[str, float]

    def validate(self) -> None:
        low, high = self.range_s
        for category, mean in self.per_category_mean_s.items():
            if not low <= mean <= high:
                raise BenchValidationError(
                    f"baseline mean for {category} ({mean}s) outside range [{low}, {high}]")


def default_questions_path() -> Path:
    return Path(str(resources.files("sales_assist.assets").joinpath("benchmark_questions.json")))


def default_baseline_path() -> Path:
    return Path(str(resources.files("sales_assist.assets").joinpath("baseline.json")))


def load_questions(path: str | Path) -> list[BenchmarkQuestion]:
    """Load the benchmark set, enforcing the 20-question category quota."""
    raw = json.loads(Path(path).read_text("utf-8"))
    if not isinstance(raw, list):
        raise BenchValidationError("question file must be a JSON array")
    questions = []
    for item in raw:
        try:
            questions.append(BenchmarkQuestion(int(item["id"]), str(item["text"]),
                                               str(item["category"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise BenchValidationError(f"malformed question entry: {item!r}") from exc
    if len(questions) != QUESTION_COUNT:
        raise BenchValidationError(
            f"expected {QUESTION_COUNT} questions, got {len(questions)}")
    ids = [q.id for q in questions]
    if len(set(ids)) != len(ids):
        raise BenchValidationError("duplicate question ids")
    counts: dict[str, int] = {}
    for q in questions:
        if q.category not in BENCH_CATEGORIES:
            raise BenchValidationError(f"unknown category {q.category!r}")
        counts[q.category] = counts.get(q.category, 0) + 1
    if counts != CATEGORY_QUOTA:
        raise BenchValidationError(
            f"category distribution {counts} != required {CATEGORY_QUOTA}")
    return questions


def load_baseline(path: str | Path | None = None) -> BaselineModel:
    raw = json.loads(Path(path or default_baseline_path()).read_text("utf-8"))
    model = BaselineModel(
        overall_mean_s=float(raw["overall_mean_s"]),
        range_s=(float(raw["range_s"][0]), float(raw["range_s"][1])),
        per_category_mean_s={k: float(v) for k, v in raw["per_category_mean_s"].items()},
    )
    model.validate()
    return model


def run_benchmark(
    config: ProviderConfig,
    kb: KnowledgeBase,
    questions: list[BenchmarkQuestion],
    warmup: int = 1,
    llm=None,
) -> list[BenchmarkSample]:
    """One measured pass per question, preceded by unmeasured warm-up passes.

    Deduplication is disabled so every question is processed, warm-up
    included. A provider hard failure marks that sample undetected with an
    error note and the run continues.
    """
    llm = llm or make_llm_client(config)
    pipeline = SessionPipeline(kb, llm, dedup_enabled=False)
    clock = 0.0

    for _ in range(warmup):
        clock += _QUESTION_SPACING_S
        _run_question(pipeline, questions[0], clock)

    samples = []
    for question in questions:
        clock += _QUESTION_SPACING_S
        samples.append(_run_question(pipeline, question, clock))
    return samples


def _run_question(pipeline: SessionPipeline, question: BenchmarkQuestion,
                  clock: float) -> BenchmarkSample:
    segment = TranscriptSegment("customer", question.text, True, clock, clock)
    try:
        card = pipeline.process_final_segment(segment, now=clock)
    except (ProviderError, SalesAssistError) as exc:
        logger.warning("question %d failed: %s", question.id, exc)
        return BenchmarkSample(question.id, question.category, False,
                               {s: 0.0 for s in (*STAGES, "total")}, error=str(exc))
    if card is None:
        return BenchmarkSample(question.id, question.category, False,
                               {s: 0.0 for s in (*STAGES, "total")}, error="not detected")
    return BenchmarkSample(question.id, question.category, True, card.timings.as_dict())


@dataclass(frozen=True)
class StatSummary:
    mean: float
    median: float
    std: float

    def as_dict(self) -> dict[str, float]:
        return {"mean": self.mean, "median": self.median, "std": self.std}


@dataclass
class Aggregate:
    per_category: dict[str, StatSummary]
    overall: StatSummary
    stage_breakdown: dict[str, dict[str, float]]  # stage -> {mean, share}
    detection_rate: float
    sample_count: int


def _summarize(values: list[float]) -> StatSummary:
    return StatSummary(
        mean=statistics.fmean(values),
        median=statistics.median(values),
        std=statistics.pstdev(values),
    )


def aggregate(samples: list[BenchmarkSample]) -> Aggregate:
    """Per-category and overall latency stats over the detected samples."""
    if not samples:
        raise BenchValidationError("cannot aggregate zero samples")
    detected = [s for s in samples if s.detected]
    if not detected:
        raise BenchValidationError("no sample was detected; nothing to aggregate")

    per_category = {}
    for category in BENCH_CATEGORIES:
        totals = [s.timings["total"] for s in detected if s.category == category]
        if totals:
            per_category[category] = _summarize(totals)
    overall = _summarize([s.timings["total"] for s in detected])
    total_mean = overall.mean
    stage_breakdown = {}
    for stage in STAGES:
        stage_mean = statistics.fmean([s.timings[stage] for s in detected])
        stage_breakdown[stage] = {
            "mean": stage_mean,
            "share": stage_mean / total_mean if total_mean > 0 else 0.0,
        }
    return Aggregate(
        per_category=per_category,
        overall=overall,
        stage_breakdown=stage_breakdown,
        detection_rate=len(detected) / len(samples),
        sample_count=len(samples),
    )


@dataclass
class Comparison:
    speedup: float
    per_category_speedup: dict[str, float]
    savings_per_10q_call_min: float
    savings_per_20_calls_h: float
    baseline_overall_mean_s: float


def compare_baseline(agg: Aggregate, baseline: BaselineModel) -> Comparison:
    """Speedup and cumulative-savings arithmetic against the manual baseline."""
    measured = agg.overall.mean
    if measured <= 0:
        raise BenchValidationError("measured mean must be positive")
    saved_per_question = baseline.overall_mean_s - measured
    per_category_speedup = {}
    for category, stats_ in agg.per_category.items():
        base = baseline.per_category_mean_s.get(category)
        if base and stats_.mean > 0:
            per_category_speedup[category] = base / stats_.mean
    return Comparison(
        speedup=baseline.overall_mean_s / measured,
        per_category_speedup=per_category_speedup,
        savings_per_10q_call_min=10 * saved_per_question / 60,
        savings_per_20_calls_h=200 * saved_per_question / 3600,
        baseline_overall_mean_s=baseline.overall_mean_s,
    )


@dataclass
class BenchReport:
    agg: Aggregate
    comparison: Comparison
    baseline: BaselineModel
    metadata: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "per_category": {c: s.as_dict() for c, s in self.agg.per_category.items()},
            "overall": self.agg.overall.as_dict(),
            "stage_breakdown": self.agg.stage_breakdown,
            "detection_rate": self.agg.detection_rate,
            "sample_count": self.agg.sample_count,
            "speedup": self.comparison.speedup,
            "per_category_speedup": self.comparison.per_category_speedup,
            "savings": {
                "per_10q_call_min": self.comparison.savings_per_10q_call_min,
                "per_20_calls_h": self.comparison.savings_per_20_calls_h,
            },
            "baseline": {
                "overall_mean_s": self.baseline.overall_mean_s,
                "range_s": list(self.baseline.range_s),
                "per_category_mean_s": self.baseline.per_category_mean_s,
            },
            "metadata": self.metadata,
        }


def build_report(samples: list[BenchmarkSample],
                 baseline: BaselineModel) -> BenchReport:
    agg = aggregate(samples)
    comparison = compare_baseline(agg, baseline)
    return BenchReport(agg, comparison, baseline, metadata={
        "std": "population (divide by N)",
        "stage_share": "stage mean / total mean",
    })


def emit_report(report: BenchReport, out_dir: str | Path) -> list[Path]:
    """Write report.json, the three CSV data tables, and summary.md."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        from .errors import StorageError

        raise StorageError(f"cannot write to {out}: {exc}") from exc

    written = []

    report_path = out / "report.json"
    report_path.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    written.append(report_path)

    per_cat_path = out / "per_category.csv"
    with per_cat_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["category", "manual_mean", "copilot_mean", "copilot_std", "speedup"])
        for category in BENCH_CATEGORIES:
            stats_ = report.agg.per_category.get(category)
            if stats_ is None:
                continue
            writer.writerow([
                category,
                f"{report.baseline.per_category_mean_s.get(category, ''):.1f}",
                f"{stats_.mean:.3f}",
                f"{stats_.std:.3f}",
                f"{report.comparison.per_category_speedup.get(category, 0.0):.1f}",
            ])
    written.append(per_cat_path)

    stage_path = out / "stage_breakdown.csv"
    with stage_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["stage", "mean_s", "share"])
        for stage in STAGES:
            entry = report.agg.stage_breakdown[stage]
            writer.writerow([stage, f"{entry['mean']:.3f}", f"{entry['share']:.3f}"])
    written.append(stage_path)

    cumulative_path = out / "cumulative.csv"
    with cumulative_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "manual_s", "copilot_s", "saved_s"])
        for n in range(1, QUESTION_COUNT + 1):
            manual = n * report.baseline.overall_mean_s
            copilot = n * report.agg.overall.mean
            writer.writerow([n, f"{manual:.1f}", f"{copilot:.1f}", f"{manual - copilot:.1f}"])
    written.append(cumulative_path)

    summary_path = out / "summary.md"
    summary_path.write_text(_summary_markdown(report))
    written.append(summary_path)
    return written


def _summary_markdown(report: BenchReport) -> str:
    base = report.baseline.overall_mean_s
    measured = report.agg.overall.mean
    detected = round(report.agg.detection_rate * report.agg.sample_count)
    lines = [
        "# Benchmark summary",
        "",
        "| Metric | Manual search | This pipeline | Improvement |",
        "|---|---|---|---|",
        (f"| Avg. response time | {base:.1f}s | {measured:.1f}s | "
         f"{report.comparison.speedup:.1f}x faster |"),
        (f"| Response time std dev | n/a | {report.agg.overall.std:.1f}s | |"),
        (f"| Question detection rate | n/a | {report.agg.detection_rate:.0%} "
         f"({detected}/{report.agg.sample_count}) | |"),
        (f"| Time per 10-question call | {10 * base / 60:.1f} min | "
         f"{10 * measured / 60:.1f} min | "
         f"{report.comparison.savings_per_10q_call_min:.2f} min saved |"),
        (f"| Time per 20 calls/day | {200 * base / 3600:.1f} h | "
         f"{200 * measured / 3600:.1f} h | "
         f"{report.comparison.savings_per_20_calls_h:.2f} h saved |"),
        "",
        "Stage breakdown (share of total):",
        "",
    ]
    for stage in STAGES:
        entry = report.agg.stage_breakdown[stage]
        lines.append(f"- {stage}: {entry['mean']:.2f}s ({entry['share']:.0%})")
    lines.append("")
    return "\n".join(lines)


def save_samples(samples: list[BenchmarkSample], path: str | Path) -> None:
    Path(path).write_text(json.dumps([s.as_dict() for s in samples], indent=2) + "\n")


def load_samples(path: str | Path) -> list[BenchmarkSample]:
    raw = json.loads(Path(path).read_text("utf-8"))
    return [
        BenchmarkSample(
            question_id=int(item["question_id"]),
            category=str(item["category"]),
            detected=bool(item["detected"]),
            timings={k: float(v) for k, v in item["timings"].items()},
            error=item.get("error"),
        )
        for item in raw
    ]
