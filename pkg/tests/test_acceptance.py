"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines as the
criteria execute. Criterion 3 sleeps through the injected stage delays
(0.7 + 0.8 + 1.3)s x 21 passes, so the suite takes about a minute.
"""

import json
import random
import time

import pytest
from fastapi.testclient import TestClient

import fuzz_corpus
import sql_oracle
from sales_assist import bench, kb as kb_mod
from sales_assist.bench import (
    BenchmarkSample,
    aggregate,
    build_report,
    compare_baseline,
    emit_report,
    load_baseline,
    load_questions,
    run_benchmark,
)
from sales_assist.cli import kb_main
from sales_assist.gateway import create_app
from sales_assist.messages import parse, serialize
from sales_assist.pipeline import ConversationBuffer, QuestionDeduper, TranscriptSegment
from sales_assist.providers import MockDelays, ProviderConfig
from sales_assist.sqlguard import validate_readonly_sql


def report_line(number, ok, detail):
    print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
    assert ok, f"criterion {number} failed: {detail}"


def test_criterion_1_kb_counts(tmp_path, capsys):
    """Store counts after canonical seeding match the published table exactly."""
    started = time.monotonic()
    db = str(tmp_path / "acceptance.db")
    assert kb_main(["seed", "--db", db, "--seed", "0"]) == 0
    assert kb_main(["stats", "--db", db]) == 0
    out = capsys.readouterr().out
    stats = json.loads("{" + out.rsplit("{", 1)[1])
    elapsed = time.monotonic() - started

    handle = kb_mod.init_schema(db)
    per_category = handle.execute_readonly_sql(
        "SELECT category, COUNT(*) AS n FROM products GROUP BY category")
    handle.close()

    counts_ok = (stats["products"], stats["coverage_details"], stats["policy_terms"],
                 stats["faqs"], stats["pricing_tiers"]) == (50, 290, 50, 2490, 162)
    category_ok = len(per_category) == 10 and all(r["n"] == 5 for r in per_category)
    ok = counts_ok and category_ok and elapsed < 10
    report_line(1, ok, f"counts {stats}, 10 categories x5={category_ok}, {elapsed:.1f}s")


def test_criterion_2_sql_safety_fuzz():
    """>=1000 fuzzed statements against the independent execution oracle."""
    started = time.monotonic()
    statements = fuzz_corpus.generate(seed=20240810, count=1200)
    assert len(statements) >= 1000
    accepted_write_capable = []
    rejected_selects = []
    for sql, bucket in statements:
        verdict = validate_readonly_sql(sql)
        probe = sql_oracle.probe(sql)
        if verdict.accepted and probe["write_capable"]:
            accepted_write_capable.append(sql)
        if bucket in ("plain_select", "tricky_select") and not verdict.accepted:
            rejected_selects.append((sql, verdict.reason))
    elapsed = time.monotonic() - started
    ok = not accepted_write_capable and not rejected_selects and elapsed < 30
    report_line(2, ok, (f"{len(statements)} statements, "
                        f"{len(accepted_write_capable)} write-capable accepted, "
                        f"{len(rejected_selects)} SELECTs rejected, {elapsed:.1f}s"))


def test_criterion_3_end_to_end_latency(seeded_kb):
    """Mock pipeline with injected delays reproduces the published latency profile."""
    started = time.monotonic()
    config = ProviderConfig(mock_delays=MockDelays(0.7, 0.8, 1.3))
    questions = load_questions(bench.default_questions_path())
    samples = run_benchmark(config, seeded_kb, questions, warmup=1)
    agg = aggregate(samples)
    elapsed = time.monotonic() - started

    detection_ok = agg.detection_rate == 1.0 and agg.sample_count == 20
    mean_ok = abs(agg.overall.mean - 2.8) <= 0.15
    expected_shares = {"detection": 0.24, "retrieval": 0.29, "generation": 0.47}
    share_errors = {
        stage: abs(agg.stage_breakdown[stage]["share"] - expected)
        for stage, expected in expected_shares.items()
    }
    shares_ok = all(err <= 0.03 for err in share_errors.values())
    shares_text = ", ".join(
        f"{stage} {agg.stage_breakdown[stage]['share']:.3f}" for stage in expected_shares)
    ok = detection_ok and mean_ok and shares_ok and elapsed < 120
    report_line(3, ok, (
        f"detected {round(agg.detection_rate * 20)}/20, mean {agg.overall.mean:.3f}s, "
        f"shares ({shares_text}), {elapsed:.0f}s"))


def test_criterion_4_derived_table_math(tmp_path):
    """Speedup and savings arithmetic from baseline 39.7s and measured 2.8s."""
    categories = (["coverage"] * 4 + ["pricing"] * 4 + ["policy_terms"] * 3 +
                  ["claims"] * 3 + ["eligibility"] * 3 + ["cross_product"] * 3)
    samples = [
        BenchmarkSample(i + 1, c, True, {"detection": 0.7, "retrieval": 0.8,
                                         "generation": 1.3, "total": 2.8})
        for i, c in enumerate(categories)
    ]
    report = build_report(samples, load_baseline())
    emit_report(report, tmp_path / "out")
    summary = (tmp_path / "out" / "summary.md").read_text()
    data = report.to_dict()

    speedup_ok = abs(data["speedup"] - 14.2) <= 0.1
    savings10_ok = abs(data["savings"]["per_10q_call_min"] - 6.15) <= 0.05
    savings20_ok = abs(data["savings"]["per_20_calls_h"] - 2.05) <= 0.02
    stated_ok = "14.2x faster" in summary
    ok = speedup_ok and savings10_ok and savings20_ok and stated_ok
    report_line(4, ok, (f"speedup {data['speedup']:.3f}, "
                        f"10q {data['savings']['per_10q_call_min']:.3f} min, "
                        f"20 calls {data['savings']['per_20_calls_h']:.3f} h"))


def test_criterion_5_protocol(tmp_path):
    """Codec bijection over 1,000 instances per type, then a scripted session."""
    from test_messages import BUILDERS

    rng = random.Random(5)
    mismatches = 0
    for type_name in sorted(BUILDERS):
        for _ in range(1000):
            message = BUILDERS[type_name](rng)
            if parse(serialize(message)) != message:
                mismatches += 1
    codec_ok = mismatches == 0

    app = create_app(tmp_path / "kb.db")
    started = time.monotonic()
    with TestClient(app).websocket_connect("/ws") as ws:
        first = json.loads(ws.receive_text())
        ws.send_text(json.dumps({
            "type": "text_input",
            "text": "What is the deductible for SecureLife Premium Term 30?"}))
        second = json.loads(ws.receive_text())
        third = json.loads(ws.receive_text())
    elapsed = time.monotonic() - started
    order_ok = (first["type"] == "status" and first["state"] == "connected"
                and second["type"] == "transcript_update" and second["is_final"] is True
                and third["type"] == "suggestion_card")
    ok = codec_ok and order_ok and elapsed < 5
    report_line(5, ok, (f"7x1000 round-trips with {mismatches} mismatches; "
                        f"status->transcript->card in {elapsed:.2f}s"))


def test_criterion_6_buffer_and_dedup_properties():
    """Window and dedup invariants over 10,000 randomized operations."""
    rng = random.Random(6)
    buffer = ConversationBuffer()
    deduper = QuestionDeduper()
    question_pool = [f"is option {i} covered?" for i in range(12)]
    accepted_at: dict[str, list[float]] = {}
    now = 0.0
    window_violations = 0
    dedup_violations = 0

    for _ in range(10_000):
        now += rng.uniform(0.0, 8.0)
        if rng.random() < 0.5:
            start = max(now - rng.uniform(0.0, 3.0), 0.0)
            buffer.append(TranscriptSegment(
                rng.choice(["rep", "customer"]), "text", True, start, now), now=now)
            if any(now - s.end_time > buffer.window_s for s in buffer.segments):
                window_violations += 1
        else:
            question = rng.choice(question_pool)
            if not deduper.is_duplicate(question, now):
                key = question.lower().rstrip("?")
                accepted_at.setdefault(key, []).append(now)

    for times in accepted_at.values():
        for earlier, later in zip(times, times[1:]):
            if later - earlier <= deduper.window_s:
                dedup_violations += 1

    ok = window_violations == 0 and dedup_violations == 0
    report_line(6, ok, (f"10000 ops, {window_violations} window violations, "
                        f"{dedup_violations} dedup violations"))


def test_criterion_7_demo_trace(tmp_path):
    """Full scripted demo over the wire: 25 finals, 25 audio, 9 cards, 1 ended."""
    started = time.monotonic()
    app = create_app(tmp_path / "kb.db")
    counts = {"transcript_update": 0, "audio_play": 0, "suggestion_card": 0, "status": 0}
    lockstep_ok = True
    emitted = acked = 0
    with TestClient(app).websocket_connect("/ws") as ws:
        assert json.loads(ws.receive_text())["state"] == "connected"
        ws.send_text(json.dumps({"type": "status", "state": "demo_start"}))
        while True:
            frame = json.loads(ws.receive_text())
            counts[frame["type"]] = counts.get(frame["type"], 0) + 1
            if frame["type"] == "transcript_update" and frame["is_final"]:
                emitted += 1
                if emitted - acked not in (0, 1):
                    lockstep_ok = False
            if frame["type"] == "audio_play":
                ws.send_text(json.dumps({"type": "demo_next", "turn_id": frame["turn_id"]}))
                acked += 1
            if frame["type"] == "status" and frame["state"] == "demo_ended":
                break
    elapsed = time.monotonic() - started
    counts_ok = (counts["transcript_update"], counts["audio_play"],
                 counts["suggestion_card"], counts["status"]) == (25, 25, 9, 1)
    ok = counts_ok and lockstep_ok and elapsed < 60
    report_line(7, ok, (f"{counts['transcript_update']} finals, {counts['audio_play']} audio, "
                        f"{counts['suggestion_card']} cards, lock-step={lockstep_ok}, "
                        f"{elapsed:.0f}s"))
