"""Console entry points: kb, server, and bench."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import bench as bench_mod
from . import kb as kb_mod
from .errors import SalesAssistError
from .providers import MockDelays, ProviderConfig, from_env
from .synth import dataset_to_json, generate_synthetic_dataset

logger = logging.getLogger(__name__)


def _provider_config(providers: str, delays: str | None) -> ProviderConfig:
    config = from_env() if providers == "live" else ProviderConfig()
    if delays:
        config.mock_delays = MockDelays.parse(delays)
    return config


def kb_main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="kb", description="Manage the knowledge base store.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_init = sub.add_parser("init", help="create the schema (idempotent)")
    p_init.add_argument("--db", required=True, help="path to the store file")

    p_seed = sub.add_parser("seed", help="seed from the generator or a JSON document")
    p_seed.add_argument("--db", required=True)
    source = p_seed.add_mutually_exclusive_group()
    source.add_argument("--seed", type=int, default=None, metavar="N",
                        help="generator seed (default 0)")
    source.add_argument("--from", dest="from_file", default=None, metavar="JSON",
                        help="seed from an existing dataset document")
    p_seed.add_argument("--overwrite", action="store_true",
                        help="replace existing rows instead of failing")

    p_stats = sub.add_parser("stats", help="print row counts as JSON")
    p_stats.add_argument("--db", required=True)

    p_gen = sub.add_parser("generate", help="write a dataset document without seeding")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True, help="output JSON path")

    args = parser.parse_args(argv)
    try:
        if args.command == "init":
            handle = kb_mod.init_schema(args.db)
            handle.close()
            print(f"initialized {args.db}")
        elif args.command == "seed":
            if args.from_file:
                dataset = json.loads(Path(args.from_file).read_text("utf-8"))
            else:
                dataset = generate_synthetic_dataset(0 if args.seed is None else args.seed)
            handle = kb_mod.init_schema(args.db)
            try:
                stats = handle.seed(dataset, overwrite=args.overwrite)
            finally:
                handle.close()
            print(json.dumps(stats.as_dict(), indent=2))
        elif args.command == "stats":
            handle = kb_mod.init_schema(args.db)
            try:
                stats = handle.stats()
            finally:
                handle.close()
            print(json.dumps(stats.as_dict(), indent=2))
        elif args.command == "generate":
            Path(args.out).write_text(dataset_to_json(generate_synthetic_dataset(args.seed)))
            print(f"wrote {args.out}")
    except SalesAssistError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def server_main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="server", description="Run the WebSocket gateway.")
    parser.add_argument("--db", required=True, help="knowledge base store path")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--providers", choices=("mock", "live"), default="mock")
    parser.add_argument("--delays", default=None,
                        help="mock per-stage delays d,r,g in seconds (e.g. 0.7,0.8,1.3)")
    parser.add_argument("--demo-script", default=None, help="override the demo script file")
    parser.add_argument("--stt-script", default=None,
                        help="scripted transcript JSON for the mock STT provider")
    args = parser.parse_args(argv)

    import uvicorn

    from .gateway import create_app

    logging.basicConfig(level=logging.INFO)
    stt_script = None
    if args.stt_script:
        stt_script = json.loads(Path(args.stt_script).read_text("utf-8"))
    app = create_app(
        args.db,
        _provider_config(args.providers, args.delays),
        demo_script_path=args.demo_script,
        stt_script=stt_script,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def bench_main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="bench", description="Latency benchmark harness.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the benchmark and emit the report")
    p_run.add_argument("--db", required=True)
    p_run.add_argument("--questions", default=None, help="question set JSON (default packaged)")
    p_run.add_argument("--providers", choices=("mock", "live"), default="mock")
    p_run.add_argument("--delays", default=None,
                       help="mock per-stage delays d,r,g in seconds")
    p_run.add_argument("--warmup", type=int, default=1)
    p_run.add_argument("--baseline", default=None, help="baseline config JSON")
    p_run.add_argument("--out", required=True, help="output directory")

    p_report = sub.add_parser("report", help="rebuild the report from saved samples")
    p_report.add_argument("--samples", required=True)
    p_report.add_argument("--baseline", default=None)
    p_report.add_argument("--out", required=True)

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            questions = bench_mod.load_questions(
                args.questions or bench_mod.default_questions_path())
            baseline = bench_mod.load_baseline(args.baseline)
            config = _provider_config(args.providers, args.delays)
            handle = kb_mod.init_schema(args.db)
            try:
                if handle.stats().products == 0:
                    handle.seed(generate_synthetic_dataset(0))
                samples = bench_mod.run_benchmark(config, handle, questions,
                                                  warmup=args.warmup)
            finally:
                handle.close()
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            bench_mod.save_samples(samples, out / "samples.json")
            report = bench_mod.build_report(samples, baseline)
            files = bench_mod.emit_report(report, out)
            print(f"mean total {report.agg.overall.mean:.2f}s, "
                  f"detection rate {report.agg.detection_rate:.0%}, "
                  f"speedup {report.comparison.speedup:.1f}x")
            for path in files:
                print(f"wrote {path}")
        elif args.command == "report":
            samples = bench_mod.load_samples(args.samples)
            baseline = bench_mod.load_baseline(args.baseline)
            report = bench_mod.build_report(samples, baseline)
            for path in bench_mod.emit_report(report, args.out):
                print(f"wrote {path}")
    except SalesAssistError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0
