"""Command-line entry points: generate, evaluate, report, agree, serve.

All commands are driven by JSON files; secrets only ever come from
environment variables named in the provider registry. Exit codes: 0 success,
1 configuration error, 2 run completed with row-level failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigurationError
from .pipeline import RunConfig, aggregate_report, run, write_csv


def _load_rows(path: Path) -> list[dict]:
    rows = []
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rows.append(json.loads(line))
    return rows


def cmd_generate(args) -> int:
    config = RunConfig.from_file(args.config)
    config.metrics = {m: False for m in config.metrics}
    result = run(config)
    print(f"wrote {config.count} records -> {result.dataset_path}")
    return 0


def cmd_evaluate(args) -> int:
    config = RunConfig.from_file(args.config)
    result = run(config)
    print(f"dataset:   {result.dataset_path}")
    print(f"rows:      {result.rows_path}")
    print(f"aggregate: {result.aggregate_path}")
    for name, count in sorted(result.provider_calls.items()):
        print(f"provider {name}: {count} calls")
    if result.error_count:
        print(f"{result.error_count} rows had metric errors", file=sys.stderr)
        return 2
    return 0


def cmd_report(args) -> int:
    rows = _load_rows(Path(args.rows))
    aggregate = aggregate_report(rows, generator=args.generator, evaluator=args.evaluator)
    out = json.dumps(aggregate, ensure_ascii=False, indent=2)
    if args.output:
        Path(args.output).write_text(out + "\n", encoding="utf-8")
        print(f"wrote {args.output}")
    else:
        print(out)
    if args.csv:
        write_csv(Path(args.csv), rows)
        print(f"wrote {args.csv}")
    return 0


def cmd_agree(args) -> int:
    from .annotation.store import AnnotationStore
    from .annotation.service import agreement_report

    store = AnnotationStore(Path(args.study), Path(args.annotations))
    report = agreement_report(store)
    out = json.dumps(report, ensure_ascii=False, indent=2)
    if args.output:
        Path(args.output).write_text(out + "\n", encoding="utf-8")
        print(f"wrote {args.output}")
    else:
        print(out)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .annotation.service import create_app

    app = create_app(
        study_path=Path(args.study),
        log_path=Path(args.annotations),
        secret=args.secret,
        static_dir=Path(args.static) if args.static else None,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hazeval", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate the synthetic QA dataset only")
    p.add_argument("--config", required=True)
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("evaluate", help="run the full evaluation pipeline")
    p.add_argument("--config", required=True)
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("report", help="recompute the aggregate block from report rows")
    p.add_argument("--rows", required=True, help="report_rows.jsonl path")
    p.add_argument("--output", help="write aggregate JSON here instead of stdout")
    p.add_argument("--csv", help="also export a flat CSV")
    p.add_argument("--generator", default="")
    p.add_argument("--evaluator", default="")
    p.set_defaults(fn=cmd_report)

    p = sub.add_parser("agree", help="agreement statistics for an annotation study")
    p.add_argument("--study", required=True, help="study JSON file")
    p.add_argument("--annotations", required=True, help="annotation log JSONL")
    p.add_argument("--output")
    p.set_defaults(fn=cmd_agree)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--study", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8400)
    p.add_argument("--secret", default="")
    p.add_argument("--static", help="directory of built UI assets to serve at /")
    p.set_defaults(fn=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
