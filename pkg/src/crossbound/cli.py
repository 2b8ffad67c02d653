"""``crossbound`` command line.

Exit codes: 0 success, 2 usage or input error, 3 store error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import ConfigError, InputError, StoreError, load_config
from .pipeline import BUNDLE_FILE, load_bundle, run_analyze, run_ingest
from .reports import FORMATS, write_reports

logger = logging.getLogger("crossbound")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_STORE = 3


def _formats(value: str) -> list[str]:
    items = [v.strip() for v in value.split(",") if v.strip()]
    bad = [v for v in items if v not in FORMATS]
    if bad or not items:
        raise argparse.ArgumentTypeError(
            f"unknown format {', '.join(bad) or value!r}; choose from {', '.join(FORMATS)}"
        )
    return items


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crossbound",
        description="Structural analysis of mailing-list design discussions and revision logs.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, type=Path, help="analysis config (YAML or JSON)")
        p.add_argument("--out", type=Path, help="override the config's output directory")

    with_config(sub.add_parser("ingest", help="parse archives and build the corpus store"))
    analyze = sub.add_parser("analyze", help="compute the metrics bundle from the store")
    with_config(analyze)
    analyze.add_argument("--jobs", type=int, help="analyse corpora in N processes")
    report = sub.add_parser("report", help="render tables, timeline and graphs")
    with_config(report)
    report.add_argument("--format", type=_formats, default=list(FORMATS),
                        help="comma-separated subset of csv,json,dot")
    run = sub.add_parser("run", help="ingest, analyze and report in one go")
    with_config(run)
    run.add_argument("--format", type=_formats, default=list(FORMATS))

    synth = sub.add_parser("synth", help="generate a synthetic corpus with ground truth")
    synth.add_argument("--seed", type=int, required=True)
    synth.add_argument("--params", type=Path, help="YAML/JSON synthesis parameters")
    synth.add_argument("--out", type=Path, required=True)
    return parser


def _run(args: argparse.Namespace) -> int:
    if args.command == "synth":
        from .synth import SynthParams, write_corpus

        params = SynthParams.load(args.params, seed=args.seed) if args.params else SynthParams(seed=args.seed)
        write_corpus(params, args.out)
        print(f"synthetic corpus written to {args.out}")
        return EXIT_OK

    cfg = load_config(args.config, output=args.out)
    if getattr(args, "jobs", None):
        from dataclasses import replace

        cfg = replace(cfg, jobs=args.jobs)
    if args.command in ("ingest", "run"):
        store = run_ingest(cfg)
        print(f"store written to {store}")
    if args.command in ("analyze", "run"):
        path = run_analyze(cfg)
        print(f"metrics bundle written to {path}")
    if args.command in ("report", "run"):
        bundle = load_bundle(cfg.output / BUNDLE_FILE)
        for path in write_reports(bundle, cfg.output, args.format):
            print(path)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return _run(args)
    except (ConfigError, InputError) as exc:
        print(f"crossbound: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except StoreError as exc:
        print(f"crossbound: store error: {exc}", file=sys.stderr)
        return EXIT_STORE


if __name__ == "__main__":
    sys.exit(main())
