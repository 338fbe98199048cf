"""Command line entry point: ``hleadership {fetch,compute,report,synth}``.

Exit codes: 0 ok, 1 usage, 2 config, 3 network/quota, 4 I/O, 5 internal.
Diagnostics go to stderr; data goes to files.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import report as rpt
from .corpus import load_corpus, parse_affiliations_config
from .errors import BibliometricsError, ConfigError, MissingCredential
from .metrics import compute_metrics
from .mock import MockTransport
from .scopus import (
    DEFAULT_BASE_URL,
    DEFAULT_PAGE_SIZE,
    DEFAULT_WEEKLY_BUDGET,
    RateLimitState,
    ScopusClient,
    UrllibTransport,
    persist_researcher,
    run_fetch,
)
from .synth import CorpusSpec, generate_corpus
from .weights import DEFAULT_FLOOR, DEFAULT_MU, DEFAULT_SIGMA, WeightParams

logger = logging.getLogger("hleadership")

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_NETWORK, EXIT_IO, EXIT_INTERNAL = range(6)
API_KEY_ENV = "SCOPUS_API_KEY"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _weight_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mu", type=float, default=DEFAULT_MU, help="peak-penalty position (default: %(default)s)")
    p.add_argument("--sigma", type=float, default=DEFAULT_SIGMA, help="curve width (default: %(default)s)")
    p.add_argument("--floor", type=float, default=DEFAULT_FLOOR, help="minimum weight (default: %(default)s)")
    p.add_argument("--cohort", choices=("all", "university"), default="all", help="c-score normalisation cohort")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hleadership", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", metavar="{fetch,compute,report,synth}", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("fetch", help="retrieve researcher records from Scopus")
    p.add_argument("--config", type=Path, default=Path("data/affiliations.json"))
    p.add_argument("--data", type=Path, default=Path("data"))
    p.add_argument("--discipline", default=None, help="required subject area of matched authors")
    p.add_argument("--min-documents", type=int, default=0)
    p.add_argument("--base-url", default=DEFAULT_BASE_URL, help="API root, or mock:<file.json> for an offline replay")
    p.add_argument("--page-size", type=int, default=DEFAULT_PAGE_SIZE)
    p.add_argument("--weekly-budget", type=int, default=DEFAULT_WEEKLY_BUDGET)

    p = sub.add_parser("compute", help="compute metrics.csv from stored records")
    p.add_argument("--data", type=Path, default=Path("data"))
    p.add_argument("--out", type=Path, default=Path("results"))
    _weight_args(p)

    p = sub.add_parser("report", help="write summary tables and plot data")
    p.add_argument("--data", type=Path, default=Path("data"))
    p.add_argument("--out", type=Path, default=Path("results"))
    p.add_argument("--discipline", default=None, help="also write a sampled researcher table for this subject area")
    p.add_argument("--sample-n", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--artifact", choices=rpt.PLOT_KINDS, action="append", help="limit plot data to these kinds")
    _weight_args(p)

    p = sub.add_parser("synth", help="write a seeded synthetic corpus as stored records")
    p.add_argument("--out", "--data", dest="out", type=Path, default=Path("data"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--universities", type=int, default=8)
    p.add_argument("--researchers", type=int, default=50)
    p.add_argument("--max-pubs", type=int, default=200)
    p.add_argument("--max-authors", type=int, default=150)
    p.add_argument("--max-citations", type=int, default=100_000)
    return parser


def _params(args) -> WeightParams:
    try:
        return WeightParams(mu=args.mu, sigma=args.sigma, floor=args.floor)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _load(data: Path):
    corpus, report = load_corpus(data)
    for path, msg in report.failures:
        logger.warning("unreadable record %s: %s", path, msg)
    for msg in report.warnings:
        logger.warning("%s", msg)
    return corpus


def cmd_fetch(args) -> int:
    try:
        raw = args.config.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    configs = parse_affiliations_config(raw)
    api_key = os.environ.get(API_KEY_ENV)
    if args.base_url.startswith("mock:"):
        transport = MockTransport.from_file(args.base_url.removeprefix("mock:"))
    else:
        if not api_key and args.base_url == DEFAULT_BASE_URL:
            raise MissingCredential(f"{API_KEY_ENV} is not set; export it or pass --base-url for a mock server")
        transport = UrllibTransport()
    base = DEFAULT_BASE_URL if args.base_url.startswith("mock:") else args.base_url
    client = ScopusClient(
        transport,
        api_key=api_key,
        base_url=base,
        page_size=args.page_size,
        state=RateLimitState(remaining_quota=args.weekly_budget, weekly_budget=args.weekly_budget),
    )
    result = run_fetch(configs, client, args.data, args.discipline, args.min_documents)
    logger.info(
        "fetch: %d stored, %d unmatched, %d failed, %d requests",
        len(result.persisted),
        len(result.no_match),
        len(result.failed),
        client.requests_issued,
    )
    for uni, name in result.no_match:
        logger.warning("no match: %s (%s)", name, uni)
    if result.fatal is not None:
        raise result.fatal
    return EXIT_OK


def cmd_compute(args) -> int:
    params = _params(args)
    corpus = _load(args.data)
    rows = compute_metrics(corpus, params, args.cohort)
    path = rpt.emit_metrics_csv(rows, args.out / "metrics.csv")
    logger.info("wrote %s (%d researchers)", path, len(rows))
    return EXIT_OK


def cmd_report(args) -> int:
    params = _params(args)
    corpus = _load(args.data)
    if len(corpus):
        rows = compute_metrics(corpus, params, args.cohort)
        rpt.emit_summary_csv(rpt.university_summary(corpus, params, rows), args.out / "summary.csv")
    if args.discipline:
        table = rpt.researcher_table(corpus, args.discipline, args.sample_n, args.seed, params, args.cohort)
        slug = "".join(ch if ch.isalnum() else "_" for ch in args.discipline.lower())
        rpt.emit_metrics_csv(table, args.out / f"table_{slug}.csv")
    for kind in args.artifact or rpt.PLOT_KINDS:
        path = rpt.emit_plot_data(kind, corpus, args.out / "plots")
        logger.info("wrote %s", path)
    return EXIT_OK


def cmd_synth(args) -> int:
    try:
        spec = CorpusSpec(
            n_universities=args.universities,
            researchers_per_university=args.researchers,
            max_pubs=args.max_pubs,
            max_authors=args.max_authors,
            max_citations=args.max_citations,
            seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    corpus = generate_corpus(spec)
    for profile in corpus.researchers():
        persist_researcher(profile, args.out)
    logger.info("wrote %d synthetic researchers to %s", len(corpus), args.out / "Scopus")
    return EXIT_OK


COMMANDS = {"fetch": cmd_fetch, "compute": cmd_compute, "report": cmd_report, "synth": cmd_synth}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    except BibliometricsError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    except OSError as exc:
        logger.error("I/O error: %s", exc)
        return EXIT_IO
    except Exception:
        logger.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
