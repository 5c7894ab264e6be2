"""Command-line front end.

Exit codes: 0 success, 1 some rows errored, 2 fatal error (bad manifest, bad
config, strict-mode abort).
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Optional, Sequence

from camobench import __version__
from camobench.attention import attention_to_png, ranking_attention, reverse_attention
from camobench.attributes.classify import classify_dataset
from camobench.attributes.csvio import load_attribute_csv, write_attribute_csv
from camobench.builder.pipeline import build_dataset
from camobench.core.imageio import load_rank_map, load_scalar_map
from camobench.errors import CamoBenchError, InvalidConfig
from camobench.harness.breakdown import (
    attr_breakdown,
    emit_breakdown,
    rank_histogram,
    render_rank_histogram_csv,
)
from camobench.harness.evaluate import attribute_report, eval_fix, eval_rank, eval_seg
from camobench.harness.report import REPORT_FORMATS, EvaluationReport, emit_report, write_text
from camobench.harness.stats import dataset_stats, emit_stats
from camobench.models import BenchConfig, DatasetManifest, ErrorNote
from camobench.settings import get_settings

logger = logging.getLogger("camobench")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

EXIT_OK = 0
EXIT_ROW_ERRORS = 1
EXIT_FATAL = 2


def parse_pred_roots(values: Optional[Sequence[str]]) -> dict[str, str]:
    roots: dict[str, str] = {}
    for value in values or []:
        name, sep, path = value.partition("=")
        if not sep or not name or not path:
            raise InvalidConfig(f"--pred-root expects name=path, got '{value}'")
        roots[name] = path
    return roots


def _add_common(parser: argparse.ArgumentParser, predictions: bool = False) -> None:
    settings = get_settings()
    parser.add_argument("--manifest", required=True, type=Path, help="Dataset manifest JSON")
    parser.add_argument("--out", type=Path, default=Path(settings.out_dir), help="Output directory")
    parser.add_argument("--config", type=Path, default=None, help="Benchmark config JSON")
    parser.add_argument(
        "--seed",
        type=int,
        default=settings.seed,
        help="Run seed; also seeds Corr unless the config sets match.seed",
    )
    parser.add_argument("--jobs", type=int, default=settings.jobs, help="Worker processes")
    parser.add_argument("--strict", action="store_true", help="Abort on the first errored row")
    if predictions:
        parser.add_argument(
            "--pred-root",
            action="extend",
            nargs="+",
            default=[],
            metavar="NAME=PATH",
            help="Prediction root per method (default: the manifest's predictions block)",
        )
        parser.add_argument(
            "--formats",
            nargs="+",
            choices=REPORT_FORMATS,
            default=list(REPORT_FORMATS),
            help="Report formats to write",
        )


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(prog="camobench", description="Camouflage benchmark toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=settings.log_level, help="Logging level")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-dataset", help="Fixation logs -> delays, ranks and maps")
    _add_common(p)
    p.set_defaults(handler=cmd_build_dataset)

    for name, handler, help_text in (
        ("eval-seg", cmd_eval_seg, "Segmentation metrics (S, F, E, MAE)"),
        ("eval-fix", cmd_eval_fix, "Localization metrics (SIM, CC, EMD, KLD, NSS, AUCs)"),
        ("eval-rank", cmd_eval_rank, "Ranking metrics (MAE, r_MAE, Corr)"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common(p, predictions=True)
        p.set_defaults(handler=handler)

    p = sub.add_parser("attrs", help="Fine-grained attribute flags per instance")
    _add_common(p)
    p.set_defaults(handler=cmd_attrs)

    p = sub.add_parser("report", help="Re-emit a stored report, optionally by attribute")
    p.add_argument("--report", required=True, type=Path, help="Report JSON")
    p.add_argument("--out", type=Path, default=Path(settings.out_dir))
    p.add_argument("--formats", nargs="+", choices=REPORT_FORMATS, default=list(REPORT_FORMATS))
    p.add_argument("--attributes", type=Path, default=None, help="Attribute CSV")
    p.add_argument("--manifest", type=Path, default=None, help="Ranked manifest for the histogram")
    p.add_argument(
        "--display-offset",
        action="store_true",
        help="Shift per-attribute Markdown values into [0.70, 0.80)",
    )
    p.set_defaults(handler=cmd_report)

    p = sub.add_parser("attention", help="Render attention maps")
    p.add_argument("--mode", choices=("reverse", "ranking"), required=True)
    p.add_argument("--seg", type=Path, help="Segmentation map PNG (reverse)")
    p.add_argument("--loc", type=Path, help="Localization map PNG (reverse)")
    p.add_argument("--rank", type=Path, help="Rank map PNG (ranking)")
    p.add_argument("--literal", action="store_true", help="Indicator form of rank attention")
    p.add_argument("--config", type=Path, default=None)
    p.add_argument("--out", type=Path, required=True, help="Output PNG")
    p.set_defaults(handler=cmd_attention)

    p = sub.add_parser("stats", help="Dataset object-size, position and rank statistics")
    p.add_argument("--manifest", required=True, type=Path)
    p.add_argument("--out", type=Path, default=Path(settings.out_dir))
    p.set_defaults(handler=cmd_stats)

    p = sub.add_parser("serve", help="Run the HTTP run service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(handler=cmd_serve)
    return parser


def _exit_code(errors: Sequence[ErrorNote]) -> int:
    if errors:
        logger.warning("%d errored rows", len(errors))
        return EXIT_ROW_ERRORS
    return EXIT_OK


def _print_paths(paths: Sequence[Path]) -> None:
    for path in paths:
        print(path)


# -----------------------------------------------------------------------------
# Handlers
# -----------------------------------------------------------------------------


def cmd_build_dataset(args: argparse.Namespace) -> int:
    config = BenchConfig.load(args.config)
    manifest = DatasetManifest.load(args.manifest)
    result = build_dataset(manifest, config.builder, args.out, jobs=args.jobs)
    if args.strict and result.errors:
        first = result.errors[0]
        raise CamoBenchError(f"{first.operation} failed ({first.kind}): {first.message}", first.path)
    for note in result.errors:
        logger.warning("%s %s: %s (%s)", note.operation, note.image_id, note.kind, note.path)
    logger.info("rank counts: %s", result.rank_counts)
    _print_paths([result.delay_table, result.manifest_path])
    return _exit_code(result.errors)


def _run_eval(
    evaluate: Callable[..., EvaluationReport], args: argparse.Namespace, stem: str
) -> int:
    config = BenchConfig.load(args.config)
    manifest = DatasetManifest.load(args.manifest)
    report = evaluate(
        manifest,
        parse_pred_roots(args.pred_root),
        config,
        seed=args.seed,
        jobs=args.jobs,
        strict=args.strict,
    )
    _print_paths(emit_report(report, args.out, args.formats, stem=stem))
    return _exit_code(report.errors)


def cmd_eval_seg(args: argparse.Namespace) -> int:
    return _run_eval(eval_seg, args, "seg")


def cmd_eval_fix(args: argparse.Namespace) -> int:
    return _run_eval(eval_fix, args, "fix")


def cmd_eval_rank(args: argparse.Namespace) -> int:
    return _run_eval(eval_rank, args, "rank")


def cmd_attrs(args: argparse.Namespace) -> int:
    config = BenchConfig.load(args.config)
    manifest = DatasetManifest.load(args.manifest)
    result = classify_dataset(manifest, config.attributes, jobs=args.jobs)
    if args.strict and result.errors:
        first = result.errors[0]
        raise CamoBenchError(f"{first.operation} failed ({first.kind}): {first.message}", first.path)
    paths = [write_attribute_csv(result.flags, args.out / "attributes.csv")]
    report = attribute_report(manifest, result, config, seed=args.seed)
    paths += emit_report(report, args.out, ("json",), stem="attrs")
    _print_paths(paths)
    return _exit_code(result.errors)


def cmd_report(args: argparse.Namespace) -> int:
    report = EvaluationReport.load(args.report)
    paths = emit_report(report, args.out, args.formats, stem=args.report.stem)
    if args.attributes is not None:
        flags = load_attribute_csv(args.attributes)
        breakdown = attr_breakdown(report, flags)
        for note in breakdown.notes:
            logger.info(note)
        paths += emit_breakdown(breakdown, args.out, display_offset=args.display_offset)
        if args.manifest is not None:
            manifest = DatasetManifest.load(args.manifest)
            ranks = [
                (entry.image_id, str(index), inst.rank)
                for entry in manifest.entries
                for index, inst in enumerate(entry.instances)
            ]
            histogram = rank_histogram(ranks, flags)
            paths.append(write_text(args.out / "rank_histogram.csv", render_rank_histogram_csv(histogram)))
    _print_paths(paths)
    return EXIT_OK


def cmd_attention(args: argparse.Namespace) -> int:
    config = BenchConfig.load(args.config)
    if args.mode == "reverse":
        if args.seg is None or args.loc is None:
            raise InvalidConfig("reverse attention needs --seg and --loc")
        attention = reverse_attention(load_scalar_map(args.seg), load_scalar_map(args.loc))
        mode = "reverse"
    else:
        if args.rank is None:
            raise InvalidConfig("ranking attention needs --rank")
        rank_map = load_rank_map(args.rank)
        literal = args.literal or config.attention.literal
        attention = ranking_attention(rank_map.as_map(), rank_map.foreground(), literal=literal)
        mode = "ranking-literal" if literal else "ranking"
    _print_paths(list(attention_to_png(attention, args.out, mode)))
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    stats = dataset_stats(DatasetManifest.load(args.manifest))
    _print_paths(emit_stats(stats, args.out))
    return _exit_code(stats.errors)


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("api.main:app", host=args.host, port=args.port)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format=LOG_FORMAT, stream=sys.stderr)
    try:
        return args.handler(args)
    except CamoBenchError as e:
        logger.error("%s: %s", e.kind, e)
        return EXIT_FATAL
