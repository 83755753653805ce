"""Command-line surface: sample, verify, render, stats, score, list.

Exit codes: 0 success, 1 check or score failure, 2 usage error, 3 I/O
or data-access error. Every command is deterministic for fixed flags
and input bytes; no command mutates a dataset it reads.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import analysis, families  # noqa: F401  (import registers the catalog)
from . import render as render_mod
from . import scoring, verify as verify_mod
from .dataset import atomic_write, load_dataset, write_samples
from .errors import (
    BudgetExhausted,
    EngineError,
    MalformedJson,
    MissingManifest,
    OrphanSidecar,
    UnknownGenerator,
)
from .generator import create_task, registry_get, registry_list
from .grid import parse_arc_json

USAGE_EXIT = 2
IO_EXIT = 3


def _cmd_sample(args: argparse.Namespace) -> int:
    if args.generator == "all":
        defs = registry_list()
    else:
        defs = [registry_get(args.generator)]
    out_dir = Path(args.out)
    samples = []
    for defn in defs:
        for seed in range(args.seed, args.seed + args.count):
            try:
                samples.append(create_task(defn, seed))
            except BudgetExhausted as e:
                print(
                    f"error: generator {defn.id} exhausted its retry budget at seed {seed}: {e}",
                    file=sys.stderr,
                )
                return 1
    write_samples(
        out_dir, samples, with_witness=args.with_witness, with_reasoning=args.with_reasoning
    )
    print(f"wrote {len(samples)} samples to {out_dir}")
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    dataset = load_dataset(Path(args.dataset))
    report = verify_mod.verify_dataset(dataset, strict=args.strict)
    path = verify_mod.write_report(dataset.root, report)
    for s in report.samples:
        if not s.passed:
            failed = [c for c in s.checks if c.status == verify_mod.FAIL]
            for c in failed:
                print(f"FAIL {s.stem}: [{c.kind}] {c.name}: {c.detail}")
    print(f"verified {report.total} samples: {report.passed} passed, "
          f"{report.total - report.passed} failed (report: {path})")
    return 0 if report.all_passed else 1


def _cmd_render(args: argparse.Namespace) -> int:
    task_path = Path(args.task)
    episode = parse_arc_json(task_path.read_bytes())
    if args.format == "svg":
        text = render_mod.episode_svg(episode)
    else:
        text = render_mod.episode_ansi(episode)
    atomic_write(Path(args.out), text.encode())
    print(f"rendered {task_path} to {args.out}")
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    dataset = load_dataset(Path(args.dataset))
    heatmap = analysis.size_heatmap(dataset, which=args.which)
    wrote_any = False
    if args.heatmap:
        atomic_write(Path(args.heatmap), heatmap.to_csv().encode())
        wrote_any = True
    if args.features:
        rows = analysis.extract_features(dataset)
        atomic_write(Path(args.features), analysis.features_csv(rows).encode())
        wrote_any = True
    if args.diversity:
        atomic_write(Path(args.diversity), analysis.diversity(dataset).to_json())
        wrote_any = True
    if args.figure:
        analysis.heatmap_figure(heatmap, Path(args.figure), which=args.which)
        wrote_any = True
    print(
        f"scanned {heatmap.total} {args.which}: {heatmap.in_window()} in the "
        f"5..30 window, {heatmap.out_of_window} outside"
    )
    if not wrote_any:
        print("(no output files requested; pass --heatmap/--features/--diversity/--figure)")
    return 0


def _cmd_score(args: argparse.Namespace) -> int:
    dataset = load_dataset(Path(args.dataset))
    predictions = scoring.load_predictions(Path(args.predictions))
    table = scoring.score(
        dataset,
        predictions,
        strict_predictions=args.strict_predictions,
        strict_ids=args.strict_ids,
        max_cells=args.max_cells,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    atomic_write(out_dir / "per_generator.csv", table.to_csv().encode())
    atomic_write(out_dir / "overall.json", table.overall_json())
    for w in table.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(
        f"overall accuracy {table.overall_accuracy:.4f} over {len(table.per_sample)} samples "
        f"(mean per-generator {table.mean_generator_accuracy:.4f})"
    )
    return 0


def _cmd_list(_: argparse.Namespace) -> int:
    from . import __version__
    from .dsl import DSL_VERSION
    from .sampling import PRNG_ALGORITHM

    print(f"engine {__version__} | dsl {DSL_VERSION} | prng {PRNG_ALGORITHM}")
    for defn in registry_list():
        print(f"{defn.id}: {defn.summary}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arcforge",
        description="Sample, verify, render, analyze, and score procedural grid-puzzle datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="generate task samples into a dataset directory")
    p.add_argument("--generator", required=True, help="generator id, or 'all'")
    p.add_argument("--count", required=True, type=int, help="samples per generator (>= 1)")
    p.add_argument("--seed", required=True, type=int, help="first seed; runs seed..seed+count-1")
    p.add_argument("--out", required=True, help="output dataset directory")
    p.add_argument("--with-witness", action="store_true", help="write witness sidecars")
    p.add_argument("--with-reasoning", action="store_true", help="write reasoning sidecars")
    p.set_defaults(fn=_cmd_sample)

    p = sub.add_parser("verify", help="re-check a dataset directory")
    p.add_argument("--dataset", required=True)
    p.add_argument("--strict", action="store_true", help="unintended shortcut flags fail")
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("render", help="render one task file to SVG or ANSI block art")
    p.add_argument("--task", required=True, help="task JSON file")
    p.add_argument("--format", required=True, choices=("svg", "ansi"))
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_render)

    p = sub.add_parser("stats", help="distribution and diversity summaries")
    p.add_argument("--dataset", required=True)
    p.add_argument("--heatmap", help="write the size-histogram CSV here")
    p.add_argument("--features", help="write the per-grid feature CSV here")
    p.add_argument("--diversity", help="write the diversity JSON here")
    p.add_argument("--figure", help="write a size-heatmap image here (PNG etc.)")
    p.add_argument("--which", choices=(analysis.INPUTS, analysis.OUTPUTS),
                   default=analysis.INPUTS, help="which grids to histogram")
    p.set_defaults(fn=_cmd_stats)

    p = sub.add_parser("score", help="exact-match scoring of a prediction file")
    p.add_argument("--dataset", required=True)
    p.add_argument("--predictions", required=True, help="JSON map sample_id -> list of grids")
    p.add_argument("--out", required=True, help="directory for per_generator.csv + overall.json")
    p.add_argument("--strict-predictions", action="store_true",
                   help="missing predictions are errors instead of unsolved")
    p.add_argument("--strict-ids", action="store_true",
                   help="unknown sample ids are errors instead of warnings")
    p.add_argument("--max-cells", type=int, default=None,
                   help="skip episodes with more than this many total cells "
                        "(size proxy only; unrelated to any tokenizer)")
    p.set_defaults(fn=_cmd_score)

    p = sub.add_parser("list", help="list registered generators")
    p.set_defaults(fn=_cmd_list)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "sample":
        if args.count < 1:
            parser.error("--count must be >= 1")
        if args.seed < 0:
            parser.error("--seed must be >= 0")
    try:
        return args.fn(args)
    except UnknownGenerator as e:
        parser.error(str(e))  # exits 2
        return USAGE_EXIT
    except (MissingManifest, MalformedJson) as e:
        print(f"error: {e}", file=sys.stderr)
        return IO_EXIT
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return IO_EXIT
    except OrphanSidecar as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except EngineError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return IO_EXIT


if __name__ == "__main__":
    sys.exit(main())
