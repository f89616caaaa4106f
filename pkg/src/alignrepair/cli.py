"""Command-line surface: repair, check, fragments, conflicts, eval, gen.

Reports are JSON objects with stable key order so that repeated runs
with the same inputs are byte-identical.  Phase wall times go to stderr
only; they never enter report files.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .conflicts import (
    conflict_statistics,
    count_incoherent_classes,
    find_conflict_sets,
)
from .formats import (
    FormatError,
    parse_alignment_tsv,
    parse_ontology_file,
    write_alignment_tsv,
    write_ontology_file,
)
from .fragments import compute_checkset, extract_core_fragments
from .generator import GeneratorError, GeneratorParams, generate_instance
from .model import ModelError, merged_view
from .oracle import precision_recall_fmeasure
from .repair import RemovalCause, RepairConfig, repair

SCHEMA_VERSION = 1


class _Timer:
    def __init__(self) -> None:
        self.phases: list[tuple[str, float]] = []
        self._last = time.perf_counter()

    def mark(self, name: str) -> None:
        now = time.perf_counter()
        self.phases.append((name, now - self._last))
        self._last = now

    def report(self) -> None:
        for name, seconds in self.phases:
            print(f"{name}: {seconds:.3f}s", file=sys.stderr)


def _pct(part: int, total: int) -> float:
    return round(100.0 * part / total, 1) if total else 0.0


def _load_inputs(args):
    o1 = parse_ontology_file(Path(args.onto1).read_text(encoding="utf-8"), side=1)
    o2 = parse_ontology_file(Path(args.onto2).read_text(encoding="utf-8"), side=2)
    align = parse_alignment_tsv(Path(args.align).read_text(encoding="utf-8"))
    return o1, o2, align


def _input_section(o1, o2, align) -> dict:
    return {
        "classes_side1": len(o1),
        "classes_side2": len(o2),
        "mappings": len(align),
        "disjoint_pairs": len(o1.disjointness) + len(o2.disjointness),
    }


def _fragment_section(o1, o2, fragments, checkset) -> dict:
    total = len(o1) + len(o2)
    return {
        "total_classes": total,
        "core_classes": len(fragments.core_classes),
        "core_pct": _pct(len(fragments.core_classes), total),
        "checkset": len(checkset),
        "checkset_pct": _pct(len(checkset), total),
    }


def _emit(report: dict, path: str | None) -> None:
    text = json.dumps(report, indent=2) + "\n"
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _cmd_repair(args) -> int:
    timer = _Timer()
    o1, o2, align = _load_inputs(args)
    timer.mark("load")
    view = merged_view(o1, o2, align)
    incoherent_before, _ = count_incoherent_classes(view)
    timer.mark("merge")
    fragments = extract_core_fragments(o1, o2, align, view=view)
    checkset = compute_checkset(view)
    timer.mark("fragments")
    conflicts = find_conflict_sets(fragments, checkset, align)
    timer.mark("conflicts")
    config = RepairConfig(
        epsilon=args.epsilon,
        search_depth=args.search_depth,
        use_clusters=not args.no_clusters,
    )
    result = repair(conflicts, align, config)
    timer.mark("repair")
    incoherent_after, _ = count_incoherent_classes(merged_view(o1, o2, result.kept))
    timer.mark("verify")

    Path(args.out).write_text(write_alignment_tsv(result.kept), encoding="utf-8")
    filtered = sum(1 for r in result.removed if r.cause is RemovalCause.FILTERED)
    report = {
        "schema_version": SCHEMA_VERSION,
        "task": "repair",
        "inputs": _input_section(o1, o2, align),
        "fragments": _fragment_section(o1, o2, fragments, checkset),
        "conflicts": conflict_statistics(conflicts),
        "repair": {
            "removed": len(result.removed),
            "removed_filtered": filtered,
            "removed_greedy": len(result.removed) - filtered,
            "kept": len(result.kept),
            "clusters_processed": result.stats.clusters_processed,
            "lookahead_tiebreaks": result.stats.lookahead_tiebreaks,
        },
        "incoherent": {"before": incoherent_before, "after": incoherent_after},
        "config": {
            "epsilon": config.epsilon,
            "search_depth": config.search_depth,
            "use_clusters": config.use_clusters,
        },
    }
    if args.report:
        _emit(report, args.report)
    _emit(report, None)
    timer.report()
    return 0


def _cmd_check(args) -> int:
    o1, o2, align = _load_inputs(args)
    count, classes = count_incoherent_classes(merged_view(o1, o2, align))
    print(count)
    for c in classes:
        print(c.id)
    return 0


def _cmd_fragments(args) -> int:
    o1, o2, align = _load_inputs(args)
    view = merged_view(o1, o2, align)
    fragments = extract_core_fragments(o1, o2, align, view=view)
    checkset = compute_checkset(view)
    report = {
        "schema_version": SCHEMA_VERSION,
        "task": "fragments",
        "inputs": _input_section(o1, o2, align),
        "fragments": _fragment_section(o1, o2, fragments, checkset),
    }
    _emit(report, None)
    return 0


def _cmd_conflicts(args) -> int:
    o1, o2, align = _load_inputs(args)
    view = merged_view(o1, o2, align)
    fragments = extract_core_fragments(o1, o2, align, view=view)
    checkset = compute_checkset(view)
    conflicts = find_conflict_sets(fragments, checkset, align)
    report = {
        "schema_version": SCHEMA_VERSION,
        "task": "conflicts",
        "inputs": _input_section(o1, o2, align),
        "conflicts": conflict_statistics(conflicts),
    }
    _emit(report, None)
    return 0


def _cmd_eval(args) -> int:
    produced = parse_alignment_tsv(Path(args.produced).read_text(encoding="utf-8"))
    reference = parse_alignment_tsv(Path(args.reference).read_text(encoding="utf-8"))
    ev = precision_recall_fmeasure(produced, reference)
    report = {
        "schema_version": SCHEMA_VERSION,
        "task": "eval",
        "produced_mappings": len(produced),
        "reference_mappings": len(reference),
        "precision": round(ev.precision, 6),
        "recall": round(ev.recall, 6),
        "f_measure": round(ev.f_measure, 6),
    }
    _emit(report, None)
    return 0


def _cmd_gen(args) -> int:
    params = GeneratorParams(
        classes_per_side=args.classes,
        mapping_count=args.mappings,
        disjoint_pairs=args.disjoints,
        noise_rate=args.noise,
        seed=args.seed,
        max_depth=args.max_depth,
        branching=args.branching,
    )
    o1, o2, produced, reference = generate_instance(params)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "onto1.txt").write_text(write_ontology_file(o1), encoding="utf-8")
    (out / "onto2.txt").write_text(write_ontology_file(o2), encoding="utf-8")
    (out / "produced.tsv").write_text(write_alignment_tsv(produced), encoding="utf-8")
    (out / "reference.tsv").write_text(write_alignment_tsv(reference), encoding="utf-8")
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "task": "gen",
        "params": {
            "classes_per_side": params.classes_per_side,
            "mapping_count": params.mapping_count,
            "disjoint_pairs": params.disjoint_pairs,
            "noise_rate": params.noise_rate,
            "seed": params.seed,
            "max_depth": params.max_depth,
            "branching": params.branching,
        },
        "files": ["onto1.txt", "onto2.txt", "produced.tsv", "reference.tsv"],
    }
    (out / "params.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )
    print(f"wrote instance to {out}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alignrepair",
        description="Detect and repair disjointness-driven incoherence "
        "in ontology alignments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_inputs(p):
        p.add_argument("--onto1", required=True, help="side-1 ontology file")
        p.add_argument("--onto2", required=True, help="side-2 ontology file")
        p.add_argument("--align", required=True, help="alignment TSV file")

    p = sub.add_parser("repair", help="repair an alignment")
    add_inputs(p)
    p.add_argument("--epsilon", type=float, default=-1.0,
                   help="confidence interval; negative disables filtering")
    p.add_argument("--search-depth", type=int, default=2,
                   help="tie-breaking lookahead depth")
    p.add_argument("--no-clusters", action="store_true",
                   help="process all conflict sets as one list")
    p.add_argument("--out", required=True, help="repaired alignment output")
    p.add_argument("--report", help="also write the JSON report to this file")
    p.set_defaults(func=_cmd_repair)

    p = sub.add_parser("check", help="count incoherent classes")
    add_inputs(p)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("fragments", help="core fragment statistics")
    add_inputs(p)
    p.set_defaults(func=_cmd_fragments)

    p = sub.add_parser("conflicts", help="conflict set statistics")
    add_inputs(p)
    p.set_defaults(func=_cmd_conflicts)

    p = sub.add_parser("eval", help="precision/recall against a reference")
    p.add_argument("--produced", required=True)
    p.add_argument("--reference", required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("gen", help="generate a synthetic instance")
    p.add_argument("--classes", type=int, default=60)
    p.add_argument("--mappings", type=int, default=15)
    p.add_argument("--disjoints", type=int, default=4)
    p.add_argument("--noise", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--max-depth", type=int, default=10)
    p.add_argument("--branching", type=float, default=2.0)
    p.set_defaults(func=_cmd_gen)

    return parser


def cli_dispatch(argv: list[str]) -> int:
    """Run one CLI invocation; returns the process exit status."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (FormatError, ModelError, GeneratorError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> int:
    return cli_dispatch(sys.argv[1:])


if __name__ == "__main__":
    raise SystemExit(main())
