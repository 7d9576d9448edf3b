"""Unified command line: corpus, genbench, pragma, perfpairs, report.

Every subcommand reads and writes plain JSONL/CSV artifacts so pipelines
can be resumed or inspected at any stage.  Exit codes are categorized:
0 success, 2 configuration problems, 3 missing toolchain, 4 runtime
failures.
"""

from __future__ import annotations

import argparse
import json
import logging
import subprocess
import sys
from pathlib import Path

from . import corpus, perfpairs, pragma
from . import report as report_mod
from .config import ConfigError, config_hash, load_settings, parse_k, settings_dict
from .genbench.runner import (
    BenchmarkConfig,
    probe_toolchain,
    read_results_jsonl,
    run_benchmark,
    score_results,
    write_results_jsonl,
)
from .genbench.suite import load_suite, reference_solutions
from .providers import FileProvider, HttpProvider, OracleProvider

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TOOLCHAIN = 3
EXIT_RUNTIME = 4


class ToolchainError(RuntimeError):
    """A required compiler or launcher is not usable."""


# ---------------------------------------------------------------------------
# corpus


def _cmd_corpus_ingest(args) -> int:
    index = corpus.ingest(args.root)
    corpus.write_index(index, args.out)
    print(f"indexed {len(index.files)} files from {len(args.root)} root(s) -> {args.out}")
    return EXIT_OK


def _cmd_corpus_dedup(args) -> int:
    index = corpus.read_index(args.index)
    deduped = corpus.dedup(index)
    corpus.write_index(deduped, args.out)
    print(f"dedup: {len(index.files)} -> {len(deduped.files)} files "
          f"({len(index.files) - len(deduped.files)} duplicates removed)")
    return EXIT_OK


def _cmd_corpus_filter(args) -> int:
    index = corpus.read_index(args.index)
    kept = corpus.filter_size(index, max_bytes=args.max_bytes, min_tokens=args.min_tokens)
    corpus.write_index(kept, args.out)
    print(f"filter: {len(index.files)} -> {len(kept.files)} files "
          f"(max_bytes={args.max_bytes}, min_tokens={args.min_tokens})")
    return EXIT_OK


def _cmd_corpus_stats(args) -> int:
    index = corpus.read_index(args.index)
    st = corpus.stats(index)
    print(f"{'ext':<6} {'files':>8} {'loc':>12}")
    for ext in sorted(st.files_by_extension):
        print(f"{ext:<6} {st.files_by_extension[ext]:>8} {st.loc_by_extension[ext]:>12}")
    print(f"total: {st.total_files} files, {st.total_loc} loc, {st.total_bytes} bytes")
    return EXIT_OK


def _cmd_corpus_export(args) -> int:
    index = corpus.read_index(args.index)
    corpus.export_training(index, args.out, fmt=args.format)
    print(f"exported {len(index.files)} files as {args.format} -> {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# genbench


def _make_provider(settings, tasks):
    if settings.provider == "oracle":
        return OracleProvider(reference_solutions(tasks))
    if settings.provider == "file":
        if not settings.provider_root:
            raise ConfigError("file provider needs provider_root (--provider-root)")
        return FileProvider(settings.provider_root)
    try:
        return HttpProvider(endpoint=settings.endpoint)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _tool_versions(toolchain) -> dict:
    def first_line(cmd) -> str:
        try:
            out = subprocess.run(
                [cmd, "--version"], capture_output=True, text=True, timeout=10
            ).stdout
            return out.splitlines()[0] if out else "unknown"
        except (OSError, subprocess.TimeoutExpired):
            return "unknown"

    versions = {"cxx": first_line(toolchain.cxx)}
    if toolchain.mpicxx:
        versions["mpicxx"] = first_line(toolchain.mpicxx)
    if toolchain.launcher:
        versions["launcher"] = first_line(toolchain.launcher[0])
    return versions


def _settings_from(args, extra: dict | None = None):
    overrides = dict(extra or {})
    for name in (
        "suite", "provider", "endpoint", "provider_root", "temperature",
        "top_p", "samples", "max_new_tokens", "seed", "workers", "mpi_ranks",
    ):
        if hasattr(args, name):
            overrides.setdefault(name, getattr(args, name))
    return load_settings(args.config, overrides)


def _cmd_genbench_run(args) -> int:
    extra = {"measure_baselines": False} if args.no_baselines else {}
    settings = _settings_from(args, extra)
    tasks = load_suite(settings.suite)
    provider = _make_provider(settings, tasks)
    try:
        toolchain = probe_toolchain(mpi_ranks=settings.mpi_ranks)
    except RuntimeError as exc:
        raise ToolchainError(str(exc)) from exc

    config = BenchmarkConfig(
        samples_per_task=settings.samples,
        temperature=settings.temperature,
        top_p=settings.top_p,
        max_new_tokens=settings.max_new_tokens,
        build_timeout_s=settings.build_timeout_s,
        run_timeout_s=settings.run_timeout_s,
        mpi_ranks=settings.mpi_ranks,
        workers=settings.workers,
    )
    output = run_benchmark(
        tasks, provider, config, toolchain,
        measure_baselines=settings.measure_baselines,
    )

    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_results_jsonl(out_path, output.results)
    run_dir = out_path.parent
    (run_dir / report_mod.BASELINES).write_text(
        json.dumps(output.baselines, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    manifest = {
        "config_hash": config_hash(settings),
        "settings": settings_dict(settings),
        "flags": output.flags,
        "task_kinds": {t.id: t.kind for t in tasks},
        "tool_versions": _tool_versions(toolchain),
        "skips": list(output.skips),
    }
    (run_dir / report_mod.MANIFEST).write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    n_correct = sum(1 for r in output.results if r.correct)
    print(f"ran {len(output.results)} samples over {len(tasks)} tasks: "
          f"{n_correct} correct, {len(output.skips)} task(s) skipped -> {out_path}")
    for skip in output.skips:
        print(f"  skipped {skip['task_id']}: {skip['reason']}", file=sys.stderr)
    return EXIT_OK


def _cmd_genbench_score(args) -> int:
    results = read_results_jsonl(args.run)
    if not results:
        raise ValueError(f"no results in {args.run}")
    ks = parse_k(args.k)
    run_dir = Path(args.run).parent

    baselines = None
    baselines_path = Path(args.baselines) if args.baselines else run_dir / report_mod.BASELINES
    if baselines_path.exists():
        baselines = json.loads(baselines_path.read_text(encoding="utf-8"))

    task_kinds = None
    manifest_path = run_dir / report_mod.MANIFEST
    if manifest_path.exists():
        task_kinds = json.loads(manifest_path.read_text(encoding="utf-8")).get("task_kinds")

    rep = score_results(results, ks, baselines=baselines, task_kinds=task_kinds)
    text = json.dumps(rep, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        print(f"wrote score report -> {args.out}")
    else:
        print(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# pragma


def _cmd_pragma_extract(args) -> int:
    index = corpus.read_index(args.index)
    result = pragma.extract_loops(index)
    pragma.write_dataset(result.samples, args.out)
    print(f"extracted {len(result.samples)} annotated loops from "
          f"{result.files_scanned} files ({result.skipped_regions} regions skipped) "
          f"-> {args.out}")
    return EXIT_OK


def _cmd_pragma_format(args) -> int:
    samples = pragma.read_dataset(args.loops)
    n = pragma.write_training_text(samples, args.out)
    print(f"formatted {n} samples -> {args.out}")
    return EXIT_OK


def _cmd_pragma_score(args) -> int:
    rows = pragma.read_predictions(args.pred)
    preds, unparseable = pragma.evaluate_predictions(rows)
    accuracy = pragma.score(preds, args.mode)
    print(f"{args.mode} accuracy: {accuracy:.6f} "
          f"({len(preds)} predictions, {unparseable} unparseable)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# perfpairs


def _cmd_perfpairs_harvest(args) -> int:
    result = perfpairs.harvest_commits(
        args.repo, args.build, args.run,
        repeats=args.repeats, context_lines=args.context,
    )
    perfpairs.write_runs(result, args.out)
    timed = sum(1 for r in result.runs if r.runtime_seconds is not None)
    print(f"harvested {len(result.runs)} commits ({timed} timed, "
          f"{len(result.skipped)} skipped) -> {args.out}")
    for sha, reason in result.skipped:
        print(f"  skipped {sha[:12]}: {reason}", file=sys.stderr)
    return EXIT_OK


def _cmd_perfpairs_commits(args) -> int:
    runs = perfpairs.read_runs(args.runs)
    pairs = perfpairs.label_commit_pairs(runs, noise_threshold=args.threshold)
    perfpairs.write_pairs(pairs, args.out)
    positive = sum(1 for p in pairs if p.label == perfpairs.POSITIVE)
    print(f"labeled {len(pairs)} commit pairs ({positive} positive) -> {args.out}")
    return EXIT_OK


def _cmd_perfpairs_contest(args) -> int:
    solutions, rejected = perfpairs.read_contest_solutions(args.solutions)
    pairs = perfpairs.build_contest_pairs(
        solutions, gap_ratio=args.gap, seed=args.seed, per_problem=args.budget
    )
    perfpairs.write_pairs(pairs, args.out)
    print(f"built {len(pairs)} contest pairs from {len(solutions)} solutions "
          f"({rejected} non-correct rejected) -> {args.out}")
    return EXIT_OK


def _cmd_perfpairs_split(args) -> int:
    pairs = perfpairs.read_pairs(args.pairs)
    train, evaluation = perfpairs.split_train_eval(pairs, args.fraction, args.seed)
    perfpairs.write_pairs(train, args.train)
    perfpairs.write_pairs(evaluation, args.eval)
    print(f"split {len(pairs)} pairs -> {len(train)} train / {len(evaluation)} eval")
    return EXIT_OK


def _cmd_perfpairs_score(args) -> int:
    predicted = perfpairs.read_labels(args.pred)
    pairs = perfpairs.read_pairs(args.data)
    accuracy = perfpairs.classification_accuracy(predicted, [p.label for p in pairs])
    print(f"classification accuracy: {accuracy:.6f} ({len(pairs)} pairs)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# report


def _cmd_report(args) -> int:
    out = report_mod.emit_report(args.run_dir, args.out, ks=parse_k(args.k))
    for path in out.written:
        print(f"wrote {path}")
    for gap in out.gaps:
        print(gap, file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hpceval",
        description="HPC code model evaluation: corpus, benchmarks, pragmas, perf pairs.",
    )
    parser.add_argument("--config", help="TOML or JSON settings file")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    top = parser.add_subparsers(dest="command", required=True)

    # corpus
    corpus_p = top.add_parser("corpus", help="source corpus pipeline")
    corpus_sub = corpus_p.add_subparsers(dest="subcommand", required=True)
    p = corpus_sub.add_parser("ingest", help="walk source trees into an index")
    p.add_argument("--root", action="append", required=True, help="tree to walk (repeatable)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_corpus_ingest)
    p = corpus_sub.add_parser("dedup", help="drop byte-identical duplicates")
    p.add_argument("--index", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_corpus_dedup)
    p = corpus_sub.add_parser("filter", help="drop oversized and near-empty files")
    p.add_argument("--index", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--max-bytes", type=int, default=corpus.MAX_FILE_BYTES)
    p.add_argument("--min-tokens", type=int, default=corpus.MIN_FILE_TOKENS)
    p.set_defaults(func=_cmd_corpus_filter)
    p = corpus_sub.add_parser("stats", help="per-extension file and line counts")
    p.add_argument("--index", required=True)
    p.set_defaults(func=_cmd_corpus_stats)
    p = corpus_sub.add_parser("export", help="write training text")
    p.add_argument("--index", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("plain", "plain-concat", "jsonl"), default="jsonl")
    p.set_defaults(func=_cmd_corpus_export)

    # genbench
    gen_p = top.add_parser("genbench", help="generation benchmark")
    gen_sub = gen_p.add_subparsers(dest="subcommand", required=True)
    p = gen_sub.add_parser("run", help="sample completions, build, run, judge")
    p.add_argument("--suite", help="suite JSON (default: bundled tasks)")
    p.add_argument("--provider", choices=("file", "http", "oracle"))
    p.add_argument("--provider-root", dest="provider_root", help="file provider sample dir")
    p.add_argument("--endpoint", help="http provider URL")
    p.add_argument("--temperature", type=float)
    p.add_argument("--top-p", dest="top_p", type=float)
    p.add_argument("--samples", type=int, help="completions per task")
    p.add_argument("--max-new-tokens", dest="max_new_tokens", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--mpi-ranks", dest="mpi_ranks", type=int)
    p.add_argument("--no-baselines", action="store_true", help="skip baseline timing")
    p.add_argument("--out", required=True, help="results JSONL path")
    p.set_defaults(func=_cmd_genbench_run)
    p = gen_sub.add_parser("score", help="aggregate a results file")
    p.add_argument("--run", required=True, help="results JSONL from genbench run")
    p.add_argument("--k", default="1,10,100", help="comma-separated k values")
    p.add_argument("--baselines", help="baseline timings JSON")
    p.add_argument("--out", help="write report JSON here instead of stdout")
    p.set_defaults(func=_cmd_genbench_score)

    # pragma
    pragma_p = top.add_parser("pragma", help="annotated-loop dataset and scoring")
    pragma_sub = pragma_p.add_subparsers(dest="subcommand", required=True)
    p = pragma_sub.add_parser("extract", help="mine annotated loops from a corpus")
    p.add_argument("--index", required=True, help="corpus index JSONL")
    p.add_argument("--out", required=True, help="loops dataset JSONL")
    p.set_defaults(func=_cmd_pragma_extract)
    p = pragma_sub.add_parser("format", help="emit separator-token training text")
    p.add_argument("--loops", required=True, help="loops dataset JSONL")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_pragma_format)
    p = pragma_sub.add_parser("score", help="score pragma predictions")
    p.add_argument("--pred", required=True, help="predictions JSONL (id, predicted, reference)")
    p.add_argument("--mode", choices=("exact", "functional"), required=True)
    p.set_defaults(func=_cmd_pragma_score)

    # perfpairs
    perf_p = top.add_parser("perfpairs", help="performance pair datasets")
    perf_sub = perf_p.add_subparsers(dest="subcommand", required=True)
    p = perf_sub.add_parser("harvest", help="build and time every commit")
    p.add_argument("--repo", required=True)
    p.add_argument("--build", required=True, help="shell build command")
    p.add_argument("--run", required=True, help="shell run command")
    p.add_argument("--repeats", type=int, default=perfpairs.DEFAULT_REPEATS)
    p.add_argument("--context", type=int, default=perfpairs.DEFAULT_REGION_CONTEXT,
                   help="diff context lines around changed hunks")
    p.add_argument("--out", required=True, help="commit runs JSONL")
    p.set_defaults(func=_cmd_perfpairs_harvest)
    p = perf_sub.add_parser("commits", help="label adjacent commit pairs")
    p.add_argument("--runs", required=True, help="harvested runs JSONL")
    p.add_argument("--threshold", type=float, default=perfpairs.DEFAULT_NOISE_THRESHOLD)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_perfpairs_commits)
    p = perf_sub.add_parser("contest", help="pair contest solutions by runtime gap")
    p.add_argument("--solutions", required=True, help="solutions JSONL")
    p.add_argument("--gap", type=float, default=perfpairs.DEFAULT_GAP_RATIO)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, help="max pairs per problem")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_perfpairs_contest)
    p = perf_sub.add_parser("split", help="deterministic train/eval split")
    p.add_argument("--pairs", required=True)
    p.add_argument("--fraction", type=float, default=0.9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train", required=True)
    p.add_argument("--eval", required=True)
    p.set_defaults(func=_cmd_perfpairs_split)
    p = perf_sub.add_parser("score", help="accuracy of predicted labels")
    p.add_argument("--pred", required=True, help="one label per line")
    p.add_argument("--data", required=True, help="pairs dataset JSONL")
    p.set_defaults(func=_cmd_perfpairs_score)

    # report
    p = top.add_parser("report", help="render CSV tables from run artifacts")
    p.add_argument("run_dir", help="directory with run artifacts")
    p.add_argument("--out", help="report output directory (default: <run_dir>/report)")
    p.add_argument("--k", default="1,10,100")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ToolchainError as exc:
        print(f"toolchain error: {exc}", file=sys.stderr)
        return EXIT_TOOLCHAIN
    except KeyboardInterrupt:
        raise
    except Exception as exc:
        log.debug("unhandled failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
