"""Render stored run artifacts into CSV tables and a text summary.

Reporting is a pure function of the files in a run directory: nothing is
re-measured, so reporting the same directory twice produces byte-identical
output.  Missing artifacts shrink the report and leave an explicit gap
marker in the summary instead of failing.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from . import perfpairs, pragma
from .genbench.runner import read_results_jsonl, score_results

# artifact names a run directory may contain
RUN_RESULTS = "run.jsonl"
BASELINES = "baselines.json"
MANIFEST = "manifest.json"
PRAGMA_PREDS = "pragma_preds.jsonl"
PERF_PAIRS = "perf_pairs.jsonl"
PERF_PREDS = "perf_preds.txt"

DEFAULT_KS = (1, 10, 100)


@dataclass(frozen=True)
class ReportOutput:
    written: tuple
    gaps: tuple


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _write_csv(path: Path, header, rows) -> Path:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(cell) for cell in row])
    return path


def _genbench_section(run_dir: Path, out_dir: Path, ks, written, gaps, summary):
    results_path = run_dir / RUN_RESULTS
    if not results_path.exists():
        gaps.append(f"gap: {RUN_RESULTS} missing, no benchmark tables")
        return
    results = read_results_jsonl(results_path)
    if not results:
        gaps.append(f"gap: {RUN_RESULTS} is empty, no benchmark tables")
        return

    baselines = None
    baselines_path = run_dir / BASELINES
    if baselines_path.exists():
        baselines = json.loads(baselines_path.read_text(encoding="utf-8"))
    else:
        gaps.append(f"gap: {BASELINES} missing, speedups unavailable")

    task_kinds = None
    manifest_path = run_dir / MANIFEST
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        task_kinds = manifest.get("task_kinds")

    report = score_results(results, ks, baselines=baselines, task_kinds=task_kinds)
    per_task = report["per_task"]

    written.append(
        _write_csv(
            out_dir / "passk.csv",
            ("task", "k", "value"),
            (
                (task, k, per_task[task]["pass_at_k"][str(k)])
                for task in sorted(per_task)
                for k in ks
                if str(k) in per_task[task]["pass_at_k"]
            ),
        )
    )
    build_rows = [(task, per_task[task]["build_rate"]) for task in sorted(per_task)]
    build_rows.append(("ALL", report["aggregate"]["build_rate"]))
    written.append(_write_csv(out_dir / "buildrate.csv", ("task", "build_rate"), build_rows))
    written.append(
        _write_csv(
            out_dir / "speedup.csv",
            ("task", "baseline_s", "median_correct_s", "speedup"),
            (
                (
                    task,
                    per_task[task]["baseline_s"],
                    per_task[task]["median_correct_runtime_s"],
                    per_task[task]["speedup"],
                )
                for task in sorted(per_task)
            ),
        )
    )

    agg = report["aggregate"]
    summary.append(
        f"benchmark: {agg['tasks']} tasks, {agg['samples']} samples, "
        f"build rate {agg['build_rate']:.4f}"
    )
    for k, v in sorted(agg["average_pass_at_k"].items(), key=lambda kv: int(kv[0])):
        summary.append(f"  average pass@{k} = {v:.6f}")
    summary.append(f"  compile flags: {report['flags']}")


def _pragma_section(run_dir: Path, out_dir: Path, written, gaps, summary):
    preds_path = run_dir / PRAGMA_PREDS
    if not preds_path.exists():
        gaps.append(f"gap: {PRAGMA_PREDS} missing, no pragma accuracy")
        return
    rows = pragma.read_predictions(preds_path)
    if not rows:
        gaps.append(f"gap: {PRAGMA_PREDS} is empty, no pragma accuracy")
        return
    preds, unparseable = pragma.evaluate_predictions(rows)
    exact = pragma.score(preds, "exact")
    functional = pragma.score(preds, "functional")
    written.append(
        _write_csv(
            out_dir / "pragma_accuracy.csv",
            ("mode", "accuracy"),
            [("exact", exact), ("functional", functional)],
        )
    )
    summary.append(
        f"pragma: {len(preds)} predictions, exact {exact:.4f}, "
        f"functional {functional:.4f}, {unparseable} unparseable"
    )


def _perf_section(run_dir: Path, out_dir: Path, written, gaps, summary):
    pairs_path = run_dir / PERF_PAIRS
    preds_path = run_dir / PERF_PREDS
    if not pairs_path.exists() or not preds_path.exists():
        gaps.append(
            f"gap: {PERF_PAIRS} and {PERF_PREDS} both required for perf accuracy"
        )
        return
    pairs = perfpairs.read_pairs(pairs_path)
    predicted = perfpairs.read_labels(preds_path)
    truth = [p.label for p in pairs]
    try:
        overall = perfpairs.classification_accuracy(predicted, truth)
    except ValueError as exc:
        gaps.append(f"gap: perf predictions unusable ({exc})")
        return
    rows = [("all", overall)]
    for source in sorted({p.source for p in pairs}):
        idx = [i for i, p in enumerate(pairs) if p.source == source]
        rows.append(
            (
                source,
                perfpairs.classification_accuracy(
                    [predicted[i] for i in idx], [truth[i] for i in idx]
                ),
            )
        )
    written.append(
        _write_csv(out_dir / "perf_accuracy.csv", ("source", "accuracy"), rows)
    )
    summary.append(f"perf pairs: {len(pairs)} pairs, accuracy {overall:.4f}")


def emit_report(run_dir, out_dir=None, ks=DEFAULT_KS) -> ReportOutput:
    """Write CSV tables plus summary.txt for whatever artifacts exist."""
    run_dir = Path(run_dir)
    out_dir = Path(out_dir) if out_dir is not None else run_dir / "report"
    out_dir.mkdir(parents=True, exist_ok=True)

    written: list = []
    gaps: list = []
    summary: list = []

    _genbench_section(run_dir, out_dir, ks, written, gaps, summary)
    _pragma_section(run_dir, out_dir, written, gaps, summary)
    _perf_section(run_dir, out_dir, written, gaps, summary)

    lines = summary + gaps
    summary_path = out_dir / "summary.txt"
    summary_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    written.append(summary_path)
    return ReportOutput(written=tuple(written), gaps=tuple(gaps))
