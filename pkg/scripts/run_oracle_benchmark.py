#!/usr/bin/env python3
"""Run the bundled task suite against its own reference solutions.

Every task should come back correct, which makes this the fastest way to
check that the local toolchain (g++, OpenMP, optionally MPI) is healthy.
"""

import argparse
import json
import sys
from pathlib import Path

from hpceval.genbench.runner import (
    BenchmarkConfig,
    probe_toolchain,
    run_benchmark,
    score_results,
    write_results_jsonl,
)
from hpceval.genbench.suite import load_suite, reference_solutions
from hpceval.providers import OracleProvider


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=1, help="samples per task")
    ap.add_argument("--baselines", action="store_true", help="also time baselines")
    ap.add_argument("--out", default=None, help="directory for run artifacts")
    args = ap.parse_args()

    tasks = load_suite()
    toolchain = probe_toolchain()
    if toolchain.launcher is None:
        print("note: no MPI launcher found, MPI tasks will be skipped", file=sys.stderr)

    config = BenchmarkConfig(samples_per_task=args.samples)
    output = run_benchmark(
        tasks,
        OracleProvider(reference_solutions(tasks)),
        config,
        toolchain,
        measure_baselines=args.baselines,
    )

    report = score_results(
        output.results,
        ks=(1,),
        baselines=output.baselines or None,
        task_kinds={t.id: t.kind for t in tasks},
    )
    for task_id in sorted(report["per_task"]):
        entry = report["per_task"][task_id]
        speed = f" speedup={entry['speedup']:.2f}" if entry["speedup"] else ""
        print(
            f"{task_id:<16} {entry['kind']:<10} built={entry['built']}/{entry['samples']}"
            f" correct={entry['correct']}/{entry['samples']}{speed}"
        )
    agg = report["aggregate"]
    print(f"\nbuild rate {agg['build_rate']:.3f}, "
          f"average pass@1 {agg['average_pass_at_k']['1']:.3f}")
    for skip in output.skips:
        print(f"skipped {skip['task_id']}: {skip['reason']}", file=sys.stderr)

    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_results_jsonl(out_dir / "run.jsonl", output.results)
        (out_dir / "baselines.json").write_text(
            json.dumps(output.baselines, indent=2, sort_keys=True) + "\n"
        )
        print(f"artifacts in {out_dir}")

    failed = sum(1 for r in output.results if not r.correct)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
