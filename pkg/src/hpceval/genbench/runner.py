"""Sandboxed compile-and-run pipeline for benchmark samples.

Each candidate is spliced into its task's driver, compiled with the fixed
flag set, and executed in a fresh temp directory under resource limits.
The driver reports raw facts (values correct, threads seen, communication
calls, kernel time) on a magic-prefixed stdout line; the gating policy
that turns those facts into a verdict lives here, in judge_result.
"""

from __future__ import annotations

import json
import logging
import os
import re
import resource
import shutil
import signal
import statistics
import subprocess
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources as importlib_resources
from pathlib import Path
from typing import Iterable, Sequence

from ..providers import Completion, CompletionError, CompletionRequest, Provider, truncate_completion
from .metrics import MetricSample, average_pass_at_k, pass_at_k, speedup as speedup_ratio
from .suite import GenTask

logger = logging.getLogger(__name__)

COMPILE_FLAGS = ("-O2", "-std=c++17", "-fopenmp")

RESULT_PREFIX = "HPC_RESULT "

_OMP_PRAGMA_RE = re.compile(r"#\s*pragma\s+omp")

_DIAG_LIMIT = 8192


# ---------------------------------------------------------------------------
# toolchain discovery
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Toolchain:
    cxx: str
    mpicxx: str | None = None
    launcher: tuple[str, ...] | None = None
    flags: tuple[str, ...] = COMPILE_FLAGS

    @property
    def has_mpi(self) -> bool:
        return self.mpicxx is not None and self.launcher is not None


def probe_toolchain(mpi_ranks: int = 4) -> Toolchain:
    """Locate compilers and an MPI launcher; hard error without g++.

    With Open MPI the launcher gets --allow-run-as-root under uid 0 and
    --oversubscribe when the machine has fewer cores than ranks, since
    both setups otherwise refuse to start.
    """
    cxx = shutil.which("g++")
    if cxx is None:
        raise RuntimeError("g++ not found on PATH; cannot build benchmark samples")
    mpicxx = shutil.which("mpicxx")
    mpirun = shutil.which("mpirun")
    launcher: tuple[str, ...] | None = None
    if mpicxx and mpirun:
        extra: list[str] = []
        try:
            version = subprocess.run(
                [mpirun, "--version"], capture_output=True, text=True, timeout=10
            ).stdout
        except (OSError, subprocess.TimeoutExpired):
            version = ""
        if "Open MPI" in version or "OpenRTE" in version:
            if hasattr(os, "geteuid") and os.geteuid() == 0:
                extra.append("--allow-run-as-root")
            if (os.cpu_count() or 1) < mpi_ranks:
                extra.append("--oversubscribe")
        launcher = (mpirun, *extra, "-n", str(mpi_ranks))
    return Toolchain(cxx=cxx, mpicxx=mpicxx, launcher=launcher)


# ---------------------------------------------------------------------------
# configuration and result records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BenchmarkConfig:
    samples_per_task: int = 100
    temperature: float = 0.2
    top_p: float = 0.93
    max_new_tokens: int = 512
    build_timeout_s: float = 60.0
    run_timeout_s: float = 30.0
    mpi_ranks: int = 4
    workers: int | None = None
    address_space_mb: int = 2048
    file_size_mb: int = 256
    baseline_repeats: int = 3
    scratch_dir: str | None = None


@dataclass(frozen=True)
class BuildResult:
    ok: bool
    diagnostics: str
    binary: str | None = None


@dataclass(frozen=True)
class SampleResult:
    task_id: str
    sample_index: int
    built: bool
    correct: bool
    used_framework: bool
    runtime_seconds: float | None
    diagnostics: str

    def __post_init__(self) -> None:
        if self.correct and not self.built:
            raise ValueError("correct sample cannot be unbuilt")


def sample_result_to_dict(r: SampleResult) -> dict:
    return {
        "task_id": r.task_id,
        "sample_index": r.sample_index,
        "built": r.built,
        "correct": r.correct,
        "used_framework": r.used_framework,
        "runtime_seconds": r.runtime_seconds,
        "diagnostics": r.diagnostics,
    }


def sample_result_from_dict(d: dict) -> SampleResult:
    return SampleResult(
        task_id=d["task_id"],
        sample_index=d["sample_index"],
        built=d["built"],
        correct=d["correct"],
        used_framework=d["used_framework"],
        runtime_seconds=d["runtime_seconds"],
        diagnostics=d.get("diagnostics", ""),
    )


def write_results_jsonl(path: str | Path, results: Iterable[SampleResult]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in results:
            fh.write(json.dumps(sample_result_to_dict(r), sort_keys=True) + "\n")


def read_results_jsonl(path: str | Path) -> list[SampleResult]:
    out: list[SampleResult] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(sample_result_from_dict(json.loads(line)))
    return out


# ---------------------------------------------------------------------------
# sandboxed subprocess execution
# ---------------------------------------------------------------------------

def _make_preexec(address_space_mb: int, file_size_mb: int):
    def preexec() -> None:
        limit = address_space_mb * 1024 * 1024
        resource.setrlimit(resource.RLIMIT_AS, (limit, limit))
        fsize = file_size_mb * 1024 * 1024
        resource.setrlimit(resource.RLIMIT_FSIZE, (fsize, fsize))
        resource.setrlimit(resource.RLIMIT_CORE, (0, 0))

    return preexec


def _run_limited(
    cmd: Sequence[str],
    cwd: str,
    timeout_s: float,
    config: BenchmarkConfig,
) -> tuple[int | None, str]:
    """Run a command in its own session with rlimits; kill the whole
    process group on timeout.  Returns (returncode or None, output)."""
    proc = subprocess.Popen(
        list(cmd),
        cwd=cwd,
        stdout=subprocess.PIPE,
        stderr=subprocess.STDOUT,
        text=True,
        start_new_session=True,
        preexec_fn=_make_preexec(config.address_space_mb, config.file_size_mb),
    )
    try:
        out, _ = proc.communicate(timeout=timeout_s)
        return proc.returncode, out or ""
    except subprocess.TimeoutExpired:
        try:
            os.killpg(proc.pid, signal.SIGKILL)
        except ProcessLookupError:
            pass
        out, _ = proc.communicate()
        return None, (out or "") + f"\n[killed after {timeout_s:.0f}s timeout]"


# ---------------------------------------------------------------------------
# build and run
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1)
def _harness_headers() -> dict[str, str]:
    data = importlib_resources.files("hpceval.genbench") / "suite_data"
    return {
        "hpc_harness.h": (data / "hpc_harness.h").read_text(encoding="utf-8"),
        "hpc_mpi_shim.h": (data / "hpc_mpi_shim.h").read_text(encoding="utf-8"),
    }


def build(
    candidate: str,
    task: GenTask,
    toolchain: Toolchain,
    workdir: str | Path,
    config: BenchmarkConfig,
) -> BuildResult:
    """Write the assembled translation unit into workdir and compile it."""
    workdir = Path(workdir)
    for name, text in _harness_headers().items():
        (workdir / name).write_text(text, encoding="utf-8")
    tu = workdir / "candidate.cpp"
    tu.write_text(task.assemble(candidate), encoding="utf-8")

    if task.kind == "mpi":
        if toolchain.mpicxx is None:
            raise RuntimeError("MPI compiler wrapper unavailable")
        compiler = toolchain.mpicxx
    else:
        compiler = toolchain.cxx
    binary = workdir / "candidate.bin"
    cmd = [
        compiler,
        *toolchain.flags,
        f"-DHPC_TOL={task.tolerance:g}",
        "-I",
        str(workdir),
        str(tu),
        "-o",
        str(binary),
    ]
    code, output = _run_limited(cmd, str(workdir), config.build_timeout_s, config)
    if code != 0:
        return BuildResult(ok=False, diagnostics=output[:_DIAG_LIMIT])
    return BuildResult(ok=True, diagnostics="", binary=str(binary))


@dataclass(frozen=True)
class DriverReport:
    values_ok: bool
    threads: int
    comm_calls: int
    kernel_seconds: float


def _parse_driver_output(output: str) -> DriverReport | None:
    """Pull the last magic result line out of (possibly noisy) stdout."""
    line = None
    for candidate_line in output.splitlines():
        stripped = candidate_line.strip()
        if stripped.startswith(RESULT_PREFIX):
            line = stripped
    if line is None:
        return None
    try:
        payload = json.loads(line[len(RESULT_PREFIX):])
        return DriverReport(
            values_ok=bool(payload["values_ok"]),
            threads=int(payload["threads"]),
            comm_calls=int(payload["comm_calls"]),
            kernel_seconds=float(payload["kernel_seconds"]),
        )
    except (json.JSONDecodeError, KeyError, TypeError, ValueError):
        return None


def run_driver(
    binary: str,
    task: GenTask,
    toolchain: Toolchain,
    config: BenchmarkConfig,
) -> tuple[DriverReport | None, str]:
    """Execute a built driver and parse its report; None means failure."""
    if task.kind == "mpi":
        if toolchain.launcher is None:
            raise RuntimeError("MPI launcher unavailable")
        cmd = [*toolchain.launcher, binary]
    else:
        cmd = [binary]
    code, output = _run_limited(
        cmd, str(Path(binary).parent), config.run_timeout_s, config
    )
    if code != 0:
        return None, output[:_DIAG_LIMIT]
    report = _parse_driver_output(output)
    if report is None:
        return None, ("no result line in driver output\n" + output)[:_DIAG_LIMIT]
    return report, ""


def uses_omp_pragma(source: str) -> bool:
    return _OMP_PRAGMA_RE.search(source) is not None


def judge_result(
    task: GenTask,
    candidate: str,
    report: DriverReport,
) -> tuple[bool, bool]:
    """Apply the framework-usage policy: returns (correct, used_framework).

    OpenMP tasks need a pragma in the source and more than one thread
    observed at runtime; MPI tasks need at least one recorded
    communication call; sequential tasks are judged on values alone.
    """
    if task.kind == "openmp":
        used = uses_omp_pragma(candidate) and report.threads > 1
        return report.values_ok and used, used
    if task.kind == "mpi":
        used = report.comm_calls >= 1
        return report.values_ok and used, used
    return report.values_ok, False


def run_sample(
    completion_text: str,
    task: GenTask,
    toolchain: Toolchain,
    config: BenchmarkConfig,
    sample_index: int = 0,
) -> SampleResult:
    """Truncate, build, run, and judge one completion."""
    candidate, terminated = truncate_completion(completion_text, task.prompt)
    notes: list[str] = []
    if not terminated:
        notes.append("completion never closed the function body")

    workdir = tempfile.mkdtemp(prefix=f"hpc-{task.id}-", dir=config.scratch_dir)
    try:
        built = build(candidate, task, toolchain, workdir, config)
        if not built.ok:
            notes.append(built.diagnostics)
            return SampleResult(
                task_id=task.id,
                sample_index=sample_index,
                built=False,
                correct=False,
                used_framework=False,
                runtime_seconds=None,
                diagnostics="\n".join(notes)[:_DIAG_LIMIT],
            )
        report, run_diag = run_driver(built.binary, task, toolchain, config)
        if report is None:
            notes.append(run_diag)
            return SampleResult(
                task_id=task.id,
                sample_index=sample_index,
                built=True,
                correct=False,
                used_framework=False,
                runtime_seconds=None,
                diagnostics="\n".join(notes)[:_DIAG_LIMIT],
            )
        correct, used_framework = judge_result(task, candidate, report)
        if report.values_ok and not correct:
            notes.append("values correct but required framework unused")
        return SampleResult(
            task_id=task.id,
            sample_index=sample_index,
            built=True,
            correct=correct,
            used_framework=used_framework,
            runtime_seconds=report.kernel_seconds,
            diagnostics="\n".join(notes)[:_DIAG_LIMIT],
        )
    finally:
        shutil.rmtree(workdir, ignore_errors=True)


def measure_baseline(
    task: GenTask,
    toolchain: Toolchain,
    config: BenchmarkConfig,
) -> float | None:
    """Median kernel time of the task's hand-written sequential body."""
    if task.baseline is None:
        return None
    workdir = tempfile.mkdtemp(prefix=f"hpc-base-{task.id}-", dir=config.scratch_dir)
    try:
        built = build(task.baseline, task, toolchain, workdir, config)
        if not built.ok:
            raise RuntimeError(
                f"baseline for {task.id} failed to build:\n{built.diagnostics}"
            )
        times: list[float] = []
        for _ in range(max(1, config.baseline_repeats)):
            report, diag = run_driver(built.binary, task, toolchain, config)
            if report is None:
                raise RuntimeError(f"baseline for {task.id} failed to run:\n{diag}")
            if not report.values_ok:
                raise RuntimeError(f"baseline for {task.id} computed wrong values")
            times.append(report.kernel_seconds)
        return statistics.median(times)
    finally:
        shutil.rmtree(workdir, ignore_errors=True)


# ---------------------------------------------------------------------------
# full-run orchestration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunOutput:
    results: tuple[SampleResult, ...]
    baselines: dict[str, float]
    skips: tuple[dict, ...]
    flags: str


def _pool_size(kind: str, config: BenchmarkConfig) -> int:
    if config.workers is not None:
        capped = config.workers
    else:
        capped = os.cpu_count() or 1
    if kind == "mpi":
        return 1
    if kind == "openmp":
        return max(1, (os.cpu_count() or 1) // 4)
    return max(1, capped)


def run_benchmark(
    tasks: Sequence[GenTask],
    provider: Provider,
    config: BenchmarkConfig,
    toolchain: Toolchain | None = None,
    measure_baselines: bool = True,
) -> RunOutput:
    """Generate, build, run, and judge every sample for every task.

    Results come back in (task order, sample index) order regardless of
    worker scheduling.  MPI tasks without a launcher are recorded as
    skips rather than failures.
    """
    tc = toolchain or probe_toolchain(mpi_ranks=config.mpi_ranks)
    results: list[SampleResult] = []
    baselines: dict[str, float] = {}
    skips: list[dict] = []

    for task in tasks:
        if task.kind == "mpi" and not tc.has_mpi:
            skips.append({"task_id": task.id, "reason": "no MPI toolchain/launcher"})
            continue

        req = CompletionRequest(
            prompt=task.prompt,
            n=config.samples_per_task,
            max_new_tokens=config.max_new_tokens,
            temperature=config.temperature,
            top_p=config.top_p,
        )
        completions = provider.complete(req, task.id)
        if len(completions) != req.n:
            raise RuntimeError(
                f"provider returned {len(completions)} results for {task.id}, expected {req.n}"
            )

        if measure_baselines and task.baseline is not None:
            baselines[task.id] = measure_baseline(task, tc, config)

        with ThreadPoolExecutor(max_workers=_pool_size(task.kind, config)) as pool:
            futures = []
            for item in completions:
                if isinstance(item, CompletionError):
                    futures.append((item, None))
                    continue
                futures.append(
                    (
                        item,
                        pool.submit(
                            run_sample, item.text, task, tc, config, item.index
                        ),
                    )
                )
            for item, fut in futures:
                if fut is None:
                    results.append(
                        SampleResult(
                            task_id=task.id,
                            sample_index=item.index,
                            built=False,
                            correct=False,
                            used_framework=False,
                            runtime_seconds=None,
                            diagnostics=f"provider error: {item.message}",
                        )
                    )
                else:
                    results.append(fut.result())

    return RunOutput(
        results=tuple(results),
        baselines=baselines,
        skips=tuple(skips),
        flags=" ".join(tc.flags),
    )


# ---------------------------------------------------------------------------
# scoring
# ---------------------------------------------------------------------------

def score_results(
    results: Sequence[SampleResult],
    ks: Sequence[int],
    baselines: dict[str, float] | None = None,
    task_kinds: dict[str, str] | None = None,
) -> dict:
    """Aggregate stored results into the per-task and overall report."""
    if not results:
        raise ValueError("no results to score")
    baselines = baselines or {}
    by_task: dict[str, list[SampleResult]] = {}
    for r in results:
        by_task.setdefault(r.task_id, []).append(r)

    per_task: dict[str, dict] = {}
    metric_samples: list[MetricSample] = []
    for task_id in sorted(by_task):
        rs = by_task[task_id]
        n = len(rs)
        built = sum(1 for r in rs if r.built)
        correct = sum(1 for r in rs if r.correct)
        metric_samples.append(MetricSample(n_samples=n, n_correct=correct))
        correct_times = [
            r.runtime_seconds
            for r in rs
            if r.correct and r.runtime_seconds is not None and r.runtime_seconds > 0
        ]
        median_runtime = statistics.median(correct_times) if correct_times else None
        baseline_s = baselines.get(task_id)
        entry: dict = {
            "samples": n,
            "built": built,
            "correct": correct,
            "build_rate": built / n,
            "pass_at_k": {
                str(k): pass_at_k(n, correct, k) for k in ks if 1 <= k <= n
            },
            "median_correct_runtime_s": median_runtime,
            "baseline_s": baseline_s,
            "speedup": speedup_ratio(baseline_s, median_runtime),
        }
        if task_kinds and task_id in task_kinds:
            entry["kind"] = task_kinds[task_id]
        per_task[task_id] = entry

    min_n = min(len(v) for v in by_task.values())
    total = len(results)
    report = {
        "flags": " ".join(COMPILE_FLAGS),
        "k": [k for k in ks if 1 <= k <= min_n],
        "per_task": per_task,
        "aggregate": {
            "tasks": len(by_task),
            "samples": total,
            "build_rate": sum(1 for r in results if r.built) / total,
            "average_pass_at_k": {
                str(k): average_pass_at_k(metric_samples, k)
                for k in ks
                if 1 <= k <= min_n
            },
        },
    }
    return report
