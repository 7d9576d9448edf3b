"""Code-generation benchmark: task suite, sandboxed build/run, metrics."""

from .metrics import (
    MetricSample,
    average_pass_at_k,
    build_rate,
    pass_at_k,
    speedup,
    sweep_and_select,
)
from .suite import GenTask, TaskKind, load_suite, default_suite_path
from .runner import (
    BenchmarkConfig,
    BuildResult,
    SampleResult,
    Toolchain,
    probe_toolchain,
    run_benchmark,
    run_sample,
)

__all__ = [
    "MetricSample",
    "average_pass_at_k",
    "build_rate",
    "pass_at_k",
    "speedup",
    "sweep_and_select",
    "GenTask",
    "TaskKind",
    "load_suite",
    "default_suite_path",
    "BenchmarkConfig",
    "BuildResult",
    "SampleResult",
    "Toolchain",
    "probe_toolchain",
    "run_benchmark",
    "run_sample",
]
