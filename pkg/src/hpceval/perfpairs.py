"""Labeled performance pairs from git histories and contest solutions.

A pair is two versions of some code plus a label: positive when the
second version is slower, negative when it is the same or faster.  Two
sources feed the dataset:

* git commits: each commit is built and run in an isolated worktree, its
  runtime is the median over repeated runs, and the changed region (diff
  hunks with symmetric context) provides the before/after text;
* contest solutions: correct solutions to the same problem are paired
  when their runtimes differ by a configured ratio, with randomized
  orientation.

Serialization uses a source-specific separator token; any text that
already contains its token is refused so the encoding stays injective.
Everything downstream of the measurements is pure and deterministic
under a fixed seed.
"""

from __future__ import annotations

import json
import logging
import random
import statistics
import subprocess
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

log = logging.getLogger(__name__)

POSITIVE = "positive"
NEGATIVE = "negative"

COMMIT_SEP = "<COMMIT>"
PAIR_SEP = "<PAIR>"
_SEPARATORS = {"commit": COMMIT_SEP, "contest": PAIR_SEP}

DEFAULT_NOISE_THRESHOLD = 0.05
DEFAULT_GAP_RATIO = 1.5
DEFAULT_REPEATS = 5
DEFAULT_REGION_CONTEXT = 10

# git's well-known empty tree, used to diff a root commit
_EMPTY_TREE = "4b825dc642cb6eb9a060e54bf8d69288fbee4904"


def label_for(before_seconds: float, after_seconds: float, threshold: float) -> str:
    """Positive iff the after side is slower beyond the noise threshold."""
    if before_seconds < 0 or after_seconds < 0:
        raise ValueError("runtimes must be nonnegative")
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    return POSITIVE if after_seconds > before_seconds * (1.0 + threshold) else NEGATIVE


@dataclass(frozen=True)
class CommitRun:
    """One commit's build/run outcome and its changed code region.

    region_before/region_after are the two sides of this commit's diff
    against its first parent; runtime_seconds is the median of repeats
    and is only present when the build and every run succeeded.
    """

    commit: str
    region_before: str
    region_after: str
    build_ok: bool
    runtime_seconds: float | None
    repeats: tuple

    def __post_init__(self):
        if self.runtime_seconds is not None:
            if not self.build_ok:
                raise ValueError("runtime requires a successful build")
            if not self.repeats:
                raise ValueError("runtime requires raw repeat timings")
            med = statistics.median(self.repeats)
            if self.runtime_seconds != med:
                raise ValueError("runtime_seconds must be the median of repeats")


@dataclass(frozen=True)
class PerfPair:
    before_text: str
    after_text: str
    source: str
    label: str
    runtimes: tuple

    def __post_init__(self):
        if self.source not in _SEPARATORS:
            raise ValueError(f"source must be one of {sorted(_SEPARATORS)}")
        if self.label not in (POSITIVE, NEGATIVE):
            raise ValueError(f"label must be {POSITIVE!r} or {NEGATIVE!r}")
        if not self.before_text or not self.after_text:
            raise ValueError("pair texts must be non-empty")
        if len(self.runtimes) != 2:
            raise ValueError("runtimes must be a (before, after) pair")


@dataclass(frozen=True)
class ContestSolution:
    problem_id: str
    text: str
    runtime_seconds: float
    verdict: str = "correct"

    def __post_init__(self):
        if self.verdict != "correct":
            raise ValueError("only correct solutions are admitted")
        if self.runtime_seconds < 0:
            raise ValueError("runtime must be nonnegative")
        if not self.text:
            raise ValueError("solution text must be non-empty")


@dataclass(frozen=True)
class HarvestResult:
    runs: tuple
    skipped: tuple  # (commit, reason) pairs


# ---------------------------------------------------------------------------
# git harvesting


def _git(repo, *args, check: bool = True) -> str:
    proc = subprocess.run(
        ["git", "-C", str(repo), *args],
        capture_output=True,
        text=True,
    )
    if check and proc.returncode != 0:
        raise RuntimeError(
            f"git {' '.join(args)} failed: {proc.stderr.strip() or proc.stdout.strip()}"
        )
    return proc.stdout


def parse_unified_diff(diff_text: str) -> tuple:
    """Collect (before, after) region text from unified diff output.

    Context lines land on both sides, '-' lines on the before side, '+'
    lines on the after side.  File and hunk headers are dropped.
    """
    before: list = []
    after: list = []
    in_hunk = False
    for line in diff_text.splitlines():
        if line.startswith("@@"):
            in_hunk = True
            continue
        if line.startswith("diff "):
            in_hunk = False
            continue
        if not in_hunk:
            continue  # file headers, mode lines, index lines
        if line.startswith("\\"):
            continue  # "\ No newline at end of file"
        if line.startswith("-"):
            before.append(line[1:])
        elif line.startswith("+"):
            after.append(line[1:])
        else:
            body = line[1:] if line.startswith(" ") else line
            before.append(body)
            after.append(body)
    return "\n".join(before), "\n".join(after)


def _commit_region(repo, sha: str, context_lines: int) -> tuple:
    parent = _git(repo, "rev-parse", "--quiet", "--verify", f"{sha}^1", check=False).strip()
    base = parent if parent else _EMPTY_TREE
    diff = _git(repo, "diff", f"-U{context_lines}", base, sha)
    return parse_unified_diff(diff)


def _timed_run(cmd: str, cwd, timeout_s: float) -> float | None:
    t0 = time.perf_counter()
    try:
        proc = subprocess.run(
            cmd, shell=True, cwd=cwd, capture_output=True, timeout=timeout_s
        )
    except subprocess.TimeoutExpired:
        return None
    t1 = time.perf_counter()
    if proc.returncode != 0:
        return None
    return t1 - t0


def harvest_commits(
    repo,
    build_cmd: str,
    run_cmd: str,
    repeats: int = DEFAULT_REPEATS,
    context_lines: int = DEFAULT_REGION_CONTEXT,
    build_timeout_s: float = 600.0,
    run_timeout_s: float = 600.0,
) -> HarvestResult:
    """Build and time every first-parent commit of a repository.

    Each commit is checked out into a throwaway worktree, built, and run
    `repeats` times; the recorded runtime is the median.  Builds and runs
    execute strictly serially so timings are not polluted by each other.
    Commits that cannot be checked out are skipped with a reason; build
    and run failures still produce a CommitRun (without a runtime).
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    repo = Path(repo)
    shas = _git(repo, "rev-list", "--first-parent", "--reverse", "HEAD").split()

    runs: list = []
    skipped: list = []
    for sha in shas:
        try:
            region_before, region_after = _commit_region(repo, sha, context_lines)
        except RuntimeError as exc:
            skipped.append((sha, f"diff failed: {exc}"))
            continue
        with tempfile.TemporaryDirectory(prefix="hpceval-wt-") as tmp:
            wt = Path(tmp) / "wt"
            try:
                _git(repo, "worktree", "add", "--detach", str(wt), sha)
            except RuntimeError as exc:
                skipped.append((sha, f"checkout failed: {exc}"))
                continue
            try:
                build = subprocess.run(
                    build_cmd,
                    shell=True,
                    cwd=wt,
                    capture_output=True,
                    timeout=build_timeout_s,
                )
                build_ok = build.returncode == 0
                timings: list = []
                if build_ok:
                    for _ in range(repeats):
                        t = _timed_run(run_cmd, wt, run_timeout_s)
                        if t is None:
                            timings = []
                            break
                        timings.append(t)
                runs.append(
                    CommitRun(
                        commit=sha,
                        region_before=region_before,
                        region_after=region_after,
                        build_ok=build_ok,
                        runtime_seconds=statistics.median(timings) if timings else None,
                        repeats=tuple(timings),
                    )
                )
            except subprocess.TimeoutExpired:
                runs.append(
                    CommitRun(
                        commit=sha,
                        region_before=region_before,
                        region_after=region_after,
                        build_ok=False,
                        runtime_seconds=None,
                        repeats=(),
                    )
                )
            finally:
                _git(repo, "worktree", "remove", "--force", str(wt), check=False)
    return HarvestResult(runs=tuple(runs), skipped=tuple(skipped))


# ---------------------------------------------------------------------------
# pair construction


def label_commit_pairs(
    runs: Sequence, noise_threshold: float = DEFAULT_NOISE_THRESHOLD
) -> list:
    """Pair strictly consecutive commits that both have runtimes.

    The pair's text is the younger commit's diff region (its parent side
    as before, its own side as after); the label compares the two
    commits' measured runtimes under the noise threshold.  Pairs with an
    empty region on either side are dropped.
    """
    pairs: list = []
    for prev, cur in zip(runs, runs[1:]):
        if prev.runtime_seconds is None or cur.runtime_seconds is None:
            continue
        if not cur.region_before or not cur.region_after:
            continue
        pairs.append(
            PerfPair(
                before_text=cur.region_before,
                after_text=cur.region_after,
                source="commit",
                label=label_for(
                    prev.runtime_seconds, cur.runtime_seconds, noise_threshold
                ),
                runtimes=(prev.runtime_seconds, cur.runtime_seconds),
            )
        )
    return pairs


def build_contest_pairs(
    solutions: Sequence,
    gap_ratio: float = DEFAULT_GAP_RATIO,
    seed: int = 0,
    per_problem: int | None = None,
) -> list:
    """Pair correct solutions of the same problem with a runtime gap.

    Only pairs whose slower/faster runtime ratio reaches gap_ratio are
    kept; orientation is randomized per pair and the label follows it.
    Deterministic for a fixed seed and input order.
    """
    if gap_ratio < 1.0:
        raise ValueError("gap_ratio must be >= 1")
    by_problem: dict = {}
    for sol in solutions:
        by_problem.setdefault(sol.problem_id, []).append(sol)

    rng = random.Random(seed)
    pairs: list = []
    for problem in sorted(by_problem):
        group = by_problem[problem]
        eligible = []
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                fast, slow = sorted((group[i], group[j]), key=lambda s: s.runtime_seconds)
                if slow.runtime_seconds <= fast.runtime_seconds:
                    continue
                if slow.runtime_seconds < gap_ratio * fast.runtime_seconds:
                    continue
                eligible.append((fast, slow))
        if per_problem is not None and len(eligible) > per_problem:
            eligible = rng.sample(eligible, per_problem)
        for fast, slow in eligible:
            if rng.random() < 0.5:
                first, second, label = fast, slow, POSITIVE
            else:
                first, second, label = slow, fast, NEGATIVE
            pairs.append(
                PerfPair(
                    before_text=first.text,
                    after_text=second.text,
                    source="contest",
                    label=label,
                    runtimes=(first.runtime_seconds, second.runtime_seconds),
                )
            )
    return pairs


def serialize_pair(pair: PerfPair) -> str:
    """before + separator + after; refuses text containing the separator."""
    sep = _SEPARATORS[pair.source]
    if sep in pair.before_text or sep in pair.after_text:
        raise ValueError(f"pair text contains its separator token {sep!r}")
    return f"{pair.before_text}{sep}{pair.after_text}"


def deserialize_pair(text: str, source: str, label: str, runtimes) -> PerfPair:
    sep = _SEPARATORS[source]
    before, found, after = text.partition(sep)
    if not found:
        raise ValueError(f"serialized pair lacks separator {sep!r}")
    return PerfPair(
        before_text=before,
        after_text=after,
        source=source,
        label=label,
        runtimes=tuple(runtimes),
    )


def split_train_eval(pairs: Sequence, fraction: float = 0.9, seed: int = 0) -> tuple:
    """Deterministic shuffled split; the two sides partition the input."""
    if not pairs:
        raise ValueError("nothing to split")
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must be in (0, 1)")
    order = list(range(len(pairs)))
    random.Random(seed).shuffle(order)
    n_train = int(len(pairs) * fraction + 0.5)
    train = [pairs[i] for i in order[:n_train]]
    evaluation = [pairs[i] for i in order[n_train:]]
    return train, evaluation


def classification_accuracy(predictions: Sequence, truth: Sequence) -> float:
    if len(predictions) != len(truth):
        raise ValueError(
            f"length mismatch: {len(predictions)} predictions vs {len(truth)} truths"
        )
    if not truth:
        raise ValueError("nothing to score")
    matches = sum(1 for p, t in zip(predictions, truth) if p == t)
    return matches / len(truth)


# ---------------------------------------------------------------------------
# interchange


def write_runs(result: HarvestResult, path) -> int:
    with open(path, "w", encoding="utf-8") as fh:
        for r in result.runs:
            row = {
                "commit": r.commit,
                "region_before": r.region_before,
                "region_after": r.region_after,
                "build_ok": r.build_ok,
                "runtime_seconds": r.runtime_seconds,
                "repeats": list(r.repeats),
            }
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    return len(result.runs)


def read_runs(path) -> list:
    runs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            row = json.loads(line)
            runs.append(
                CommitRun(
                    commit=row["commit"],
                    region_before=row["region_before"],
                    region_after=row["region_after"],
                    build_ok=row["build_ok"],
                    runtime_seconds=row["runtime_seconds"],
                    repeats=tuple(row["repeats"]),
                )
            )
    return runs


def write_pairs(pairs: Iterable, path) -> int:
    """Dataset JSONL: text, label, source, runtimes.  Byte-deterministic."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for p in pairs:
            row = {
                "text": serialize_pair(p),
                "label": p.label,
                "source": p.source,
                "runtimes": list(p.runtimes),
            }
            fh.write(json.dumps(row, sort_keys=True) + "\n")
            count += 1
    return count


def read_pairs(path) -> list:
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            row = json.loads(line)
            pairs.append(
                deserialize_pair(
                    row["text"], row["source"], row["label"], row["runtimes"]
                )
            )
    return pairs


def read_contest_solutions(path) -> tuple:
    """Load solutions JSONL; returns (admitted, rejected_count).

    Rows whose verdict is not "correct" are rejected, mirroring the rule
    that only correct solutions are paired.
    """
    admitted = []
    rejected = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            row = json.loads(line)
            if row.get("verdict", "correct") != "correct":
                rejected += 1
                continue
            admitted.append(
                ContestSolution(
                    problem_id=str(row["problem"]),
                    text=row["text"],
                    runtime_seconds=float(row["runtime_seconds"]),
                )
            )
    return admitted, rejected


def read_labels(path) -> list:
    """One label per line; used for externally produced predictions."""
    labels = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            label = line.strip()
            if not label:
                continue
            if label not in (POSITIVE, NEGATIVE):
                raise ValueError(f"bad label {label!r}")
            labels.append(label)
    return labels
