"""Task suite loading for the code-generation benchmark.

A task bundles everything needed to judge one prompt: the prompt text, a
driver program with a ``//__CANDIDATE__//`` hole where the completed
function gets spliced in, an optional hand-written sequential baseline
body for speedup measurement, and the numeric tolerance the driver
enforces.  The bundled suite has 25 tasks: seven kernels in sequential,
OpenMP, and MPI variants, plus four MPI-only message-passing exercises.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Literal

TaskKind = Literal["sequential", "openmp", "mpi"]

CANDIDATE_MARKER = "//__CANDIDATE__//"

_VALID_KINDS = ("sequential", "openmp", "mpi")


@dataclass(frozen=True)
class GenTask:
    id: str
    kind: TaskKind
    prompt: str
    driver: str
    tolerance: float
    baseline: str | None = None
    solution: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in _VALID_KINDS:
            raise ValueError(f"task {self.id}: unknown kind {self.kind!r}")
        if not self.prompt.rstrip().endswith("{"):
            raise ValueError(f"task {self.id}: prompt must end with an open brace")
        if CANDIDATE_MARKER not in self.driver:
            raise ValueError(f"task {self.id}: driver has no {CANDIDATE_MARKER} hole")
        if not (self.tolerance > 0):
            raise ValueError(f"task {self.id}: tolerance must be positive")

    def assemble(self, completion: str) -> str:
        """Splice prompt + completion into the driver's candidate hole."""
        body = self.prompt + completion
        return self.driver.replace(CANDIDATE_MARKER, body, 1)


def default_suite_path() -> Path:
    """Location of the bundled suite definition."""
    return Path(str(resources.files("hpceval.genbench") / "suite_data" / "suite.json"))


def load_suite(path: str | Path | None = None) -> list[GenTask]:
    """Read a suite definition and pull in all referenced file contents.

    Relative file references resolve against the definition's directory.
    The bundled default must contain exactly 25 tasks with unique ids.
    """
    suite_path = Path(path) if path is not None else default_suite_path()
    try:
        spec = json.loads(suite_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot load suite definition {suite_path}: {exc}") from exc
    base = suite_path.parent

    def read_ref(ref: str | None) -> str | None:
        if ref is None:
            return None
        return (base / ref).read_text(encoding="utf-8")

    tasks: list[GenTask] = []
    for entry in spec["tasks"]:
        tasks.append(
            GenTask(
                id=entry["id"],
                kind=entry["kind"],
                prompt=read_ref(entry["prompt"]),
                driver=read_ref(entry["driver"]),
                tolerance=float(entry["tolerance"]),
                baseline=read_ref(entry.get("baseline")),
                solution=read_ref(entry.get("solution")),
            )
        )

    ids = [t.id for t in tasks]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate task ids in suite definition")
    return tasks


def reference_solutions(tasks: list[GenTask]) -> dict[str, list[str]]:
    """Map task id to its bundled reference completion, where present."""
    return {t.id: [t.solution] for t in tasks if t.solution is not None}
