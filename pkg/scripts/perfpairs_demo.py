#!/usr/bin/env python3
"""Build a synthetic commit history and harvest labeled perf pairs.

The generated repo alternates a nanosleep between fast and slow
versions, so every other commit is a planted regression.  Harvest, label
the adjacent pairs, split, and print the result.
"""

import argparse
import subprocess
import sys
import tempfile
import textwrap
from pathlib import Path

from hpceval import perfpairs

FAST_NS = 20_000_000  # 20 ms
SLOW_NS = 200_000_000  # 200 ms


def make_repo(root: Path, commits: int) -> None:
    subprocess.run(["git", "init", "-q", str(root)], check=True)
    for flag in ("user.email", "user.name"):
        subprocess.run(["git", "-C", str(root), "config", flag, "demo"], check=True)
    for i in range(commits):
        ns = SLOW_NS if i % 2 else FAST_NS
        (root / "main.c").write_text(textwrap.dedent(f"""\
            #include <time.h>
            int main(void) {{
                struct timespec ts = {{0, {ns}L}}; /* rev {i + 1} */
                nanosleep(&ts, 0);
                return 0;
            }}
            """))
        subprocess.run(["git", "-C", str(root), "add", "-A"], check=True)
        subprocess.run(
            ["git", "-C", str(root), "commit", "-qm", f"rev {i + 1}"], check=True
        )


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--commits", type=int, default=6)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    with tempfile.TemporaryDirectory(prefix="hpceval-perf-") as tmp:
        repo = Path(tmp) / "repo"
        repo.mkdir()
        make_repo(repo, args.commits)
        print(f"created {args.commits} commits in {repo}")

        result = perfpairs.harvest_commits(
            repo, "cc -O2 main.c -o prog", "./prog", repeats=args.repeats
        )
        for run in result.runs:
            print(f"  {run.commit[:10]} build={run.build_ok} "
                  f"runtime={run.runtime_seconds:.3f}s")

        pairs = perfpairs.label_commit_pairs(result.runs)
        print("labels:", [p.label for p in pairs])

        train, evaluation = perfpairs.split_train_eval(pairs, 0.8, seed=0)
        print(f"split: {len(train)} train / {len(evaluation)} eval")

        sample = perfpairs.serialize_pair(pairs[0])
        print(f"first serialized pair is {len(sample)} chars, "
              f"separator {perfpairs.COMMIT_SEP}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
