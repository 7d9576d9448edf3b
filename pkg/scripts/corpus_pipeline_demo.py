#!/usr/bin/env python3
"""Exercise the corpus pipeline end to end on a generated source tree.

Creates a small C++ tree with planted duplicates, an oversized file, and
a near-empty file, then runs ingest, dedup, filter, stats, and loop
extraction, printing what each stage removed.
"""

import argparse
import sys
import tempfile
from pathlib import Path

from hpceval import corpus, pragma

LOOP_FILE = """\
#include <omp.h>

void axpy(double *x, double *y, double a, int n) {
    #pragma omp parallel for
    for (int i = 0; i < n; i++) {
        y[i] += a * x[i];
    }
}

double dot(const double *x, const double *y, int n) {
    double acc = 0.0;
    #pragma omp parallel for reduction(+:acc)
    for (int i = 0; i < n; i++) {
        acc += x[i] * y[i];
    }
    return acc;
}
"""


def plant_tree(root: Path) -> None:
    (root / "kernels").mkdir(parents=True)
    (root / "kernels" / "axpy.cpp").write_text(LOOP_FILE)
    for i in range(6):
        (root / f"unit_{i}.cpp").write_text(
            f"int helper_{i}(int v) {{\n"
            f"    int shifted = v + {i};\n"
            f"    return shifted * {i + 2};\n"
            f"}}\n"
        )
    # duplicates of one unit, dropped by dedup
    for i in range(3):
        (root / f"copy_{i}.cpp").write_text((root / "unit_0.cpp").read_text())

    one_mib = 1 << 20
    (root / "huge.cpp").write_text("// filler\n" * (one_mib // 10 + 1))
    (root / "stub.h").write_text("int x;\n")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--keep", action="store_true", help="leave the tree on disk")
    args = ap.parse_args()

    tmp = tempfile.mkdtemp(prefix="hpceval-corpus-")
    root = Path(tmp)
    plant_tree(root)
    print(f"planted tree in {root}")

    index = corpus.ingest([root])
    print(f"ingest:  {len(index.files)} files")

    deduped = corpus.dedup(index)
    print(f"dedup:   {len(deduped.files)} files "
          f"(-{len(index.files) - len(deduped.files)} duplicates)")

    filtered = corpus.filter_size(deduped)
    print(f"filter:  {len(filtered.files)} files "
          f"(-{len(deduped.files) - len(filtered.files)} oversized/tiny)")

    st = corpus.stats(filtered)
    for ext in sorted(st.files_by_extension):
        print(f"  .{ext}: {st.files_by_extension[ext]} files, "
              f"{st.loc_by_extension[ext]} loc")

    loops = pragma.extract_loops(filtered)
    print(f"loops:   {len(loops.samples)} annotated "
          f"({loops.skipped_regions} regions skipped)")
    for s in loops.samples:
        print(f"  {s.pragma_text}")
        print(f"    sample: ...{pragma.format_sample(s)[-72:]!r}")

    if not args.keep:
        import shutil

        shutil.rmtree(root)
    return 0


if __name__ == "__main__":
    sys.exit(main())
