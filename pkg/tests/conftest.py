import pytest
from hypothesis import HealthCheck, settings

from hpceval.genbench.runner import BenchmarkConfig, probe_toolchain
from hpceval.genbench.suite import GenTask, load_suite

# compilation and subprocess timing make per-example deadlines meaningless
settings.register_profile(
    "pkg", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("pkg")


@pytest.fixture(scope="session")
def toolchain():
    try:
        return probe_toolchain()
    except RuntimeError as exc:
        pytest.skip(f"toolchain unavailable: {exc}")


@pytest.fixture(scope="session")
def bench_config():
    return BenchmarkConfig()


@pytest.fixture(scope="session")
def suite_tasks():
    return load_suite()


@pytest.fixture(scope="session")
def task_by_id(suite_tasks):
    return {t.id: t for t in suite_tasks}


FLOAT_SUM_PROMPT = """\
/*
 Compute the sum of the array X and return the sum.
 X has N elements.
 Use OpenMP to compute the sum in parallel.
*/
float sum(float *X, int N) {"""

FLOAT_SUM_DRIVER = """\
/* Driver: single-precision array sum against a double reference. */
#include "hpc_harness.h"
#include <omp.h>

//__CANDIDATE__//

int main(void) {
    const int N = 1 << 16;
    float *X = (float *)malloc(sizeof(float) * N);
    if (!X) return 1;
    hpc_seed(0x50FAULL);
    hpc_fill_f(X, N);

    double acc = 0.0;
    for (int i = 0; i < N; i++) acc += X[i];

    omp_set_num_threads(4);
    int threads = hpc_task_count();
    double t0 = hpc_now();
    float got = sum(X, N);
    double t1 = hpc_now();
    int after = hpc_task_count();
    if (after > threads) threads = after;

    hpc_report(hpc_close((double)got, acc, HPC_TOL), threads, 0, t1 - t0);
    free(X);
    return 0;
}
"""

# float accumulation order shifts the result by ~1e-5 relative, so the
# check tolerance sits well above that but far below any real bug
FLOAT_SUM_TOLERANCE = 1e-4

SEQUENTIAL_SUM_BODY = """
    float sum = 0.0f;
    for (int i = 0; i < N; i++)
        sum += X[i];
    return sum;
}
"""

PARALLEL_SUM_BODY = """
    float sum = 0.0f;
    #pragma omp parallel for reduction(+:sum)
    for (int i = 0; i < N; i++)
        sum += X[i];
    return sum;
}
"""


@pytest.fixture(scope="session")
def float_sum_task():
    return GenTask(
        id="float_sum_omp",
        kind="openmp",
        prompt=FLOAT_SUM_PROMPT,
        driver=FLOAT_SUM_DRIVER,
        tolerance=FLOAT_SUM_TOLERANCE,
    )
