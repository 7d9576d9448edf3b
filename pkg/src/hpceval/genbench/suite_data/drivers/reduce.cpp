/* Driver: reduce an array of doubles by a generic binary function.
 * foo is max, which is exactly associative, so any chunking of the fold
 * must reproduce the sequential result bit for bit. */
#include "hpc_harness.h"
#include <omp.h>

static double foo(double a, double b) { return a > b ? a : b; }

//__CANDIDATE__//

int main(void) {
    const int N = 1 << 20;
    double *x = (double *)malloc(sizeof(double) * N);
    if (!x) return 1;
    hpc_seed(0xF00DULL);
    hpc_fill(x, N);

    double expect = x[0];
    for (int i = 1; i < N; i++) expect = foo(expect, x[i]);

    omp_set_num_threads(4);
    int threads = hpc_task_count();
    double t0 = hpc_now();
    double got = reduce(foo, x, N);
    double t1 = hpc_now();
    int after = hpc_task_count();
    if (after > threads) threads = after;

    hpc_report(hpc_close(got, expect, HPC_TOL), threads, 0, t1 - t0);
    free(x);
    return 0;
}
