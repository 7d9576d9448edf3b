/* Driver: average of an array of doubles. */
#include "hpc_harness.h"
#include <omp.h>

//__CANDIDATE__//

int main(void) {
    const int N = 1 << 20;
    double *x = (double *)malloc(sizeof(double) * N);
    if (!x) return 1;
    hpc_seed(0x5EEDULL);
    hpc_fill(x, N);

    double acc = 0.0;
    for (int i = 0; i < N; i++) acc += x[i];
    const double expect = acc / N;

    omp_set_num_threads(4);
    int threads = hpc_task_count();
    double t0 = hpc_now();
    double got = average(x, N);
    double t1 = hpc_now();
    int after = hpc_task_count();
    if (after > threads) threads = after;

    hpc_report(hpc_close(got, expect, HPC_TOL), threads, 0, t1 - t0);
    free(x);
    return 0;
}
