/* Driver: double-precision a*x + y. */
#include "hpc_harness.h"
#include <omp.h>

//__CANDIDATE__//

int main(void) {
    const int N = 1 << 22;
    double *x = (double *)malloc(sizeof(double) * N);
    double *y = (double *)malloc(sizeof(double) * N);
    double *yref = (double *)malloc(sizeof(double) * N);
    if (!x || !y || !yref) return 1;
    hpc_seed(0xDA4BULL);
    hpc_fill(x, N);
    hpc_fill(y, N);
    const double a = 2.5;

    memcpy(yref, y, sizeof(double) * N);
    for (int i = 0; i < N; i++) yref[i] += a * x[i];

    omp_set_num_threads(4);
    int threads = hpc_task_count();
    double t0 = hpc_now();
    daxpy(x, y, a, N);
    double t1 = hpc_now();
    int after = hpc_task_count();
    if (after > threads) threads = after;

    int ok = 1;
    for (int i = 0; i < N; i++) {
        if (!hpc_close(y[i], yref[i], HPC_TOL)) { ok = 0; break; }
    }
    hpc_report(ok, threads, 0, t1 - t0);
    free(x); free(y); free(yref);
    return 0;
}
