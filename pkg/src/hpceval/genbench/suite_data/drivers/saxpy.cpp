/* Driver: single-precision a*x + y. */
#include "hpc_harness.h"
#include <omp.h>

//__CANDIDATE__//

int main(void) {
    const int N = 1 << 22;
    float *x = (float *)malloc(sizeof(float) * N);
    float *y = (float *)malloc(sizeof(float) * N);
    float *yref = (float *)malloc(sizeof(float) * N);
    if (!x || !y || !yref) return 1;
    hpc_seed(0x5A4BULL);
    hpc_fill_f(x, N);
    hpc_fill_f(y, N);
    const float a = 2.5f;

    memcpy(yref, y, sizeof(float) * N);
    for (int i = 0; i < N; i++) yref[i] += a * x[i];

    omp_set_num_threads(4);
    int threads = hpc_task_count();
    double t0 = hpc_now();
    saxpy(x, y, a, N);
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
