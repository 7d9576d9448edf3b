/* Driver: double-precision n x n matrix multiply, row-major. */
#include "hpc_harness.h"
#include <omp.h>

//__CANDIDATE__//

int main(void) {
    const int n = 256;
    double *A = (double *)malloc(sizeof(double) * n * n);
    double *B = (double *)malloc(sizeof(double) * n * n);
    double *C = (double *)malloc(sizeof(double) * n * n);
    double *Cref = (double *)malloc(sizeof(double) * n * n);
    if (!A || !B || !C || !Cref) return 1;
    hpc_seed(0x3A3AULL);
    hpc_fill(A, (long)n * n);
    hpc_fill(B, (long)n * n);
    memset(C, 0, sizeof(double) * n * n);

    for (int i = 0; i < n; i++) {
        for (int j = 0; j < n; j++) {
            double sum = 0.0;
            for (int k = 0; k < n; k++) sum += A[i * n + k] * B[k * n + j];
            Cref[i * n + j] = sum;
        }
    }

    omp_set_num_threads(4);
    int threads = hpc_task_count();
    double t0 = hpc_now();
    matmul(A, B, C, n);
    double t1 = hpc_now();
    int after = hpc_task_count();
    if (after > threads) threads = after;

    int ok = 1;
    for (long i = 0; i < (long)n * n; i++) {
        if (!hpc_close(C[i], Cref[i], HPC_TOL)) { ok = 0; break; }
    }
    hpc_report(ok, threads, 0, t1 - t0);
    free(A); free(B); free(C); free(Cref);
    return 0;
}
