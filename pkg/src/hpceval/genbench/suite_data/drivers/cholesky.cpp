/* Driver: single-precision Cholesky factorization of an SPD matrix,
 * checked by norm-relative reconstruction error ||L L^T - A|| / ||A||
 * reading only the lower triangle of the candidate's output. */
#include "hpc_harness.h"
#include <omp.h>

//__CANDIDATE__//

int main(void) {
    const int n = 256;
    float *M = (float *)malloc(sizeof(float) * n * n);
    float *A = (float *)malloc(sizeof(float) * n * n);
    float *Aorig = (float *)malloc(sizeof(float) * n * n);
    if (!M || !A || !Aorig) return 1;
    hpc_seed(0xC401ULL);
    hpc_fill_f(M, (long)n * n);

    /* A = M M^T + n I, symmetric positive definite by construction */
    for (int i = 0; i < n; i++) {
        for (int j = 0; j <= i; j++) {
            double s = 0.0;
            for (int k = 0; k < n; k++)
                s += (double)M[i * n + k] * (double)M[j * n + k];
            if (i == j) s += (double)n;
            A[i * n + j] = (float)s;
            A[j * n + i] = (float)s;
        }
    }
    memcpy(Aorig, A, sizeof(float) * n * n);

    omp_set_num_threads(4);
    int threads = hpc_task_count();
    double t0 = hpc_now();
    cholesky(A, n);
    double t1 = hpc_now();
    int after = hpc_task_count();
    if (after > threads) threads = after;

    double err = 0.0, norm = 0.0;
    for (int i = 0; i < n; i++) {
        for (int j = 0; j < n; j++) {
            double r = 0.0;
            int m = i < j ? i : j;
            for (int k = 0; k <= m; k++)
                r += (double)A[i * n + k] * (double)A[j * n + k];
            double d = r - (double)Aorig[i * n + j];
            err += d * d;
            norm += (double)Aorig[i * n + j] * (double)Aorig[i * n + j];
        }
    }
    int ok = norm > 0.0 && sqrt(err) <= HPC_TOL * sqrt(norm);
    hpc_report(ok, threads, 0, t1 - t0);
    free(M); free(A); free(Aorig);
    return 0;
}
