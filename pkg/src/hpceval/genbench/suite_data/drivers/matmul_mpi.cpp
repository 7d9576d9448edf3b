/* Driver: distributed double-precision matrix multiply; A, B, C are
 * valid on rank 0 only and the result C is checked on rank 0. */
#include "hpc_harness.h"
#include <mpi.h>
#include "hpc_mpi_shim.h"

//__CANDIDATE__//

int main(int argc, char **argv) {
    MPI_Init(&argc, &argv);
    int rank, size;
    PMPI_Comm_rank(MPI_COMM_WORLD, &rank);
    PMPI_Comm_size(MPI_COMM_WORLD, &size);

    const int n = 256;
    double *A = (double *)malloc(sizeof(double) * n * n);
    double *B = (double *)malloc(sizeof(double) * n * n);
    double *C = (double *)malloc(sizeof(double) * n * n);
    double *Cref = (double *)malloc(sizeof(double) * n * n);
    if (!A || !B || !C || !Cref) return 1;
    memset(C, 0, sizeof(double) * n * n);
    if (rank == 0) {
        hpc_seed(0x3A3AULL);
        hpc_fill(A, (long)n * n);
        hpc_fill(B, (long)n * n);
        for (int i = 0; i < n; i++) {
            for (int j = 0; j < n; j++) {
                double sum = 0.0;
                for (int k = 0; k < n; k++) sum += A[i * n + k] * B[k * n + j];
                Cref[i * n + j] = sum;
            }
        }
    }

    PMPI_Barrier(MPI_COMM_WORLD);
    hpc_shim_start();
    double t0 = hpc_now();
    matmul(A, B, C, n);
    double t1 = hpc_now();
    hpc_shim_stop();

    int ok_local = 1;
    if (rank == 0) {
        for (long i = 0; i < (long)n * n; i++) {
            if (!hpc_close(C[i], Cref[i], HPC_TOL)) { ok_local = 0; break; }
        }
    }
    int ok = 0;
    PMPI_Reduce(&ok_local, &ok, 1, MPI_INT, MPI_LAND, 0, MPI_COMM_WORLD);
    long calls = hpc_shim_count(), total = 0;
    PMPI_Reduce(&calls, &total, 1, MPI_LONG, MPI_SUM, 0, MPI_COMM_WORLD);
    if (rank == 0) hpc_report(ok, 1, total, t1 - t0);
    free(A); free(B); free(C); free(Cref);
    MPI_Finalize();
    return 0;
}
