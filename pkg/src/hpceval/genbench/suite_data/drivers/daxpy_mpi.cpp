/* Driver: distributed double-precision a*x + y; x and y are valid on
 * rank 0 only and the updated y is checked on rank 0. */
#include "hpc_harness.h"
#include <mpi.h>
#include "hpc_mpi_shim.h"

//__CANDIDATE__//

int main(int argc, char **argv) {
    MPI_Init(&argc, &argv);
    int rank, size;
    PMPI_Comm_rank(MPI_COMM_WORLD, &rank);
    PMPI_Comm_size(MPI_COMM_WORLD, &size);

    const int N = 1 << 20;
    double *x = (double *)malloc(sizeof(double) * N);
    double *y = (double *)malloc(sizeof(double) * N);
    double *yref = (double *)malloc(sizeof(double) * N);
    if (!x || !y || !yref) return 1;
    const double a = 2.5;
    if (rank == 0) {
        hpc_seed(0xDA4BULL);
        hpc_fill(x, N);
        hpc_fill(y, N);
        memcpy(yref, y, sizeof(double) * N);
        for (int i = 0; i < N; i++) yref[i] += a * x[i];
    }

    PMPI_Barrier(MPI_COMM_WORLD);
    hpc_shim_start();
    double t0 = hpc_now();
    daxpy(x, y, a, N);
    double t1 = hpc_now();
    hpc_shim_stop();

    int ok_local = 1;
    if (rank == 0) {
        for (int i = 0; i < N; i++) {
            if (!hpc_close(y[i], yref[i], HPC_TOL)) { ok_local = 0; break; }
        }
    }
    int ok = 0;
    PMPI_Reduce(&ok_local, &ok, 1, MPI_INT, MPI_LAND, 0, MPI_COMM_WORLD);
    long calls = hpc_shim_count(), total = 0;
    PMPI_Reduce(&calls, &total, 1, MPI_LONG, MPI_SUM, 0, MPI_COMM_WORLD);
    if (rank == 0) hpc_report(ok, 1, total, t1 - t0);
    free(x); free(y); free(yref);
    MPI_Finalize();
    return 0;
}
