/* Driver: distributed reduce by a generic binary function; the array is
 * valid on rank 0 only and the result is checked on rank 0. */
#include "hpc_harness.h"
#include <mpi.h>
#include "hpc_mpi_shim.h"

static double foo(double a, double b) { return a > b ? a : b; }

//__CANDIDATE__//

int main(int argc, char **argv) {
    MPI_Init(&argc, &argv);
    int rank, size;
    PMPI_Comm_rank(MPI_COMM_WORLD, &rank);
    PMPI_Comm_size(MPI_COMM_WORLD, &size);

    const int N = 1 << 20;
    double *x = (double *)malloc(sizeof(double) * N);
    if (!x) return 1;
    double expect = 0.0;
    if (rank == 0) {
        hpc_seed(0xF00DULL);
        hpc_fill(x, N);
        expect = x[0];
        for (int i = 1; i < N; i++) expect = foo(expect, x[i]);
    }

    PMPI_Barrier(MPI_COMM_WORLD);
    hpc_shim_start();
    double t0 = hpc_now();
    double got = reduce(foo, x, N);
    double t1 = hpc_now();
    hpc_shim_stop();

    int ok_local = 1;
    if (rank == 0) ok_local = hpc_close(got, expect, HPC_TOL);
    int ok = 0;
    PMPI_Reduce(&ok_local, &ok, 1, MPI_INT, MPI_LAND, 0, MPI_COMM_WORLD);
    long calls = hpc_shim_count(), total = 0;
    PMPI_Reduce(&calls, &total, 1, MPI_LONG, MPI_SUM, 0, MPI_COMM_WORLD);
    if (rank == 0) hpc_report(ok, 1, total, t1 - t0);
    free(x);
    MPI_Finalize();
    return 0;
}
