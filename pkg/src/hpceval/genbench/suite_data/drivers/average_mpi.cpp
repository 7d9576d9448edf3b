/* Driver: average of one double per rank, result expected on all ranks. */
#include "hpc_harness.h"
#include <mpi.h>
#include "hpc_mpi_shim.h"

//__CANDIDATE__//

int main(int argc, char **argv) {
    MPI_Init(&argc, &argv);
    int rank, size;
    PMPI_Comm_rank(MPI_COMM_WORLD, &rank);
    PMPI_Comm_size(MPI_COMM_WORLD, &size);

    double X = 1.25 * (double)(rank + 1);
    double expect = 1.25 * (double)(size + 1) / 2.0;

    PMPI_Barrier(MPI_COMM_WORLD);
    hpc_shim_start();
    double t0 = hpc_now();
    double got = mpiAverage(X);
    double t1 = hpc_now();
    hpc_shim_stop();

    int ok_local = hpc_close(got, expect, HPC_TOL);
    int ok = 0;
    PMPI_Reduce(&ok_local, &ok, 1, MPI_INT, MPI_LAND, 0, MPI_COMM_WORLD);
    long calls = hpc_shim_count(), total = 0;
    PMPI_Reduce(&calls, &total, 1, MPI_LONG, MPI_SUM, 0, MPI_COMM_WORLD);
    if (rank == 0) hpc_report(ok, 1, total, t1 - t0);
    MPI_Finalize();
    return 0;
}
