/* Driver: the driver sends one integer from rank 0; the candidate
 * receives it on rank 1 and must return the payload. */
#include "hpc_harness.h"
#include <mpi.h>
#include "hpc_mpi_shim.h"

//__CANDIDATE__//

int main(int argc, char **argv) {
    MPI_Init(&argc, &argv);
    int rank, size;
    PMPI_Comm_rank(MPI_COMM_WORLD, &rank);
    PMPI_Comm_size(MPI_COMM_WORLD, &size);

    const int value = 171717;
    PMPI_Barrier(MPI_COMM_WORLD);
    hpc_shim_start();
    double t0 = hpc_now();
    if (rank == 0) PMPI_Send(&value, 1, MPI_INT, 1, 0, MPI_COMM_WORLD);
    int ok_local = 1;
    if (rank == 1) {
        int got = recvNumber();
        ok_local = (got == value);
    }
    double t1 = hpc_now();
    hpc_shim_stop();

    int ok = 0;
    PMPI_Reduce(&ok_local, &ok, 1, MPI_INT, MPI_LAND, 0, MPI_COMM_WORLD);
    long calls = hpc_shim_count(), total = 0;
    PMPI_Reduce(&calls, &total, 1, MPI_LONG, MPI_SUM, 0, MPI_COMM_WORLD);
    if (rank == 0) hpc_report(ok, 1, total, t1 - t0);
    MPI_Finalize();
    return 0;
}
