/* Driver: ping-pong between ranks 0 and 1.  With `rounds` sends per
 * side and an increment before every send, both participants must
 * finish holding 2 * rounds. */
#include "hpc_harness.h"
#include <mpi.h>
#include "hpc_mpi_shim.h"

//__CANDIDATE__//

int main(int argc, char **argv) {
    MPI_Init(&argc, &argv);
    int rank, size;
    PMPI_Comm_rank(MPI_COMM_WORLD, &rank);
    PMPI_Comm_size(MPI_COMM_WORLD, &size);

    const int rounds = 8;
    PMPI_Barrier(MPI_COMM_WORLD);
    hpc_shim_start();
    double t0 = hpc_now();
    int got = pingPong(rounds);
    double t1 = hpc_now();
    hpc_shim_stop();

    int expect = (rank == 0 || rank == 1) ? 2 * rounds : 0;
    int ok_local = (got == expect);
    int ok = 0;
    PMPI_Reduce(&ok_local, &ok, 1, MPI_INT, MPI_LAND, 0, MPI_COMM_WORLD);
    long calls = hpc_shim_count(), total = 0;
    PMPI_Reduce(&calls, &total, 1, MPI_LONG, MPI_SUM, 0, MPI_COMM_WORLD);
    if (rank == 0) hpc_report(ok, 1, total, t1 - t0);
    MPI_Finalize();
    return 0;
}
