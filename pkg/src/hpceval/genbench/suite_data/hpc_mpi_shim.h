/* Call-recording shim for MPI communication routines.
 *
 * The profiling interface guarantees every MPI_Xxx has a PMPI_Xxx alias,
 * so defining strong MPI_Xxx symbols in the translation unit intercepts
 * the candidate's calls while the driver talks to PMPI_* directly and
 * stays invisible to the counter.  Only calls made inside the recording
 * window (opened around the candidate invocation) are counted; queries
 * like MPI_Comm_rank and setup like MPI_Init are deliberately not
 * intercepted.
 *
 * Include after <mpi.h>.
 */
#ifndef HPC_MPI_SHIM_H
#define HPC_MPI_SHIM_H

#include <mpi.h>

static int hpc_shim_recording = 0;
static long hpc_shim_calls = 0;

static inline void hpc_shim_start(void) { hpc_shim_recording = 1; }
static inline void hpc_shim_stop(void) { hpc_shim_recording = 0; }
static inline long hpc_shim_count(void) { return hpc_shim_calls; }
static inline void hpc_shim_tick(void) {
    if (hpc_shim_recording) hpc_shim_calls++;
}

extern "C" {

int MPI_Send(const void *buf, int count, MPI_Datatype dt, int dest, int tag,
             MPI_Comm comm) {
    hpc_shim_tick();
    return PMPI_Send(buf, count, dt, dest, tag, comm);
}

int MPI_Recv(void *buf, int count, MPI_Datatype dt, int src, int tag,
             MPI_Comm comm, MPI_Status *status) {
    hpc_shim_tick();
    return PMPI_Recv(buf, count, dt, src, tag, comm, status);
}

int MPI_Sendrecv(const void *sbuf, int scount, MPI_Datatype sdt, int dest,
                 int stag, void *rbuf, int rcount, MPI_Datatype rdt, int src,
                 int rtag, MPI_Comm comm, MPI_Status *status) {
    hpc_shim_tick();
    return PMPI_Sendrecv(sbuf, scount, sdt, dest, stag, rbuf, rcount, rdt, src,
                         rtag, comm, status);
}

int MPI_Isend(const void *buf, int count, MPI_Datatype dt, int dest, int tag,
              MPI_Comm comm, MPI_Request *req) {
    hpc_shim_tick();
    return PMPI_Isend(buf, count, dt, dest, tag, comm, req);
}

int MPI_Irecv(void *buf, int count, MPI_Datatype dt, int src, int tag,
              MPI_Comm comm, MPI_Request *req) {
    hpc_shim_tick();
    return PMPI_Irecv(buf, count, dt, src, tag, comm, req);
}

int MPI_Bcast(void *buf, int count, MPI_Datatype dt, int root, MPI_Comm comm) {
    hpc_shim_tick();
    return PMPI_Bcast(buf, count, dt, root, comm);
}

int MPI_Reduce(const void *sbuf, void *rbuf, int count, MPI_Datatype dt,
               MPI_Op op, int root, MPI_Comm comm) {
    hpc_shim_tick();
    return PMPI_Reduce(sbuf, rbuf, count, dt, op, root, comm);
}

int MPI_Allreduce(const void *sbuf, void *rbuf, int count, MPI_Datatype dt,
                  MPI_Op op, MPI_Comm comm) {
    hpc_shim_tick();
    return PMPI_Allreduce(sbuf, rbuf, count, dt, op, comm);
}

int MPI_Scatter(const void *sbuf, int scount, MPI_Datatype sdt, void *rbuf,
                int rcount, MPI_Datatype rdt, int root, MPI_Comm comm) {
    hpc_shim_tick();
    return PMPI_Scatter(sbuf, scount, sdt, rbuf, rcount, rdt, root, comm);
}

int MPI_Scatterv(const void *sbuf, const int *scounts, const int *displs,
                 MPI_Datatype sdt, void *rbuf, int rcount, MPI_Datatype rdt,
                 int root, MPI_Comm comm) {
    hpc_shim_tick();
    return PMPI_Scatterv(sbuf, scounts, displs, sdt, rbuf, rcount, rdt, root,
                         comm);
}

int MPI_Gather(const void *sbuf, int scount, MPI_Datatype sdt, void *rbuf,
               int rcount, MPI_Datatype rdt, int root, MPI_Comm comm) {
    hpc_shim_tick();
    return PMPI_Gather(sbuf, scount, sdt, rbuf, rcount, rdt, root, comm);
}

int MPI_Gatherv(const void *sbuf, int scount, MPI_Datatype sdt, void *rbuf,
                const int *rcounts, const int *displs, MPI_Datatype rdt,
                int root, MPI_Comm comm) {
    hpc_shim_tick();
    return PMPI_Gatherv(sbuf, scount, sdt, rbuf, rcounts, displs, rdt, root,
                        comm);
}

int MPI_Allgather(const void *sbuf, int scount, MPI_Datatype sdt, void *rbuf,
                  int rcount, MPI_Datatype rdt, MPI_Comm comm) {
    hpc_shim_tick();
    return PMPI_Allgather(sbuf, scount, sdt, rbuf, rcount, rdt, comm);
}

int MPI_Alltoall(const void *sbuf, int scount, MPI_Datatype sdt, void *rbuf,
                 int rcount, MPI_Datatype rdt, MPI_Comm comm) {
    hpc_shim_tick();
    return PMPI_Alltoall(sbuf, scount, sdt, rbuf, rcount, rdt, comm);
}

int MPI_Barrier(MPI_Comm comm) {
    hpc_shim_tick();
    return PMPI_Barrier(comm);
}

int MPI_Scan(const void *sbuf, void *rbuf, int count, MPI_Datatype dt,
             MPI_Op op, MPI_Comm comm) {
    hpc_shim_tick();
    return PMPI_Scan(sbuf, rbuf, count, dt, op, comm);
}

} /* extern "C" */

#endif /* HPC_MPI_SHIM_H */
