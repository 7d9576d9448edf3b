/* Driver: distributed double-precision DFT; re and im are valid on
 * rank 0 only and the transform is checked on rank 0 against an
 * internal radix-2 reference, norm-relative. */
#include "hpc_harness.h"
#include <mpi.h>
#include "hpc_mpi_shim.h"

static void hpc_fft_reference(double *re, double *im, int n) {
    for (int i = 1, j = 0; i < n; i++) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j |= bit;
        if (i < j) {
            double tr = re[i]; re[i] = re[j]; re[j] = tr;
            double ti = im[i]; im[i] = im[j]; im[j] = ti;
        }
    }
    for (int len = 2; len <= n; len <<= 1) {
        double ang = -2.0 * M_PI / (double)len;
        double wr = cos(ang), wi = sin(ang);
        for (int i = 0; i < n; i += len) {
            double cr = 1.0, ci = 0.0;
            for (int j = 0; j < len / 2; j++) {
                int u = i + j, v = i + j + len / 2;
                double ur = re[u], ui = im[u];
                double vr = re[v] * cr - im[v] * ci;
                double vi = re[v] * ci + im[v] * cr;
                re[u] = ur + vr; im[u] = ui + vi;
                re[v] = ur - vr; im[v] = ui - vi;
                double t = cr * wr - ci * wi;
                ci = cr * wi + ci * wr;
                cr = t;
            }
        }
    }
}

//__CANDIDATE__//

int main(int argc, char **argv) {
    MPI_Init(&argc, &argv);
    int rank, size;
    PMPI_Comm_rank(MPI_COMM_WORLD, &rank);
    PMPI_Comm_size(MPI_COMM_WORLD, &size);

    const int n = 4096;
    double *re = (double *)malloc(sizeof(double) * n);
    double *im = (double *)malloc(sizeof(double) * n);
    double *rref = (double *)malloc(sizeof(double) * n);
    double *iref = (double *)malloc(sizeof(double) * n);
    if (!re || !im || !rref || !iref) return 1;
    if (rank == 0) {
        hpc_seed(0xFF7ULL);
        hpc_fill(re, n);
        hpc_fill(im, n);
        memcpy(rref, re, sizeof(double) * n);
        memcpy(iref, im, sizeof(double) * n);
        hpc_fft_reference(rref, iref, n);
    }

    PMPI_Barrier(MPI_COMM_WORLD);
    hpc_shim_start();
    double t0 = hpc_now();
    fft(re, im, n);
    double t1 = hpc_now();
    hpc_shim_stop();

    int ok_local = 1;
    if (rank == 0) {
        double err = 0.0, norm = 0.0;
        for (int i = 0; i < n; i++) {
            double dr = re[i] - rref[i], di = im[i] - iref[i];
            err += dr * dr + di * di;
            norm += rref[i] * rref[i] + iref[i] * iref[i];
        }
        ok_local = norm > 0.0 && sqrt(err) <= HPC_TOL * sqrt(norm);
    }
    int ok = 0;
    PMPI_Reduce(&ok_local, &ok, 1, MPI_INT, MPI_LAND, 0, MPI_COMM_WORLD);
    long calls = hpc_shim_count(), total = 0;
    PMPI_Reduce(&calls, &total, 1, MPI_LONG, MPI_SUM, 0, MPI_COMM_WORLD);
    if (rank == 0) hpc_report(ok, 1, total, t1 - t0);
    free(re); free(im); free(rref); free(iref);
    MPI_Finalize();
    return 0;
}
