/* Driver: in-place double-precision FFT, forward convention
 * X[k] = sum_j x[j] exp(-2 pi i j k / n), unnormalized, checked by
 * norm-relative error against an internal radix-2 reference. */
#include "hpc_harness.h"
#include <omp.h>

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

int main(void) {
    const int n = 1 << 18;
    double *re = (double *)malloc(sizeof(double) * n);
    double *im = (double *)malloc(sizeof(double) * n);
    double *rref = (double *)malloc(sizeof(double) * n);
    double *iref = (double *)malloc(sizeof(double) * n);
    if (!re || !im || !rref || !iref) return 1;
    hpc_seed(0xFF7ULL);
    hpc_fill(re, n);
    hpc_fill(im, n);
    memcpy(rref, re, sizeof(double) * n);
    memcpy(iref, im, sizeof(double) * n);
    hpc_fft_reference(rref, iref, n);

    omp_set_num_threads(4);
    int threads = hpc_task_count();
    double t0 = hpc_now();
    fft(re, im, n);
    double t1 = hpc_now();
    int after = hpc_task_count();
    if (after > threads) threads = after;

    double err = 0.0, norm = 0.0;
    for (int i = 0; i < n; i++) {
        double dr = re[i] - rref[i], di = im[i] - iref[i];
        err += dr * dr + di * di;
        norm += rref[i] * rref[i] + iref[i] * iref[i];
    }
    int ok = norm > 0.0 && sqrt(err) <= HPC_TOL * sqrt(norm);
    hpc_report(ok, threads, 0, t1 - t0);
    free(re); free(im); free(rref); free(iref);
    return 0;
}
