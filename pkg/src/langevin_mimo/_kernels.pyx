# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled sampler inner loops.

Same contract and arithmetic as ``_pykernels`` (which see), with the
trajectory/level/step loops in C.  All noise is pre-drawn by the caller, so
the two backends consume identical random streams.
"""

from libc.math cimport exp, sqrt
from libc.stdlib cimport free, malloc

NAME = "compiled"


cdef void _matvec(const double* a, const double* x, double* out, Py_ssize_t n) noexcept nogil:
    # out = A @ x, A row-major (n, n)
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += a[i * n + j] * x[j]
        out[i] = acc


cdef void _matvec_t(const double* a, const double* x, double* out, Py_ssize_t n) noexcept nogil:
    # out = A^T @ x, A row-major (n, n)
    cdef Py_ssize_t i, j
    cdef double xi
    for j in range(n):
        out[j] = 0.0
    for i in range(n):
        xi = x[i]
        for j in range(n):
            out[j] += a[i * n + j] * xi


cdef double _denoise_coord(double x, double two_sig2, const double* levels,
                           Py_ssize_t n_levels) noexcept nogil:
    # posterior-mean PAM level; max weight factored out for stability
    cdef Py_ssize_t k
    cdef double d, d2min, w, num, den
    d = x - levels[0]
    d2min = d * d
    for k in range(1, n_levels):
        d = x - levels[k]
        d = d * d
        if d < d2min:
            d2min = d
    num = 0.0
    den = 0.0
    for k in range(n_levels):
        d = x - levels[k]
        w = exp(-(d * d - d2min) / two_sig2)
        num += levels[k] * w
        den += w
    return num / den


cdef void _combined_score(const double* chi, const double* v_mat,
                          const double* s, const double* eta,
                          const double* inv_d, const signed char* flags,
                          double sig2, const double* levels, Py_ssize_t n_levels,
                          double* x_buf, double* pr_buf, double* out,
                          Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t j
    cdef double lik
    _matvec(v_mat, chi, x_buf, n)
    for j in range(n):
        pr_buf[j] = (_denoise_coord(x_buf[j], 2.0 * sig2, levels, n_levels)
                     - x_buf[j]) / sig2
    _matvec_t(v_mat, pr_buf, out, n)  # spectral prior
    for j in range(n):
        lik = s[j] * inv_d[j] * (eta[j] - s[j] * chi[j])
        if flags[j] == 0:
            pass  # prior only, already in out
        elif flags[j] == 1:
            out[j] += lik
        else:
            out[j] = lik


def evolve_underdamped(double[:, ::1] chi, double[:, ::1] vel,
                       double[:, :, :, ::1] noise,
                       double[:, ::1] v_mat, double[::1] s, double[::1] eta,
                       double[:, ::1] lambdas, double[:, ::1] inv_d,
                       signed char[:, ::1] flags, double[::1] sig2s,
                       double[::1] levels,
                       double h_over_m, double ou_a, double ou_noise):
    cdef Py_ssize_t n_traj = chi.shape[0]
    cdef Py_ssize_t n = chi.shape[1]
    cdef Py_ssize_t n_lev = lambdas.shape[0]
    cdef Py_ssize_t n_steps = noise.shape[2]
    cdef Py_ssize_t n_pam = levels.shape[0]
    cdef Py_ssize_t m, level, k, j
    cdef double sig2
    cdef const double* lam
    cdef const double* invd
    cdef const signed char* flg
    cdef double* work = <double*> malloc(3 * n * sizeof(double))
    if work == NULL:
        raise MemoryError()
    cdef double* x_buf = work
    cdef double* pr_buf = work + n
    cdef double* sc = work + 2 * n
    try:
        with nogil:
            for m in range(n_traj):
                for level in range(n_lev):
                    lam = &lambdas[level, 0]
                    invd = &inv_d[level, 0]
                    flg = &flags[level, 0]
                    sig2 = sig2s[level]
                    for k in range(n_steps):
                        for j in range(n):
                            chi[m, j] += h_over_m * vel[m, j]
                        _combined_score(&chi[m, 0], &v_mat[0, 0], &s[0],
                                        &eta[0], invd, flg, sig2,
                                        &levels[0], n_pam,
                                        x_buf, pr_buf, sc, n)
                        for j in range(n):
                            vel[m, j] = (ou_a * (vel[m, j] + lam[j] * sc[j])
                                         + ou_noise * lam[j] * noise[m, level, k, j])
    finally:
        free(work)


def evolve_overdamped(double[:, ::1] chi,
                      double[:, :, :, ::1] noise,
                      double[:, ::1] v_mat, double[::1] s, double[::1] eta,
                      double[:, ::1] lambdas, double[:, ::1] sqrt_lambdas,
                      double[:, ::1] inv_d,
                      signed char[:, ::1] flags, double[::1] sig2s,
                      double[::1] levels,
                      double sqrt_2tau):
    cdef Py_ssize_t n_traj = chi.shape[0]
    cdef Py_ssize_t n = chi.shape[1]
    cdef Py_ssize_t n_lev = lambdas.shape[0]
    cdef Py_ssize_t n_steps = noise.shape[2]
    cdef Py_ssize_t n_pam = levels.shape[0]
    cdef Py_ssize_t m, level, k, j
    cdef double sig2
    cdef const double* lam
    cdef const double* sqlam
    cdef const double* invd
    cdef const signed char* flg
    cdef double* work = <double*> malloc(3 * n * sizeof(double))
    if work == NULL:
        raise MemoryError()
    cdef double* x_buf = work
    cdef double* pr_buf = work + n
    cdef double* sc = work + 2 * n
    try:
        with nogil:
            for m in range(n_traj):
                for level in range(n_lev):
                    lam = &lambdas[level, 0]
                    sqlam = &sqrt_lambdas[level, 0]
                    invd = &inv_d[level, 0]
                    flg = &flags[level, 0]
                    sig2 = sig2s[level]
                    for k in range(n_steps):
                        _combined_score(&chi[m, 0], &v_mat[0, 0], &s[0],
                                        &eta[0], invd, flg, sig2,
                                        &levels[0], n_pam,
                                        x_buf, pr_buf, sc, n)
                        for j in range(n):
                            chi[m, j] += (lam[j] * sc[j]
                                          + sqrt_2tau * sqlam[j] * noise[m, level, k, j])
    finally:
        free(work)
