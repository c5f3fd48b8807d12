# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels.  Mirrors the signatures of ``llgfrac._fallback``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

NAME = "compiled"


cdef inline double _lap_at(const double[:, ::1] u, Py_ssize_t i, Py_ssize_t j,
                           Py_ssize_t n, bint periodic) noexcept nogil:
    cdef Py_ssize_t im, ip
    if periodic:
        im = i - 1 if i > 0 else n - 1
        ip = i + 1 if i < n - 1 else 0
    else:
        im = i - 1 if i > 0 else 1
        ip = i + 1 if i < n - 1 else n - 2
    return u[im, j] - 2.0 * u[i, j] + u[ip, j]


cdef void _lap1d_col(const double* u, double* out, Py_ssize_t n, double inv_h2,
                     bint periodic) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(1, n - 1):
        out[i] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_h2
    if periodic:
        out[0] = (u[n - 1] - 2.0 * u[0] + u[1]) * inv_h2
        out[n - 1] = (u[n - 2] - 2.0 * u[n - 1] + u[0]) * inv_h2
    else:
        out[0] = 2.0 * (u[1] - u[0]) * inv_h2
        out[n - 1] = 2.0 * (u[n - 2] - u[n - 1]) * inv_h2


def laplacian_1d(u, double h, bint periodic):
    arr = np.ascontiguousarray(u, dtype=np.float64)
    shape = arr.shape
    cdef const double[:, ::1] v = arr.reshape(shape[0], -1)
    cdef Py_ssize_t n = v.shape[0], k = v.shape[1], i, j
    out = np.empty((n, k))
    cdef double[:, ::1] o = out
    cdef double inv_h2 = 1.0 / (h * h)
    with nogil:
        for i in range(n):
            for j in range(k):
                o[i, j] = _lap_at(v, i, j, n, periodic) * inv_h2
    return out.reshape(shape)


def laplacian_3d(u, double h, bint periodic):
    arr = np.ascontiguousarray(u, dtype=np.float64)
    shape = arr.shape
    cdef Py_ssize_t n = shape[0]
    cdef const double[:, ::1] v = arr.reshape(n * n * n, -1)
    cdef Py_ssize_t k = v.shape[1]
    out = np.empty((n * n * n, k))
    cdef double[:, ::1] o = out
    cdef double inv_h2 = 1.0 / (h * h)
    cdef Py_ssize_t x, y, z, c, xm, xp, ym, yp, zm, zp, idx, s1 = n * n, s2 = n
    cdef double centre
    with nogil:
        for x in range(n):
            if periodic:
                xm = x - 1 if x > 0 else n - 1
                xp = x + 1 if x < n - 1 else 0
            else:
                xm = x - 1 if x > 0 else 1
                xp = x + 1 if x < n - 1 else n - 2
            for y in range(n):
                if periodic:
                    ym = y - 1 if y > 0 else n - 1
                    yp = y + 1 if y < n - 1 else 0
                else:
                    ym = y - 1 if y > 0 else 1
                    yp = y + 1 if y < n - 1 else n - 2
                for z in range(n):
                    if periodic:
                        zm = z - 1 if z > 0 else n - 1
                        zp = z + 1 if z < n - 1 else 0
                    else:
                        zm = z - 1 if z > 0 else 1
                        zp = z + 1 if z < n - 1 else n - 2
                    idx = x * s1 + y * s2 + z
                    for c in range(k):
                        centre = v[idx, c]
                        o[idx, c] = ((v[xm * s1 + y * s2 + z, c] - 2.0 * centre + v[xp * s1 + y * s2 + z, c])
                                     + (v[x * s1 + ym * s2 + z, c] - 2.0 * centre + v[x * s1 + yp * s2 + z, c])
                                     + (v[x * s1 + y * s2 + zm, c] - 2.0 * centre + v[x * s1 + y * s2 + zp, c])) * inv_h2
    return out.reshape(shape)


cdef class _Tridiag:
    """Factorised ``I - dt*Lap`` on a 1D grid (Neumann mirror or cyclic)."""

    cdef Py_ssize_t n
    cdef double r, diag, gamma, fact
    cdef bint periodic
    cdef double[::1] cp, denom, z, work

    def __init__(self, Py_ssize_t n, double r, bint periodic):
        cdef Py_ssize_t i
        cdef double a, c, b, den
        self.n = n
        self.r = r
        self.periodic = periodic
        self.diag = 1.0 + 2.0 * r
        self.cp = np.empty(n)
        self.denom = np.empty(n)
        self.z = np.zeros(n)
        self.work = np.empty(n)
        self.gamma = -self.diag
        for i in range(n):
            a = 0.0 if i == 0 else self._sub(i)
            b = self._main(i)
            c = self._sup(i)
            den = b if i == 0 else b - a * self.cp[i - 1]
            self.denom[i] = den
            self.cp[i] = c / den
        if periodic:
            self.z[0] = self.gamma
            self.z[n - 1] = -r
            self._solve_inplace(&self.z[0])
            self.fact = 1.0 + self.z[0] + (-r / self.gamma) * self.z[n - 1]

    cdef inline double _main(self, Py_ssize_t i) noexcept nogil:
        if self.periodic:
            if i == 0:
                return self.diag - self.gamma
            if i == self.n - 1:
                return self.diag - self.r * self.r / self.gamma
        return self.diag

    cdef inline double _sub(self, Py_ssize_t i) noexcept nogil:
        if not self.periodic and i == self.n - 1:
            return -2.0 * self.r
        return -self.r

    cdef inline double _sup(self, Py_ssize_t i) noexcept nogil:
        if i == self.n - 1:
            return 0.0
        if not self.periodic and i == 0:
            return -2.0 * self.r
        return -self.r

    cdef void _solve_inplace(self, double* d) noexcept nogil:
        cdef Py_ssize_t i, n = self.n
        d[0] = d[0] / self.denom[0]
        for i in range(1, n):
            d[i] = (d[i] - self._sub(i) * d[i - 1]) / self.denom[i]
        for i in range(n - 2, -1, -1):
            d[i] = d[i] - self.cp[i] * d[i + 1]

    cdef void solve(self, double* d) noexcept nogil:
        cdef Py_ssize_t i, n = self.n
        cdef double vy
        self._solve_inplace(d)
        if self.periodic:
            vy = (d[0] + (-self.r / self.gamma) * d[n - 1]) / self.fact
            for i in range(n):
                d[i] = d[i] - vy * self.z[i]


def helmholtz_1d(m, double dt, double h, bint periodic):
    arr = np.ascontiguousarray(m, dtype=np.float64)
    if dt == 0.0:
        return arr.copy()
    shape = arr.shape
    cdef const double[:, ::1] v = arr.reshape(shape[0], -1)
    cdef Py_ssize_t n = v.shape[0], k = v.shape[1], i, j
    cdef _Tridiag T = _Tridiag(n, dt / (h * h), periodic)
    out = np.empty((n, k))
    cdef double[:, ::1] o = out
    cdef double[::1] col = np.empty(n)
    for j in range(k):
        for i in range(n):
            col[i] = v[i, j]
        T.solve(&col[0])
        for i in range(n):
            o[i, j] = col[i]
    return out.reshape(shape)


cdef inline void _cramer(double a, double b, double c, double p, double q, double s,
                         double* x) noexcept nogil:
    cdef double det = 1.0 + a * a + b * b + c * c
    x[0] = (p * (1.0 + a * a) - q * (c - a * b) + s * (a * c + b)) / det
    x[1] = (p * (a * b + c) + q * (1.0 + b * b) - s * (a - b * c)) / det
    x[2] = (p * (a * c - b) + q * (a + b * c) + s * (1.0 + c * c)) / det


def cramer_solve(k, rhs):
    k_arr, rhs_arr = np.broadcast_arrays(np.asarray(k, dtype=np.float64),
                                         np.asarray(rhs, dtype=np.float64))
    shape = k_arr.shape
    cdef const double[:, ::1] kk = np.ascontiguousarray(k_arr).reshape(-1, 3)
    cdef const double[:, ::1] rr = np.ascontiguousarray(rhs_arr).reshape(-1, 3)
    cdef Py_ssize_t N = kk.shape[0], i
    out = np.empty((N, 3))
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(N):
            _cramer(kk[i, 0], kk[i, 1], kk[i, 2], rr[i, 0], rr[i, 1], rr[i, 2], &o[i, 0])
    return out.reshape(shape)


def fractional_step_1d(m, double dt, double alpha, double h, bint periodic, f=None):
    """One Gauss-Seidel fractional step on a 1D grid, fused into a single pass per stage."""
    cdef const double[:, ::1] mm = np.ascontiguousarray(m, dtype=np.float64)
    cdef Py_ssize_t n = mm.shape[0], i
    cdef bint forced = f is not None
    cdef const double[:, ::1] ff = np.ascontiguousarray(f if forced else np.zeros((1, 3)), dtype=np.float64)
    cdef double beta = 0.5 * dt, inv_h2 = 1.0 / (h * h)
    cdef _Tridiag T = _Tridiag(n, dt * inv_h2, periodic)

    cdef double[:, ::1] g = np.empty((3, n))
    cdef double[:, ::1] lg = np.empty((3, n))
    cdef double[::1] col = np.empty(n)
    cdef double[::1] lg1n = np.empty(n)
    cdef double[::1] lg2n = np.empty(n)
    out = np.empty((n, 3))
    cdef double[:, ::1] o = out

    cdef double m1, m2, m3, L1, L2, L3, L1n, L2n, h1, h2, h3, H1, H2, H3
    cdef double b1, b2, b3, f1 = 0.0, f2 = 0.0, f3 = 0.0, x3, r1, r2, det
    cdef int c

    with nogil:
        for c in range(3):
            for i in range(n):
                g[c, i] = mm[i, c]
            if dt != 0.0:
                T.solve(&g[c, 0])
            _lap1d_col(&g[c, 0], &lg[c, 0], n, inv_h2, periodic)

        # stage 1: rows 2 and 3 are identity, row 1 back-substitutes
        for i in range(n):
            m1 = mm[i, 0]; m2 = mm[i, 1]; m3 = mm[i, 2]
            L1 = lg[0, i]; L2 = lg[1, i]; L3 = lg[2, i]
            if forced:
                f1 = dt * ff[i, 0]; f2 = dt * ff[i, 1]; f3 = dt * ff[i, 2]
            h1 = L1 + alpha * (m2 * L3 - m3 * L2)
            h2 = L2 + alpha * (m3 * L1 - m1 * L3)
            h3 = L3 + alpha * (m1 * L2 - m2 * L1)
            b1 = m1 + beta * (h2 * m3 - h3 * m2) + f1
            b2 = m2 + beta * (h3 * m1 - h1 * m3) + f2
            b3 = m3 + beta * (h1 * m2 - h2 * m1) + f3
            col[i] = b1 - beta * h3 * b2 + beta * h2 * b3
        if dt != 0.0:
            T.solve(&col[0])
        _lap1d_col(&col[0], &lg1n[0], n, inv_h2, periodic)

        # stage 2: 2x2 block in components 1, 2
        for i in range(n):
            m1 = mm[i, 0]; m2 = mm[i, 1]; m3 = mm[i, 2]
            L1 = lg[0, i]; L2 = lg[1, i]; L3 = lg[2, i]; L1n = lg1n[i]
            if forced:
                f1 = dt * ff[i, 0]; f2 = dt * ff[i, 1]; f3 = dt * ff[i, 2]
            h2 = L2 + alpha * (m3 * L1 - m1 * L3)
            h3 = L3 + alpha * (m1 * L2 - m2 * L1)
            H1 = L1n + alpha * (m2 * L3 - m3 * L2)
            H2 = L2 + alpha * (m3 * L1n - m1 * L3)
            H3 = L3 + alpha * (m1 * L2 - m2 * L1n)
            b1 = m1 + beta * (H2 * m3 - H3 * m2) + f1
            b2 = m2 + beta * (H3 * m1 - H1 * m3) + f2
            b3 = m3 + beta * (H1 * m2 - H2 * m1) + f3
            x3 = b3
            r1 = b1 + beta * h2 * x3
            r2 = b2 - beta * H1 * x3
            det = 1.0 + beta * beta * h3 * h3
            col[i] = (r2 + beta * h3 * r1) / det
        if dt != 0.0:
            T.solve(&col[0])
        _lap1d_col(&col[0], &lg2n[0], n, inv_h2, periodic)

        # stage 3: full Cayley solve with mixed time levels
        for i in range(n):
            m1 = mm[i, 0]; m2 = mm[i, 1]; m3 = mm[i, 2]
            L1n = lg1n[i]; L2n = lg2n[i]; L3 = lg[2, i]
            if forced:
                f1 = dt * ff[i, 0]; f2 = dt * ff[i, 1]; f3 = dt * ff[i, 2]
            H1 = L1n + alpha * (m2 * L3 - m3 * L2n)
            H2 = L2n + alpha * (m3 * L1n - m1 * L3)
            H3 = L3 + alpha * (m1 * L2n - m2 * L1n)
            b1 = m1 + beta * (H2 * m3 - H3 * m2) + f1
            b2 = m2 + beta * (H3 * m1 - H1 * m3) + f2
            b3 = m3 + beta * (H1 * m2 - H2 * m1) + f3
            _cramer(beta * H1, beta * H2, beta * H3, b1, b2, b3, &o[i, 0])
    return out
