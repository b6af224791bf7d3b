# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled distance kernels for the Monte-Carlo estimator.

Same contracts as :mod:`qgeom._pykernels`.  All loops run without the GIL
so callers may fan batches out over threads.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, hypot
from libc.stdlib cimport malloc, free

cnp.import_array()

DEF MAXD = 16

cdef double INV_SQRT2 = 0.70710678118654752440


cdef int _jacobi_eigvals(double[:, ::1] ar, double[:, ::1] ai, int d, double tol,
                         int max_sweeps, double* out) noexcept nogil:
    """Cyclic Jacobi on a Hermitian matrix stored as real/imag parts (overwritten).

    Writes ascending eigenvalues to ``out``; returns 0 on success, 1 if not converged.
    """
    cdef int sweep, p, q, k
    cdef double off, r, cph, sph, theta, t, c, s, gr, gi, hr, hi, tmp
    cdef int converged = 0
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(d):
            for q in range(p + 1, d):
                off += ar[p, q] * ar[p, q] + ai[p, q] * ai[p, q]
        if 2.0 * off <= tol * tol:
            converged = 1
            break
        for p in range(d):
            for q in range(p + 1, d):
                r = hypot(ar[p, q], ai[p, q])
                if r == 0.0:
                    continue
                # phase e^{-i phi} = conj(a_pq) / r applied to column q / row q
                cph = ar[p, q] / r
                sph = -ai[p, q] / r
                for k in range(d):
                    if k == q:
                        continue
                    # A'_kq = A_kq e^{-i phi}
                    gr = ar[k, q]
                    gi = ai[k, q]
                    ar[k, q] = gr * cph - gi * sph
                    ai[k, q] = gr * sph + gi * cph
                    ar[q, k] = ar[k, q]
                    ai[q, k] = -ai[k, q]
                theta = (ar[q, q] - ar[p, p]) / (2.0 * r)
                t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                ar[p, p] -= t * r
                ar[q, q] += t * r
                ar[p, q] = 0.0
                ai[p, q] = 0.0
                ar[q, p] = 0.0
                ai[q, p] = 0.0
                ai[p, p] = 0.0
                ai[q, q] = 0.0
                for k in range(d):
                    if k == p or k == q:
                        continue
                    gr = ar[k, p]
                    gi = ai[k, p]
                    hr = ar[k, q]
                    hi = ai[k, q]
                    ar[k, p] = c * gr - s * hr
                    ai[k, p] = c * gi - s * hi
                    ar[k, q] = s * gr + c * hr
                    ai[k, q] = s * gi + c * hi
                    ar[p, k] = ar[k, p]
                    ai[p, k] = -ai[k, p]
                    ar[q, k] = ar[k, q]
                    ai[q, k] = -ai[k, q]
    for k in range(d):
        out[k] = ar[k, k]
    # insertion sort, ascending
    for p in range(1, d):
        tmp = out[p]
        k = p - 1
        while k >= 0 and out[k] > tmp:
            out[k + 1] = out[k]
            k -= 1
        out[k + 1] = tmp
    return 0 if converged else 1


cdef double _simplex_residual_sq(double* lam, int d) noexcept nogil:
    """Squared distance from ascending ``lam`` to the probability simplex."""
    cdef double csum = 0.0, tau = 0.0, u, res = 0.0, y
    cdef int j, rho = 0
    # walk from the largest entry down
    for j in range(d):
        u = lam[d - 1 - j]
        csum += u
        if u - (csum - 1.0) / (j + 1) > 0.0:
            rho = j + 1
            tau = (csum - 1.0) / (j + 1)
    for j in range(d):
        y = lam[j] - tau
        if y < 0.0:
            y = 0.0
        res += (lam[j] - y) * (lam[j] - y)
    return res


def hermitian_eigvalsh(re, im, double tol=1e-12, int max_sweeps=60):
    """Ascending eigenvalues of a batch of Hermitian matrices (N, d, d)."""
    cdef double[:, :, ::1] R = np.array(re, dtype=np.float64, order="C", copy=True)
    cdef double[:, :, ::1] I = np.array(im, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t N = R.shape[0], n
    cdef int d = R.shape[1]
    if d > MAXD:
        raise ValueError("matrix size above compiled limit")
    out = np.empty((N, d), dtype=np.float64)
    cdef double[:, ::1] O = out
    cdef int bad = 0
    with nogil:
        for n in range(N):
            bad += _jacobi_eigvals(R[n], I[n], d, tol, max_sweeps, &O[n, 0])
    if bad:
        raise ArithmeticError(f"Jacobi eigensolver did not converge for {bad} matrices")
    return out


def project_simplex(X):
    """Euclidean projection of each row onto the probability simplex."""
    cdef double[:, ::1] A = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t N = A.shape[0], n
    cdef int d = A.shape[1], j, rho
    out = np.empty((N, d), dtype=np.float64)
    cdef double[:, ::1] O = out
    cdef double buf[MAXD * 8]
    cdef double csum, tau, u, tmp
    cdef int k, p
    if d > MAXD * 8:
        raise ValueError("dimension above compiled limit")
    with nogil:
        for n in range(N):
            for j in range(d):
                buf[j] = A[n, j]
            for p in range(1, d):
                tmp = buf[p]
                k = p - 1
                while k >= 0 and buf[k] < tmp:
                    buf[k + 1] = buf[k]
                    k -= 1
                buf[k + 1] = tmp
            csum = 0.0
            tau = 0.0
            for j in range(d):
                csum += buf[j]
                u = buf[j] - (csum - 1.0) / (j + 1)
                if u > 0.0:
                    tau = (csum - 1.0) / (j + 1)
            for j in range(d):
                u = A[n, j] - tau
                O[n, j] = u if u > 0.0 else 0.0
    return out


cdef void _coords_to_hermitian(const double[::1] x, int d, double[:, ::1] ar,
                               double[:, ::1] ai) noexcept nogil:
    cdef int j, k, l, idx = 0
    cdef double v, dg
    for j in range(d):
        for k in range(d):
            ar[j, k] = 0.0
            ai[j, k] = 0.0
        ar[j, j] = 1.0 / d
    for j in range(d):
        for k in range(j + 1, d):
            v = x[idx] * INV_SQRT2
            ar[j, k] += v
            ar[k, j] += v
            idx += 1
    for j in range(d):
        for k in range(j + 1, d):
            v = x[idx] * INV_SQRT2
            ai[j, k] -= v
            ai[k, j] += v
            idx += 1
    for l in range(1, d):
        dg = x[idx] / sqrt(<double>(l * (l + 1)))
        for j in range(l):
            ar[j, j] += dg
        ar[l, l] -= l * dg
        idx += 1


def statespace_distances(coords, int d, double tol=1e-12, int max_sweeps=60):
    """Hilbert-Schmidt distance from I/d + sum x_i B_i to the density matrices."""
    cdef double[:, ::1] X = np.ascontiguousarray(coords, dtype=np.float64)
    cdef Py_ssize_t N = X.shape[0], n
    if X.shape[1] != d * d - 1:
        raise ValueError("coordinate dimension must be d^2 - 1")
    if d > MAXD:
        raise ValueError("matrix size above compiled limit")
    out = np.empty(N, dtype=np.float64)
    cdef double[::1] O = out
    cdef double[:, ::1] ar = np.empty((d, d))
    cdef double[:, ::1] ai = np.empty((d, d))
    cdef double lam[MAXD]
    cdef int bad = 0
    with nogil:
        for n in range(N):
            _coords_to_hermitian(X[n], d, ar, ai)
            bad += _jacobi_eigvals(ar, ai, d, tol, max_sweeps, lam)
            O[n] = sqrt(_simplex_residual_sq(lam, d))
    if bad:
        raise ArithmeticError(f"Jacobi eigensolver did not converge for {bad} matrices")
    return out


# --- Wolfe min-norm point ---------------------------------------------------

cdef int _solve_bordered(double* K, double* rhs, int k) noexcept nogil:
    """Gaussian elimination with partial pivoting on a (k x k) row-major system."""
    cdef int i, j, r, piv
    cdef double best, f, tmp
    for i in range(k):
        piv = i
        best = fabs(K[i * k + i])
        for r in range(i + 1, k):
            if fabs(K[r * k + i]) > best:
                best = fabs(K[r * k + i])
                piv = r
        if best < 1e-300:
            return 1
        if piv != i:
            for j in range(k):
                tmp = K[i * k + j]
                K[i * k + j] = K[piv * k + j]
                K[piv * k + j] = tmp
            tmp = rhs[i]
            rhs[i] = rhs[piv]
            rhs[piv] = tmp
        for r in range(i + 1, k):
            f = K[r * k + i] / K[i * k + i]
            if f != 0.0:
                for j in range(i, k):
                    K[r * k + j] -= f * K[i * k + j]
                rhs[r] -= f * rhs[i]
    for i in range(k - 1, -1, -1):
        tmp = rhs[i]
        for j in range(i + 1, k):
            tmp -= K[i * k + j] * rhs[j]
        rhs[i] = tmp / K[i * k + i]
    return 0


cdef double _dot(double* a, double* b, int n) noexcept nogil:
    cdef double s = 0.0
    cdef int i
    for i in range(n):
        s += a[i] * b[i]
    return s


cdef int _wolfe(double* P, int m, int n, double tol, int max_iter, double weight_tol,
                int* S, double* lam, double* alpha, double* K, double* rhs,
                double* x, double* g, double* dist) noexcept nogil:
    """Min-norm point of conv(rows of P).  Returns 0 ok, 1 iteration cap, 2 singular."""
    cdef int i, j, it, s, kk, sz, jbest, found, drop
    cdef double best, nrm, scale = 0.0, gap, theta, ratio, tot, xx
    cdef int status = 1
    jbest = 0
    best = 1e308
    for i in range(m):
        nrm = _dot(&P[i * n], &P[i * n], n)
        if nrm > scale:
            scale = nrm
        if nrm < best:
            best = nrm
            jbest = i
    if scale < 1e-300:
        scale = 1e-300
    sz = 1
    S[0] = jbest
    lam[0] = 1.0
    for i in range(n):
        x[i] = P[jbest * n + i]
    for it in range(max_iter):
        xx = _dot(x, x, n)
        best = 1e308
        jbest = 0
        for j in range(m):
            g[j] = _dot(&P[j * n], x, n)
            if g[j] < best:
                best = g[j]
                jbest = j
        gap = xx - best
        found = 0
        for s in range(sz):
            if S[s] == jbest:
                found = 1
        if gap <= tol * scale or found:
            status = 0
            break
        S[sz] = jbest
        lam[sz] = 0.0
        sz += 1
        while True:
            kk = sz + 1
            for i in range(sz):
                for j in range(i, sz):
                    K[i * kk + j] = _dot(&P[S[i] * n], &P[S[j] * n], n)
                    K[j * kk + i] = K[i * kk + j]
                K[i * kk + sz] = 1.0
                K[sz * kk + i] = 1.0
                rhs[i] = 0.0
            K[sz * kk + sz] = 0.0
            rhs[sz] = 1.0
            if _solve_bordered(K, rhs, kk):
                dist[0] = sqrt(xx)
                return 2
            found = 1
            for i in range(sz):
                alpha[i] = rhs[i]
                if alpha[i] <= weight_tol:
                    found = 0
            if found:
                for i in range(sz):
                    lam[i] = alpha[i]
                break
            theta = 1.0
            for i in range(sz):
                if alpha[i] <= weight_tol and lam[i] - alpha[i] > 0.0:
                    ratio = lam[i] / (lam[i] - alpha[i])
                    if ratio < theta:
                        theta = ratio
            if theta < 0.0:
                theta = 0.0
            for i in range(sz):
                lam[i] = lam[i] + theta * (alpha[i] - lam[i])
            # drop vanishing weights; always drop at least one
            drop = 0
            for i in range(sz):
                if lam[i] <= weight_tol:
                    drop += 1
            if drop == 0:
                best = 1e308
                jbest = 0
                for i in range(sz):
                    if lam[i] < best:
                        best = lam[i]
                        jbest = i
                lam[jbest] = 0.0
            j = 0
            tot = 0.0
            for i in range(sz):
                if lam[i] > weight_tol:
                    S[j] = S[i]
                    lam[j] = lam[i]
                    tot += lam[i]
                    j += 1
            sz = j
            for i in range(sz):
                lam[i] /= tot
        for i in range(n):
            x[i] = 0.0
        for s in range(sz):
            for i in range(n):
                x[i] += lam[s] * P[S[s] * n + i]
    dist[0] = sqrt(_dot(x, x, n))
    return status


def polytope_distances(points, vertices, double tol=1e-12, int max_iter=100000,
                       double weight_tol=1e-15):
    """Distance from each row of ``points`` to conv(vertices) via Wolfe's algorithm."""
    cdef double[:, ::1] X = np.ascontiguousarray(points, dtype=np.float64)
    cdef double[:, ::1] V = np.ascontiguousarray(vertices, dtype=np.float64)
    cdef Py_ssize_t N = X.shape[0], q
    cdef int m = V.shape[0], n = V.shape[1], i, j, st
    if X.shape[1] != n:
        raise ValueError("points and vertices differ in dimension")
    out = np.empty(N, dtype=np.float64)
    cdef double[::1] O = out
    cdef double* P = <double*> malloc(m * n * sizeof(double))
    cdef int* S = <int*> malloc((m + 2) * sizeof(int))
    cdef double* lam = <double*> malloc((m + 2) * sizeof(double))
    cdef double* alpha = <double*> malloc((m + 2) * sizeof(double))
    cdef double* K = <double*> malloc((m + 3) * (m + 3) * sizeof(double))
    cdef double* rhs = <double*> malloc((m + 3) * sizeof(double))
    cdef double* x = <double*> malloc(n * sizeof(double))
    cdef double* g = <double*> malloc(m * sizeof(double))
    cdef int capped = 0, singular = 0
    if not (P and S and lam and alpha and K and rhs and x and g):
        raise MemoryError()
    try:
        with nogil:
            for q in range(N):
                for i in range(m):
                    for j in range(n):
                        P[i * n + j] = V[i, j] - X[q, j]
                st = _wolfe(P, m, n, tol, max_iter, weight_tol, S, lam, alpha, K, rhs,
                            x, g, &O[q])
                if st == 1:
                    capped += 1
                elif st == 2:
                    singular += 1
    finally:
        free(P); free(S); free(lam); free(alpha); free(K); free(rhs); free(x); free(g)
    if capped:
        raise ArithmeticError(f"min-norm iteration cap exceeded for {capped} points")
    return out
