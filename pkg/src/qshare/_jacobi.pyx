# Cyclic Jacobi kernel for complex Hermitian matrices.  Mirrors
# qshare._jacobi_py.cyclic_jacobi; keep the two implementations in sync.

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def cyclic_jacobi(double complex[:, ::1] a, double complex[:, ::1] v,
                  double off_tol, int max_sweeps):
    """Diagonalize a Hermitian matrix in place by cyclic Jacobi rotations.

    Same contract as the pure-Python fallback: ``a`` is rotated toward
    diagonal form, the accumulated unitary is multiplied into ``v`` (which
    must start as the identity), and the return value is the number of
    sweeps used or -1 when ``off_tol`` was not reached in ``max_sweeps``.
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, i
    cdef int sweep
    cdef double off2, tol2, skip, b, tau, t, c, s, app, aqq
    cdef double complex apq, ph, phc, tp, tq
    cdef bint rotated

    if a.shape[1] != n or v.shape[0] != n or v.shape[1] != n:
        raise ValueError("matrix and accumulator must be square and same size")
    if n < 2:
        return 0
    skip = off_tol / (2.0 * n)
    tol2 = 0.5 * off_tol * off_tol

    for sweep in range(max_sweeps):
        off2 = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                off2 += apq.real * apq.real + apq.imag * apq.imag
        if off2 <= tol2:
            return sweep
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                b = sqrt(apq.real * apq.real + apq.imag * apq.imag)
                if b <= skip:
                    continue
                rotated = True
                ph = apq / b
                phc = ph.conjugate()
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * b)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                for i in range(n):
                    tp = a[i, p]
                    tq = a[i, q]
                    a[i, p] = c * tp - s * phc * tq
                    a[i, q] = s * tp + c * phc * tq
                for i in range(n):
                    tp = a[p, i]
                    tq = a[q, i]
                    a[p, i] = c * tp - s * ph * tq
                    a[q, i] = s * tp + c * ph * tq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = app - t * b
                a[q, q] = aqq + t * b
                for i in range(n):
                    tp = v[i, p]
                    tq = v[i, q]
                    v[i, p] = c * tp - s * phc * tq
                    v[i, q] = s * tp + c * phc * tq
        if not rotated:
            return sweep + 1
    off2 = 0.0
    for p in range(n - 1):
        for q in range(p + 1, n):
            apq = a[p, q]
            off2 += apq.real * apq.real + apq.imag * apq.imag
    if off2 <= tol2:
        return max_sweeps
    return -1
