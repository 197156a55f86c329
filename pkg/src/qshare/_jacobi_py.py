"""Pure-Python cyclic Jacobi kernel for complex Hermitian matrices.

Fallback for the compiled extension in ``qshare._jacobi``; both expose the
same ``cyclic_jacobi`` contract and must stay bit-for-bit interchangeable up
to round-off.
"""

import numpy as np


def cyclic_jacobi(a, v, off_tol, max_sweeps):
    """Diagonalize a Hermitian matrix in place by cyclic Jacobi rotations.

    Parameters
    ----------
    a : ndarray
        Complex Hermitian matrix, C-contiguous, modified in place.  On
        success the diagonal holds the (real) eigenvalues.
    v : ndarray
        Same-shape complex matrix, preinitialized to the identity; the
        accumulated unitary lands here (columns are eigenvectors).
    off_tol : float
        Convergence threshold on the off-diagonal Frobenius norm
        sqrt(sum of |a[p, q]|^2 over p != q).
    max_sweeps : int
        Upper bound on full cyclic sweeps.

    Returns
    -------
    int
        Number of sweeps performed, or -1 if the threshold was not reached
        within ``max_sweeps``.
    """
    n = a.shape[0]
    if n < 2:
        return 0
    # rotations this small cannot move the off-norm above off_tol
    skip = off_tol / (2.0 * n)
    iu = np.triu_indices(n, 1)

    def off_norm():
        return float(np.sqrt(2.0 * np.sum(np.abs(a[iu]) ** 2)))

    for sweep in range(max_sweeps):
        if off_norm() <= off_tol:
            return sweep
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                b = abs(apq)
                if b <= skip:
                    continue
                rotated = True
                ph = apq / b
                phc = ph.conjugate()
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * b)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp - (s * phc) * colq
                a[:, q] = s * colp + (c * phc) * colq
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = c * rowp - (s * ph) * rowq
                a[q, :] = s * rowp + (c * ph) * rowq
                # analytic values for the rotated 2x2 block
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = app - t * b
                a[q, q] = aqq + t * b
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - (s * phc) * vq
                v[:, q] = s * vp + (c * phc) * vq
        if not rotated:
            # every pair was below the skip cutoff, so the off-norm is
            # already under off_tol / 2
            return sweep + 1
    if off_norm() <= off_tol:
        return max_sweeps
    return -1
