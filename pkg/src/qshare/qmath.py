"""Dense complex-matrix kernel: tensor products, partial trace, a Hermitian
eigensolver, and density-matrix validation.

Matrices are carried as C-contiguous ``numpy`` arrays of ``complex128``
(row-major), which is the package-wide ``ComplexMatrix`` representation.
Equality is always tolerance-based; see :func:`matrices_close`.

The eigensolver is a cyclic Jacobi iteration.  A compiled extension is used
when present; set ``QSHARE_PURE_PYTHON=1`` to force the pure-Python fallback.
The active choice is exported as :data:`JACOBI_BACKEND`.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

if os.environ.get("QSHARE_PURE_PYTHON"):
    from . import _jacobi_py as _kernel

    JACOBI_BACKEND = "python"
else:
    try:
        from . import _jacobi as _kernel  # type: ignore[attr-defined]

        JACOBI_BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build environment
        from . import _jacobi_py as _kernel

        JACOBI_BACKEND = "python"

DEFAULT_TOL = 1e-10
JACOBI_OFF_THRESHOLD = 1e-14
JACOBI_MAX_SWEEPS = 100
MAX_DIM = 256


class DimensionMismatchError(ValueError):
    """Shapes or layouts are inconsistent with each other."""


class NotHermitianError(ValueError):
    """Matrix fails the Hermiticity check required by the operation."""


class DensityValidationError(ValueError):
    """Matrix is not a valid density matrix.

    Attributes
    ----------
    violation : str
        One of ``"hermiticity"``, ``"trace"``, ``"positivity"``.
    magnitude : float
        The measured size of the violation (max deviation from M†, the
        trace deficit, or the most negative eigenvalue).
    """

    def __init__(self, violation: str, magnitude: float, tol: float):
        self.violation = violation
        self.magnitude = magnitude
        super().__init__(
            f"{violation} violated: measured {magnitude:.6g} against tolerance {tol:.1g}"
        )


def as_matrix(m) -> np.ndarray:
    """Coerce to a C-contiguous complex128 2-D array (no copy if compliant)."""
    a = np.ascontiguousarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionMismatchError(f"expected a 2-D matrix, got ndim={a.ndim}")
    return a


def frozen_array(m, dtype=np.complex128) -> np.ndarray:
    """Return a read-only C-contiguous copy, for use in immutable dataclasses."""
    a = np.array(m, dtype=dtype, order="C")
    a.setflags(write=False)
    return a


def dagger(m) -> np.ndarray:
    return as_matrix(m).conj().T


def matrices_close(a, b, tol: float) -> bool:
    """Entrywise equality within an absolute tolerance."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        return False
    return bool(np.max(np.abs(a - b)) <= tol)


def hermiticity_defect(m) -> float:
    """Max-norm distance from the Hermitian part, ``max|M - M†|``."""
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"square matrix required, got {a.shape}")
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0

def is_hermitian(m, tol: float = DEFAULT_TOL) -> bool:
    return hermiticity_defect(m) <= tol


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product with (a⊗b)[ir+k, jc+l] = a[i,j] b[k,l]."""
    return np.kron(as_matrix(a), as_matrix(b))


def tensor(*factors) -> np.ndarray:
    """Left-folded tensor_product of one or more matrices."""
    if not factors:
        raise ValueError("tensor() needs at least one factor")
    out = as_matrix(factors[0])
    for f in factors[1:]:
        out = np.kron(out, as_matrix(f))
    return out


def basis_ket(index: int, dim: int) -> np.ndarray:
    """Computational-basis column vector |index⟩ in the given dimension."""
    if not 0 <= index < dim:
        raise IndexError(f"basis index {index} out of range for dim {dim}")
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return v


def outer(ket_a, ket_b=None) -> np.ndarray:
    """|a⟩⟨b| from 1-D amplitude vectors (⟨a| itself when b omitted)."""
    a = np.asarray(ket_a, dtype=np.complex128).reshape(-1)
    b = a if ket_b is None else np.asarray(ket_b, dtype=np.complex128).reshape(-1)
    return np.outer(a, b.conj())


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered subsystem dimensions for a tensor-product space.

    The package-wide slot convention for the four-party channel output is
    (slot 0, 1, 2, 3) = (system qubit 1, environment qubit 3, system qubit 2,
    environment qubit 4).
    """

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"subsystem dims must be positive, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def total(self) -> int:
        out = 1
        for d in self.dims:
            out *= d
        return out

    def check_matches(self, dim: int):
        if self.total != dim:
            raise DimensionMismatchError(
                f"layout {self.dims} spans dimension {self.total}, matrix has {dim}"
            )


def partial_trace(m, layout: SubsystemLayout, keep) -> np.ndarray:
    """Trace out all subsystems not listed in ``keep``.

    Parameters
    ----------
    m : array_like
        Square matrix on the full tensor space.
    layout : SubsystemLayout
        Subsystem dimensions, slot 0 first.
    keep : iterable of int
        0-based slots to retain; the result lives on them in ascending
        slot order.

    Returns
    -------
    ndarray
        Reduced matrix; the trace of the input is preserved.
    """
    a = as_matrix(m)
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"square matrix required, got {a.shape}")
    layout.check_matches(n)
    nsub = len(layout.dims)
    keep_sorted = sorted(set(int(i) for i in keep))
    if not keep_sorted:
        raise ValueError("keep must name at least one subsystem")
    if keep_sorted[0] < 0 or keep_sorted[-1] >= nsub:
        raise IndexError(f"keep indices {keep_sorted} out of range for {nsub} subsystems")

    t = a.reshape(layout.dims + layout.dims)
    # pair bra/ket axes of traced slots, give kept slots fresh output axes
    in_row = list(range(nsub))
    in_col = list(range(nsub))
    nxt = nsub
    for slot in range(nsub):
        if slot in keep_sorted:
            in_col[slot] = nxt
            nxt += 1
    out = [in_row[s] for s in keep_sorted] + [in_col[s] for s in keep_sorted]
    reduced = np.einsum(t, in_row + in_col, out)
    dk = 1
    for s in keep_sorted:
        dk *= layout.dims[s]
    return np.ascontiguousarray(reduced.reshape(dk, dk))


def partial_transpose(m, layout: SubsystemLayout, subsystem: int) -> np.ndarray:
    """Transpose one tensor slot of a square matrix (for the PPT test)."""
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"square matrix required, got {a.shape}")
    layout.check_matches(a.shape[0])
    nsub = len(layout.dims)
    if not 0 <= subsystem < nsub:
        raise IndexError(f"subsystem {subsystem} out of range for {nsub} subsystems")
    t = a.reshape(layout.dims + layout.dims)
    t = np.swapaxes(t, subsystem, nsub + subsystem)
    return np.ascontiguousarray(t.reshape(a.shape))


def hermitian_eigensystem(m, tol: float = DEFAULT_TOL):
    """Full eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    Parameters
    ----------
    m : array_like
        Square matrix, Hermitian within ``tol``.
    tol : float
        Hermiticity acceptance threshold (the computation itself always runs
        at the kernel threshold of 1e-14 on the off-diagonal norm, scaled by
        the Frobenius norm when that exceeds 1).

    Returns
    -------
    (ndarray, ndarray)
        Real eigenvalues in descending order and the matching orthonormal
        eigenvector columns.

    Raises
    ------
    NotHermitianError
        If ``max|m - m†|`` exceeds ``tol``.
    ArithmeticError
        If the sweep budget is exhausted before convergence.
    """
    a = as_matrix(m)
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"square matrix required, got {a.shape}")
    if n > MAX_DIM:
        raise DimensionMismatchError(f"dimension {n} exceeds the supported {MAX_DIM}")
    defect = hermiticity_defect(a)
    if defect > tol:
        raise NotHermitianError(
            f"matrix is not Hermitian: max|M - M†| = {defect:.6g} > {tol:.1g}"
        )
    work = np.ascontiguousarray((a + a.conj().T) / 2.0)
    vecs = np.eye(n, dtype=np.complex128)
    scale = float(np.linalg.norm(work))
    off_tol = JACOBI_OFF_THRESHOLD * max(1.0, scale)
    sweeps = _kernel.cyclic_jacobi(work, vecs, off_tol, JACOBI_MAX_SWEEPS)
    if sweeps < 0:
        raise ArithmeticError(
            f"Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps (n={n})"
        )
    vals = np.diag(work).real.copy()
    order = np.argsort(-vals, kind="stable")
    return vals[order], np.ascontiguousarray(vecs[:, order])


def hermitian_eigenvalues(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Descending real eigenvalues of a Hermitian matrix."""
    vals, _ = hermitian_eigensystem(m, tol)
    return vals


def trace_norm(m, tol: float = DEFAULT_TOL) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix, ‖m‖₁."""
    return float(np.sum(np.abs(hermitian_eigenvalues(m, tol))))


def psd_sqrt(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Hermitian square root of a PSD matrix; round-off negatives are clipped."""
    vals, vecs = hermitian_eigensystem(m, tol)
    if vals[-1] < -tol:
        raise ValueError(f"matrix is not PSD: min eigenvalue {vals[-1]:.6g}")
    root = np.sqrt(np.clip(vals, 0.0, None))
    return (vecs * root) @ vecs.conj().T


@dataclass(frozen=True)
class DensityMatrix:
    """Validated quantum state: Hermitian, unit-trace, PSD square matrix.

    Construct through :func:`validate_density_matrix`; direct construction
    only checks shape consistency.
    """

    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        mat = frozen_array(self.matrix)
        if mat.ndim != 2 or mat.shape != (self.dim, self.dim):
            raise DimensionMismatchError(
                f"matrix shape {mat.shape} does not match dim {self.dim}"
            )
        object.__setattr__(self, "matrix", mat)

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


def validate_density_matrix(m, tol: float = DEFAULT_TOL) -> DensityMatrix:
    """Check Hermiticity, unit trace, and positivity; wrap into DensityMatrix.

    Raises
    ------
    DensityValidationError
        Naming the first violated invariant and its measured magnitude.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"square matrix required, got {a.shape}")
    defect = hermiticity_defect(a)
    if defect > tol:
        raise DensityValidationError("hermiticity", defect, tol)
    tr_defect = abs(complex(np.trace(a)) - 1.0)
    if tr_defect > tol:
        raise DensityValidationError("trace", tr_defect, tol)
    herm = (a + a.conj().T) / 2.0
    vals = hermitian_eigenvalues(herm, tol)
    if vals[-1] < -tol:
        raise DensityValidationError("positivity", float(vals[-1]), tol)
    return DensityMatrix(dim=a.shape[0], matrix=a)


IDENTITY_2 = frozen_array(np.eye(2))
SIGMA_X = frozen_array([[0, 1], [1, 0]])
SIGMA_Y = frozen_array([[0, -1j], [1j, 0]])
SIGMA_Z = frozen_array([[1, 0], [0, -1]])
