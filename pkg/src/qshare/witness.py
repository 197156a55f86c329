"""Entanglement witnesses for the two-qubit channel outputs.

Both witnesses derive from theta = sx x sx - sy x sy + sz x sz; a negative
expectation Tr(W rho) certifies entanglement, a nonnegative one is
inconclusive on its own (the PPT oracle in :mod:`qshare.entanglement`
settles those cases on this family).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qmath
from .qmath import DensityMatrix, DimensionMismatchError

DETECT_TOL = 1e-12


@dataclass(frozen=True)
class WitnessOperator:
    """4x4 Hermitian observable with the Tr(W rho) < 0 detection convention."""

    name: str
    matrix: np.ndarray

    def __post_init__(self):
        mat = qmath.frozen_array(self.matrix)
        if mat.shape != (4, 4):
            raise DimensionMismatchError(f"witness must be 4x4, got {mat.shape}")
        if qmath.hermiticity_defect(mat) > 1e-12:
            raise ValueError("witness operator must be Hermitian")
        object.__setattr__(self, "matrix", mat)


def _theta() -> np.ndarray:
    return (
        qmath.tensor_product(qmath.SIGMA_X, qmath.SIGMA_X)
        - qmath.tensor_product(qmath.SIGMA_Y, qmath.SIGMA_Y)
        + qmath.tensor_product(qmath.SIGMA_Z, qmath.SIGMA_Z)
    )


def witness_w1() -> WitnessOperator:
    """W1 = (1/(2 sqrt(3))) (I - theta).

    Explicitly: diagonal (0, 1/sqrt3, 1/sqrt3, 0) with anti-diagonal corners
    -1/sqrt3.
    """
    mat = (np.eye(4) - _theta()) / (2.0 * np.sqrt(3.0))
    return WitnessOperator(name="W1", matrix=mat)


def witness_w2() -> WitnessOperator:
    """W2 = (1/2)(I - theta) = sqrt(3) W1; same detection verdicts."""
    mat = (np.eye(4) - _theta()) / 2.0
    return WitnessOperator(name="W2", matrix=mat)


def witness_expectation(w: WitnessOperator, rho: DensityMatrix) -> float:
    """Tr(W rho); the imaginary residue must stay below 1e-12."""
    if rho.dim != 4:
        raise DimensionMismatchError(f"need a two-qubit state, got dim {rho.dim}")
    val = complex(np.trace(w.matrix @ rho.matrix))
    if abs(val.imag) > 1e-12:
        raise ValueError(f"expectation has imaginary residue {val.imag:.3g}")
    return float(val.real)


def critical_concurrence(c: float) -> float:
    """Input-concurrence threshold (1 + c^2) / (4 c^2) for the channel at c.

    Defined on 1/sqrt(3) < c <= 1; below that the threshold exceeds 1 and no
    input state qualifies.  Strictly decreasing in c.
    """
    if c > 1.0 or c <= 1.0 / np.sqrt(3.0):
        raise ValueError(f"c must lie in (1/sqrt(3), 1], got {c}")
    return float((1.0 + c * c) / (4.0 * c * c))


def detects(w: WitnessOperator, rho: DensityMatrix, tol: float = DETECT_TOL) -> bool:
    """True iff the witness certifies entanglement: Tr(W rho) < -tol."""
    return witness_expectation(w, rho) < -tol
