"""Cloning-style noisy environment for a pair of entangled qudits.

Each particle of a k x k pure state passes independently through the same
environment interaction

    |i>|0>_E |M> -> c |i,i>|X_i> + d sum_{j != i} (|i,j> + |j,i>) |X_j>

with unitarity c^2 + 2(k-1) d^2 = 1.  The module builds the four-party
output state (tensor slots 0..3 = sent qubit 1, its environment qubit,
sent qubit 2, its environment qubit), traces the ancilla register, and
provides the closed-form local/nonlocal reductions with their P, Q, R, S
coefficients for cross-validation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import qmath
from .entanglement import PureBipartiteState
from .qmath import DensityMatrix, DimensionMismatchError, SubsystemLayout

logger = logging.getLogger(__name__)

UNITARITY_TOL = 1e-12
MAX_FULL_K = 4

# slot pairs of the four-party output under the fixed convention
LOCAL_SLOTS = (0, 1)
NONLOCAL_SLOTS = (0, 3)


@dataclass(frozen=True)
class NoiseChannelParams:
    """Channel amplitudes (c, d) at local dimension k.

    Invariant: c^2 + 2(k-1) d^2 = 1 within 1e-12, with 0 <= c <= 1, d >= 0.
    """

    k: int
    c: float
    d: float

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"local dimension must be >= 2, got {self.k}")
        if not 0.0 <= self.c <= 1.0:
            raise ValueError(f"c must lie in [0, 1], got {self.c}")
        if self.d < 0.0:
            raise ValueError(f"d must be nonnegative, got {self.d}")
        gap = abs(self.c**2 + 2.0 * (self.k - 1) * self.d**2 - 1.0)
        if gap > UNITARITY_TOL:
            raise ValueError(
                f"unitarity violated: c^2 + 2(k-1)d^2 deviates from 1 by {gap:.3g}"
            )


@dataclass(frozen=True)
class ChannelCoefficients:
    """Closed-form output coefficients; all nonnegative.

    At k = 2: P = (c^2+d^2)^2, Q = 4 c^2 d^2, R = d^2 (c^2+d^2), S = d^4,
    with P + S + 2R = 1.
    """

    P: float
    Q: float
    R: float
    S: float

    def __post_init__(self):
        for name in ("P", "Q", "R", "S"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"coefficient {name} is negative")


def params_from_c(c: float, k: int = 2) -> NoiseChannelParams:
    """Solve the unitarity constraint for d >= 0 at the given c."""
    if k < 2:
        raise ValueError(f"need k >= 2, got {k}")
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"c must lie in [0, 1], got {c}")
    d = float(np.sqrt((1.0 - c * c) / (2.0 * (k - 1))))
    return NoiseChannelParams(k=k, c=float(c), d=d)


def channel_coefficients(p: NoiseChannelParams) -> ChannelCoefficients:
    """General-k P, Q, R, S; reduces to the two-qubit forms at k = 2."""
    c, d, k = p.c, p.d, p.k
    cc = c * c
    dd = d * d
    return ChannelCoefficients(
        P=(cc + (k - 1) * dd) ** 2,
        Q=dd * (4.0 * cc + 4.0 * c * d * (k - 2) + (k - 2) * dd),
        R=dd * (cc + (k - 1) * dd),
        S=dd * dd,
    )


def _branch_tensors(p: NoiseChannelParams):
    # per-particle output branches on (system, environment, ancilla), by input i:
    # A[i] the c-branch, B[i] the d-branch
    k = p.k
    a = np.zeros((k, k, k, k), dtype=np.complex128)
    b = np.zeros((k, k, k, k), dtype=np.complex128)
    for i in range(k):
        a[i, i, i, i] = p.c
        for j in range(k):
            if j == i:
                continue
            b[i, i, j, j] += p.d
            b[i, j, i, j] += p.d
    return a, b


def _trace_ancillas(psi6: np.ndarray, k: int) -> np.ndarray:
    # psi6 on (sys1, env1, anc1, sys2, env2, anc2) -> rho on (sys1, env1, sys2, env2)
    psi = np.transpose(psi6, (0, 1, 3, 4, 2, 5))
    m = np.ascontiguousarray(psi).reshape(k**4, k**2)
    return m @ m.conj().T


def apply_channel_full(s: PureBipartiteState, p: NoiseChannelParams) -> DensityMatrix:
    """Four-party output state, built term by term from the interaction.

    Expands the four amplitude branches (cc, cd, dc, dd) of the two-particle
    output explicitly, traces out the two ancilla registers, logs the
    pre-normalization trace, and normalizes.

    Limited to k <= 4 (the result is a k^4 x k^4 matrix).
    """
    if s.k != p.k:
        raise DimensionMismatchError(f"state k={s.k} but channel k={p.k}")
    if p.k > MAX_FULL_K:
        raise DimensionMismatchError(
            f"full output needs k <= {MAX_FULL_K}, got {p.k}"
        )
    k = p.k
    w = np.sqrt(np.clip(s.lambdas, 0.0, None)).astype(np.complex128)
    a, b = _branch_tensors(p)
    psi6 = np.einsum("i,iaex,ibfy->aexbfy", w, a, a)
    psi6 += np.einsum("i,iaex,ibfy->aexbfy", w, a, b)
    psi6 += np.einsum("i,iaex,ibfy->aexbfy", w, b, a)
    psi6 += np.einsum("i,iaex,ibfy->aexbfy", w, b, b)
    rho = _trace_ancillas(psi6, k)
    pre = float(np.trace(rho).real)
    logger.debug("pre-normalization trace: %.17g", pre)
    if abs(pre - 1.0) > 1e-10:
        logger.warning("channel output trace deviates from 1 by %.3g", pre - 1.0)
    rho /= pre
    return qmath.validate_density_matrix(rho)


def apply_channel_amplitudes(amplitudes, p: NoiseChannelParams) -> DensityMatrix:
    """Four-party output for an arbitrary two-qudit input vector.

    Independent route from :func:`apply_channel_full`: contracts the input
    amplitudes against the full per-particle isometry in one step.  Needed
    for inputs that are not positive Schmidt combinations (signed
    amplitudes).
    """
    if p.k > MAX_FULL_K:
        raise DimensionMismatchError(
            f"full output needs k <= {MAX_FULL_K}, got {p.k}"
        )
    k = p.k
    alpha = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    if alpha.shape[0] != k * k:
        raise DimensionMismatchError(
            f"expected {k * k} amplitudes, got {alpha.shape[0]}"
        )
    norm = float(np.sum(np.abs(alpha) ** 2))
    if abs(norm - 1.0) > 1e-12:
        raise ValueError(f"input amplitudes have squared norm {norm!r}, not 1")
    alpha = alpha.reshape(k, k)
    a, b = _branch_tensors(p)
    iso = a + b
    psi6 = np.einsum("iaex,jbfy,ij->aexbfy", iso, iso, alpha)
    rho = _trace_ancillas(psi6, k)
    pre = float(np.trace(rho).real)
    logger.debug("pre-normalization trace: %.17g", pre)
    rho /= pre
    return qmath.validate_density_matrix(rho)


def output_layout(k: int) -> SubsystemLayout:
    """Layout of the four-party output under the fixed slot convention."""
    return SubsystemLayout((k, k, k, k))


def reduce_output(rho_full: DensityMatrix, k: int, slots) -> DensityMatrix:
    """Partial-trace the four-party output down to a pair of slots."""
    reduced = qmath.partial_trace(rho_full.matrix, output_layout(k), slots)
    return qmath.validate_density_matrix(reduced)


def _local_matrix(s: PureBipartiteState, p: NoiseChannelParams) -> np.ndarray:
    k = p.k
    cc = p.c * p.c
    dd = p.d * p.d
    rho = np.zeros((k * k, k * k), dtype=np.complex128)
    lam = s.lambdas
    for i in range(k):
        rho[i * k + i, i * k + i] += cc * lam[i]
        for j in range(k):
            if j == i:
                continue
            v = np.zeros(k * k, dtype=np.complex128)
            v[i * k + j] = 1.0
            v[j * k + i] = 1.0
            rho += dd * lam[i] * np.outer(v, v)
    return rho


def _nonlocal_matrix(s: PureBipartiteState, p: NoiseChannelParams) -> np.ndarray:
    k = p.k
    coef = channel_coefficients(p)
    lam = s.lambdas
    amp = np.sqrt(np.clip(lam, 0.0, None))
    rho = np.zeros((k * k, k * k), dtype=np.complex128)
    for i in range(k):
        rho[i * k + i, i * k + i] += coef.P * lam[i]
        for j in range(k):
            if j == i:
                continue
            rho[i * k + i, j * k + j] += coef.Q * amp[i] * amp[j]
            rho[i * k + j, i * k + j] += coef.R * lam[i]
            rho[j * k + i, j * k + i] += coef.R * lam[i]
            for l in range(k):
                if l == i:
                    continue
                rho[j * k + l, j * k + l] += coef.S * lam[i]
    return rho


def local_output(s: PureBipartiteState, p: NoiseChannelParams) -> DensityMatrix:
    """Closed-form state of a sent qubit with its own environment qubit.

    Already unit trace by the unitarity constraint.  At k = 2 this is the
    matrix diag(c^2 l1, d^2, d^2, c^2 l2) plus the d^2 coherence between
    |01> and |10>.
    """
    if s.k != p.k:
        raise DimensionMismatchError(f"state k={s.k} but channel k={p.k}")
    return qmath.validate_density_matrix(_local_matrix(s, p))


def nonlocal_output(s: PureBipartiteState, p: NoiseChannelParams) -> DensityMatrix:
    """Closed-form state of a sent qubit with the distant environment qubit.

    At k = 2: X-form with diagonal (P l1 + S l2, R, R, P l2 + S l1) and
    anti-diagonal corners Q sqrt(l1 l2).
    """
    if s.k != p.k:
        raise DimensionMismatchError(f"state k={s.k} but channel k={p.k}")
    return qmath.validate_density_matrix(_nonlocal_matrix(s, p))


def closed_form_deviations(s: PureBipartiteState, p: NoiseChannelParams):
    """Max-entry gaps between the closed forms and the traced full output.

    Returns ``(local_dev, nonlocal_dev)``.  The raw closed-form matrices are
    compared (no validation), so this also works where the claimed nonlocal
    coefficients fail to be a density matrix.
    """
    full = apply_channel_full(s, p)
    local_ref = qmath.partial_trace(full.matrix, output_layout(p.k), LOCAL_SLOTS)
    nonlocal_ref = qmath.partial_trace(full.matrix, output_layout(p.k), NONLOCAL_SLOTS)
    local_dev = float(np.max(np.abs(_local_matrix(s, p) - local_ref)))
    nonlocal_dev = float(np.max(np.abs(_nonlocal_matrix(s, p) - nonlocal_ref)))
    return local_dev, nonlocal_dev


def werner_decomposition_check(rho: DensityMatrix):
    """Least-squares weight w of rho against w |Phi+><Phi+| + (1-w)/4 I.

    Returns ``(w, residual)`` with residual the max-entry gap to the fitted
    family member.  The family is linear in w, so the fit is exact algebra.
    """
    if rho.dim != 4:
        raise DimensionMismatchError(f"need a two-qubit state, got dim {rho.dim}")
    phi = (qmath.basis_ket(0, 4) + qmath.basis_ket(3, 4)) / np.sqrt(2.0)
    bell = qmath.outer(phi)
    eye4 = np.eye(4) / 4.0
    g = bell - eye4
    w = float(np.real(np.vdot(g, rho.matrix - eye4)) / np.real(np.vdot(g, g)))
    fitted = w * bell + (1.0 - w) * eye4
    residual = float(np.max(np.abs(rho.matrix - fitted)))
    return w, residual
