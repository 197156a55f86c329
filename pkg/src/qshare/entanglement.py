"""Schmidt analysis, concurrence and I-concurrence for pure states, the
rank-r maximum theorem with a brute-force verification oracle, and two
mixed-state entanglement oracles (Wootters concurrence, PPT).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import qmath
from .qmath import DensityMatrix, DimensionMismatchError, SubsystemLayout

RANK_TOL = 1e-12
SUM_TOL = 1e-12
PPT_TOL = 1e-12


@dataclass(frozen=True)
class PureBipartiteState:
    """Schmidt spectrum of a k x k pure state.

    Parameters
    ----------
    k : int
        Local dimension of either side.
    lambdas : array_like
        The k Schmidt coefficients as probabilities (squared amplitudes);
        nonnegative, summing to 1 within 1e-12.
    """

    k: int
    lambdas: np.ndarray

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"local dimension must be >= 1, got {self.k}")
        lam = qmath.frozen_array(self.lambdas, dtype=np.float64)
        if lam.ndim != 1 or lam.shape[0] != self.k:
            raise DimensionMismatchError(
                f"expected {self.k} Schmidt coefficients, got shape {lam.shape}"
            )
        if float(lam.min()) < -RANK_TOL:
            raise ValueError(f"negative Schmidt coefficient {lam.min():.3g}")
        total = float(lam.sum())
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"Schmidt coefficients sum to {total!r}, not 1")
        object.__setattr__(self, "lambdas", lam)

    def schmidt_rank(self, rank_tol: float = RANK_TOL) -> int:
        return int(np.sum(self.lambdas > rank_tol))


@dataclass(frozen=True)
class StateVector:
    """Unit-norm complex amplitude vector."""

    dim: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = qmath.frozen_array(self.amplitudes)
        if amp.ndim != 1 or amp.shape[0] != self.dim:
            raise DimensionMismatchError(
                f"expected {self.dim} amplitudes, got shape {amp.shape}"
            )
        norm = float(np.sum(np.abs(amp) ** 2))
        if abs(norm - 1.0) > SUM_TOL:
            raise ValueError(f"state vector has squared norm {norm!r}, not 1")
        object.__setattr__(self, "amplitudes", amp)


def schmidt_decompose(v: StateVector, dim_a: int, dim_b: int) -> PureBipartiteState:
    """Schmidt spectrum of a bipartite pure state with equal local dimensions.

    The coefficients are the descending eigenvalues of the reduced density
    matrix M M-dagger, where M is the dim_a x dim_b coefficient matrix.
    """
    if dim_a * dim_b != v.dim:
        raise DimensionMismatchError(
            f"dimensions {dim_a}x{dim_b} do not factor {v.dim}"
        )
    if dim_a != dim_b:
        raise DimensionMismatchError(
            f"equal local dimensions required, got {dim_a} and {dim_b}"
        )
    m = v.amplitudes.reshape(dim_a, dim_b)
    rho_a = m @ m.conj().T
    lam = qmath.hermitian_eigenvalues(rho_a)
    lam = np.clip(lam, 0.0, None)
    return PureBipartiteState(k=dim_a, lambdas=lam)


def concurrence_pure(s: PureBipartiteState) -> float:
    """Two-qubit pure-state concurrence 2 sqrt(lambda1 lambda2)."""
    if s.k != 2:
        raise DimensionMismatchError(f"concurrence needs k=2, got k={s.k}")
    return float(2.0 * np.sqrt(s.lambdas[0] * s.lambdas[1]))


def i_concurrence_pure(s: PureBipartiteState) -> float:
    """I-concurrence sqrt((2k/(k-1)) * sum_{i<j} lambda_i lambda_j).

    Reduces to :func:`concurrence_pure` at k = 2.
    """
    if s.k < 2:
        raise DimensionMismatchError(f"I-concurrence needs k>=2, got k={s.k}")
    lam = s.lambdas
    pair_sum = 0.0
    for i in range(s.k - 1):
        pair_sum += float(lam[i] * np.sum(lam[i + 1:]))
    val = (2.0 * s.k / (s.k - 1.0)) * pair_sum
    return float(np.sqrt(max(val, 0.0)))


def max_i_concurrence(r: int, k: int) -> float:
    """Largest I-concurrence reachable by Schmidt-rank-r states in k x k.

    Closed form sqrt(k(r-1) / (r(k-1))), attained on the uniform rank-r
    spectrum.
    """
    r = int(r)
    k = int(k)
    if r < 2 or r > k:
        raise ValueError(f"need 2 <= r <= k, got r={r}, k={k}")
    return float(np.sqrt((k * (r - 1)) / (r * (k - 1))))


def max_i_concurrence_ordering(k: int) -> list[float]:
    """The chain [max(r=2,k), ..., max(r=k,k)]; strictly increasing to 1."""
    if k < 2:
        raise ValueError(f"need k >= 2, got k={k}")
    return [max_i_concurrence(r, k) for r in range(2, k + 1)]


def _simplex_project(x: np.ndarray) -> np.ndarray:
    # Euclidean projection onto the probability simplex (sort-based)
    u = np.sort(x)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, x.size + 1)
    cand = u - css / idx
    rho = np.nonzero(cand > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.clip(x - theta, 0.0, None)


def max_i_concurrence_bruteforce(
    r: int,
    k: int,
    grid_steps: int = 20,
    ascent_tol: float = 1e-10,
    max_iters: int = 20000,
) -> float:
    """Maximum of the I-concurrence over rank <= r spectra, found numerically.

    Independent check of :func:`max_i_concurrence`: a simplex grid over the
    r nonzero coefficients picks the best starting point, then projected
    gradient ascent on the pairwise sum refines it to ``ascent_tol``.
    """
    r = int(r)
    k = int(k)
    if r < 2 or r > k:
        raise ValueError(f"need 2 <= r <= k, got r={r}, k={k}")

    best = None
    best_val = -1.0
    # compositions of grid_steps into r nonnegative parts
    for comb in itertools.combinations(range(grid_steps + r - 1), r - 1):
        parts = np.diff(np.concatenate(([-1], comb, [grid_steps + r - 1]))) - 1
        lam = parts / grid_steps
        val = np.sum(np.triu(np.outer(lam, lam), 1))
        if val > best_val:
            best_val = val
            best = lam

    lam = np.asarray(best, dtype=np.float64)
    step = 0.25
    for _ in range(max_iters):
        grad = 1.0 - lam  # d/d lambda_i of sum_{a<b} lambda_a lambda_b
        new = _simplex_project(lam + step * grad)
        if float(np.max(np.abs(new - lam))) <= ascent_tol:
            lam = new
            break
        lam = new

    full = np.zeros(k)
    full[:r] = lam / lam.sum()
    return i_concurrence_pure(PureBipartiteState(k=k, lambdas=full))


def wootters_concurrence(rho: DensityMatrix) -> float:
    """Two-qubit mixed-state concurrence via the spin-flip spectrum.

    max(0, mu1 - mu2 - mu3 - mu4) with mu_i the descending square roots of
    the eigenvalues of rho * (sy x sy) rho^* (sy x sy), computed through the
    Hermitian form sqrt(rho) rho~ sqrt(rho).
    """
    if rho.dim != 4:
        raise DimensionMismatchError(f"Wootters concurrence needs dim 4, got {rho.dim}")
    yy = qmath.tensor_product(qmath.SIGMA_Y, qmath.SIGMA_Y)
    rho_tilde = yy @ rho.matrix.conj() @ yy
    root = qmath.psd_sqrt(rho.matrix)
    m = root @ rho_tilde @ root
    mu = np.sqrt(np.clip(qmath.hermitian_eigenvalues(m), 0.0, None))
    return float(max(0.0, mu[0] - mu[1] - mu[2] - mu[3]))


def ppt_entangled(rho: DensityMatrix, dim_a: int, dim_b: int, tol: float = PPT_TOL) -> bool:
    """Peres-Horodecki test: negative partial transpose certifies entanglement.

    Necessary and sufficient for separability only at 2x2 (and 2x3); for
    larger bipartitions a False return is inconclusive.
    """
    if dim_a * dim_b != rho.dim:
        raise DimensionMismatchError(
            f"bipartition {dim_a}x{dim_b} does not match dim {rho.dim}"
        )
    layout = SubsystemLayout((dim_a, dim_b))
    pt = qmath.partial_transpose(rho.matrix, layout, 1)
    vals = qmath.hermitian_eigenvalues(pt)
    return bool(vals[-1] < -tol)
