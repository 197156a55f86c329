"""Secret sharing over the noisy channel's nonlocal two-qubit output.

Round structure: a dealer encodes a uniform secret bit into one of two
maximally entangled states, both qubits traverse the noise channel, one
receiver measures in the Hadamard basis and announces the outcome, and the
other receiver discriminates the two possible conditional states.  The
announced outcomes in the two secret branches produce identical conditional
states, so neither receiver alone learns anything (checked by
:func:`security_audit`).

The literal discrimination operators claimed to decode "with certainty" are
kept for audit (:func:`paper_povm`) but are not positive for any reachable
Q and are rejected at decode time; the Helstrom measurement replaces them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import noise, qmath
from .noise import NoiseChannelParams
from .qmath import DensityMatrix, DimensionMismatchError, SubsystemLayout

MARGINAL_TOL = 1e-12


class InvalidMeasurementError(ValueError):
    """Measurement effects fail positivity; Born sampling would be ill-defined."""


@dataclass(frozen=True)
class RandomSource:
    """Reproducible randomness: identical (seed, stream_id) gives identical draws."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class SharedState:
    """Two-qubit state held by the receivers, tagged with the encoded bit."""

    secret_bit: int
    rho: DensityMatrix

    def __post_init__(self):
        if self.secret_bit not in (0, 1):
            raise ValueError(f"secret_bit must be 0 or 1, got {self.secret_bit}")
        if self.rho.dim != 4:
            raise DimensionMismatchError(f"shared state must be 4x4, got {self.rho.dim}")


@dataclass(frozen=True)
class MeasurementOutcome:
    party: str
    basis_label: str
    outcome_bit: int
    probability: float

    def __post_init__(self):
        if self.outcome_bit not in (0, 1):
            raise ValueError(f"outcome_bit must be 0 or 1, got {self.outcome_bit}")
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError(f"probability {self.probability} outside [0, 1]")


@dataclass(frozen=True)
class BinaryMeasurement:
    """Two-effect measurement; valid means both effects are PSD."""

    effect0: np.ndarray
    effect1: np.ndarray
    valid: bool

    def __post_init__(self):
        e0 = qmath.frozen_array(self.effect0)
        e1 = qmath.frozen_array(self.effect1)
        if e0.shape != (2, 2) or e1.shape != (2, 2):
            raise DimensionMismatchError("effects must be 2x2")
        if float(np.max(np.abs(e0 + e1 - np.eye(2)))) > 1e-12:
            raise ValueError("effects do not sum to the identity")
        object.__setattr__(self, "effect0", e0)
        object.__setattr__(self, "effect1", e1)


def make_binary_measurement(effect0, effect1, psd_tol: float = 1e-12) -> BinaryMeasurement:
    """Wrap two effects, deciding validity by a PSD check on both."""
    e0 = qmath.as_matrix(effect0)
    e1 = qmath.as_matrix(effect1)
    valid = True
    for e in (e0, e1):
        if qmath.hermiticity_defect(e) > 1e-12:
            valid = False
            continue
        if qmath.hermitian_eigenvalues(e)[-1] < -psd_tol:
            valid = False
    return BinaryMeasurement(effect0=e0, effect1=e1, valid=valid)


@dataclass(frozen=True)
class ProtocolTranscript:
    """Per-round record arrays plus aggregate statistics."""

    params: NoiseChannelParams
    seed: int
    n: int
    secret_bits: np.ndarray
    alice_outcomes: np.ndarray
    classical_bits: np.ndarray
    bob_outcomes: np.ndarray
    bob_guesses: np.ndarray
    success_count: int
    branch_counts: np.ndarray  # [secret, alice outcome] occupancy

    def __post_init__(self):
        for name in (
            "secret_bits",
            "alice_outcomes",
            "classical_bits",
            "bob_outcomes",
            "bob_guesses",
        ):
            arr = qmath.frozen_array(getattr(self, name), dtype=np.int8)
            if arr.shape != (self.n,):
                raise DimensionMismatchError(f"{name} must have length {self.n}")
            object.__setattr__(self, name, arr)
        counts = qmath.frozen_array(self.branch_counts, dtype=np.int64)
        if counts.shape != (2, 2):
            raise DimensionMismatchError("branch_counts must be 2x2")
        if int(counts.sum()) != self.n:
            raise ValueError("branch counts do not sum to the round count")
        if not 0 <= self.success_count <= self.n:
            raise ValueError("success_count outside [0, n]")
        object.__setattr__(self, "branch_counts", counts)

    def success_rate(self) -> float:
        return self.success_count / self.n

    def bob_alone_rate(self) -> float:
        """Rate at which the raw discrimination outcome alone hits the secret."""
        return float(np.mean(self.bob_outcomes == self.secret_bits))

    def alice_alone_rate(self) -> float:
        return float(np.mean(self.alice_outcomes == self.secret_bits))

    def round_tuples(self):
        """Iterate (secret, alice_outcome, classical, bob_outcome, guess)."""
        for i in range(self.n):
            yield (
                int(self.secret_bits[i]),
                int(self.alice_outcomes[i]),
                int(self.classical_bits[i]),
                int(self.bob_outcomes[i]),
                int(self.bob_guesses[i]),
            )


@dataclass(frozen=True)
class SecurityReport:
    """Max deviations of the no-information marginals from I/2."""

    alice_marginal_deviation: float
    bob_marginal_deviation: float
    bob_average_deviation: float

    @property
    def max_deviation(self) -> float:
        return max(
            self.alice_marginal_deviation,
            self.bob_marginal_deviation,
            self.bob_average_deviation,
        )


_PHI_AMPLITUDES = {
    0: np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0),
    1: np.array([1.0, 0.0, 0.0, -1.0]) / np.sqrt(2.0),
}


def prepare_shared_state(secret_bit: int, p: NoiseChannelParams) -> SharedState:
    """Encode the bit into a Bell state and push both qubits through the channel.

    Returns the nonlocal reduction (sent qubit + distant environment qubit).
    Both single-qubit marginals are checked to be I/2 (secrecy precondition).
    """
    if p.k != 2:
        raise DimensionMismatchError(f"protocol requires k=2, got k={p.k}")
    if secret_bit not in (0, 1):
        raise ValueError(f"secret_bit must be 0 or 1, got {secret_bit}")
    full = noise.apply_channel_amplitudes(_PHI_AMPLITUDES[secret_bit], p)
    rho = noise.reduce_output(full, 2, noise.NONLOCAL_SLOTS)
    pair = SubsystemLayout((2, 2))
    for keep in ((0,), (1,)):
        marg = qmath.partial_trace(rho.matrix, pair, keep)
        dev = float(np.max(np.abs(marg - np.eye(2) / 2.0)))
        if dev > MARGINAL_TOL:
            raise ValueError(
                f"shared-state marginal deviates from I/2 by {dev:.3g}"
            )
    return SharedState(secret_bit=secret_bit, rho=rho)


_HADAMARD_KETS = (
    np.array([1.0, 1.0]) / np.sqrt(2.0),
    np.array([1.0, -1.0]) / np.sqrt(2.0),
)


def conditional_states(s: SharedState):
    """Born-rule conditionals of the second qubit after a Hadamard measurement.

    Returns ``(p_plus, cond_plus, cond_minus)`` and insists on the exact
    p = 1/2 statistics the construction is supposed to give.
    """
    pair = SubsystemLayout((2, 2))
    out = []
    p_plus = None
    for ket in _HADAMARD_KETS:
        proj = qmath.tensor_product(qmath.outer(ket), np.eye(2))
        sub = proj @ s.rho.matrix @ proj
        unnorm = qmath.partial_trace(sub, pair, (1,))
        prob = float(np.trace(unnorm).real)
        if p_plus is None:
            p_plus = prob
        if abs(prob - 0.5) > MARGINAL_TOL:
            raise ValueError(
                f"Hadamard outcome probability {prob!r} deviates from 1/2"
            )
        out.append(qmath.validate_density_matrix(unnorm / prob))
    return p_plus, out[0], out[1]


def alice_measure(s: SharedState, rng: RandomSource):
    """Sample the Hadamard measurement; outcome 0 is the + state.

    Returns ``(MeasurementOutcome, conditional)`` with the conditional being
    the distant qubit's post-measurement state.  Consumes the first uniform
    draw of ``rng``'s stream.
    """
    p_plus, cond_plus, cond_minus = conditional_states(s)
    u = float(rng.generator().random())
    outcome = 0 if u < p_plus else 1
    picked = cond_plus if outcome == 0 else cond_minus
    prob = p_plus if outcome == 0 else 1.0 - p_plus
    m = MeasurementOutcome(
        party="Alice", basis_label="hadamard", outcome_bit=outcome, probability=prob
    )
    return m, picked


def paper_povm(q: float) -> BinaryMeasurement:
    """The claimed discrimination operators (1/2)(I +- (1/q) sx), kept for audit.

    Eigenvalues are (1 +- 1/q)/2, so positivity requires q >= 1; every
    channel-reachable q at k = 2 is below 1/2 and the result is flagged
    invalid.
    """
    if q <= 0.0:
        raise ValueError(f"q must be positive, got {q}")
    sx = np.asarray(qmath.SIGMA_X)
    e0 = (np.eye(2) + sx / q) / 2.0
    e1 = (np.eye(2) - sx / q) / 2.0
    return make_binary_measurement(e0, e1)


def helstrom_measurement(rho0: DensityMatrix, rho1: DensityMatrix):
    """Optimal equal-prior discrimination of two qubit states.

    Effect 0 projects onto the nonnegative eigenspace of rho0 - rho1; the
    success probability is 1/2 + ||rho0 - rho1||_1 / 4.
    """
    if rho0.dim != 2 or rho1.dim != 2:
        raise DimensionMismatchError("Helstrom discrimination here is qubit-only")
    delta = rho0.matrix - rho1.matrix
    vals, vecs = qmath.hermitian_eigensystem(delta)
    e0 = np.zeros((2, 2), dtype=np.complex128)
    for i in range(2):
        if vals[i] >= 0.0:
            e0 += qmath.outer(vecs[:, i])
    e1 = np.eye(2) - e0
    success = 0.5 + 0.25 * float(np.sum(np.abs(vals)))
    return make_binary_measurement(e0, e1), success


def bob_decode(
    conditional: DensityMatrix,
    classical_bit: int,
    m: BinaryMeasurement,
    rng: RandomSource,
) -> int:
    """Sample the discrimination outcome and map it to a guess of the secret.

    Outcome 0 means the effect0 (+x) result.  With classical bit 0 the guess
    is the outcome itself; with classical bit 1 the roles are swapped.
    Consumes the first uniform draw of ``rng``'s stream.
    """
    if classical_bit not in (0, 1):
        raise ValueError(f"classical_bit must be 0 or 1, got {classical_bit}")
    if not m.valid:
        raise InvalidMeasurementError(
            "measurement effects are not positive semidefinite"
        )
    p0 = float(np.trace(m.effect0 @ conditional.matrix).real)
    p0 = min(max(p0, 0.0), 1.0)
    u = float(rng.generator().random())
    outcome = 0 if u < p0 else 1
    return outcome if classical_bit == 0 else 1 - outcome


def run_rounds(n: int, p: NoiseChannelParams, seed: int) -> ProtocolTranscript:
    """Simulate n independent protocol rounds, deterministically in the seed.

    Each round consumes a fixed block of three uniforms (secret coin, the
    Hadamard outcome, the discrimination outcome) from one counter-based
    stream, so the transcript does not depend on evaluation order.
    """
    if n < 1:
        raise ValueError(f"need n >= 1 rounds, got {n}")
    shared = (prepare_shared_state(0, p), prepare_shared_state(1, p))
    cond = []
    for s in shared:
        p_plus, cond_plus, cond_minus = conditional_states(s)
        cond.append((cond_plus, cond_minus))
    meas, _ = helstrom_measurement(cond[0][0], cond[1][0])
    if not meas.valid:
        raise InvalidMeasurementError("discrimination effects failed positivity")

    p0_table = np.empty((2, 2))
    for sbit in (0, 1):
        for abit in (0, 1):
            p0_table[sbit, abit] = float(
                np.trace(meas.effect0 @ cond[sbit][abit].matrix).real
            )

    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    u = gen.random((n, 3))
    secrets = (u[:, 0] >= 0.5).astype(np.int8)
    alice = (u[:, 1] >= 0.5).astype(np.int8)
    classical = alice.copy()
    p0 = p0_table[secrets, alice]
    bob = (u[:, 2] >= p0).astype(np.int8)
    guesses = np.where(classical == 0, bob, 1 - bob).astype(np.int8)

    success_count = int(np.sum(guesses == secrets))
    branch_counts = np.bincount(secrets.astype(np.int64) * 2 + alice, minlength=4)
    return ProtocolTranscript(
        params=p,
        seed=seed,
        n=n,
        secret_bits=secrets,
        alice_outcomes=alice,
        classical_bits=classical,
        bob_outcomes=bob,
        bob_guesses=guesses,
        success_count=success_count,
        branch_counts=branch_counts.reshape(2, 2),
    )


def security_audit(p: NoiseChannelParams) -> SecurityReport:
    """Deviations of every no-collaboration marginal from I/2.

    Covers (a) each party's single-qubit marginal for both encodings and
    (b) the announcement-averaged conditional state for both encodings.
    """
    pair = SubsystemLayout((2, 2))
    eye_half = np.eye(2) / 2.0
    alice_dev = 0.0
    bob_dev = 0.0
    avg_dev = 0.0
    for bit in (0, 1):
        s = prepare_shared_state(bit, p)
        marg_a = qmath.partial_trace(s.rho.matrix, pair, (0,))
        marg_b = qmath.partial_trace(s.rho.matrix, pair, (1,))
        alice_dev = max(alice_dev, float(np.max(np.abs(marg_a - eye_half))))
        bob_dev = max(bob_dev, float(np.max(np.abs(marg_b - eye_half))))
        p_plus, cond_plus, cond_minus = conditional_states(s)
        avg = p_plus * cond_plus.matrix + (1.0 - p_plus) * cond_minus.matrix
        avg_dev = max(avg_dev, float(np.max(np.abs(avg - eye_half))))
    return SecurityReport(
        alice_marginal_deviation=alice_dev,
        bob_marginal_deviation=bob_dev,
        bob_average_deviation=avg_dev,
    )


def transcript_summary(t: ProtocolTranscript) -> dict:
    """Aggregate summary used by the CLI; keys are frozen in the schema."""
    coef = noise.channel_coefficients(t.params)
    audit = security_audit(t.params)
    return {
        "n": t.n,
        "c": t.params.c,
        "Q": coef.Q,
        "success_rate": t.success_rate(),
        "helstrom_bound": (1.0 + coef.Q) / 2.0,
        "security_max_deviation": audit.max_deviation,
    }


def write_transcript_jsonl(t: ProtocolTranscript, path: str):
    """One JSON object per round, in round order."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, (secret, a_out, classical, b_out, guess) in enumerate(t.round_tuples()):
            fh.write(
                json.dumps(
                    {
                        "round": i,
                        "secret": secret,
                        "alice_outcome": a_out,
                        "classical": classical,
                        "bob_outcome": b_out,
                        "guess": guess,
                        "correct": guess == secret,
                    },
                    separators=(",", ":"),
                )
                + "\n"
            )
