"""Channel outputs against a brute-force isometry route and the closed forms."""

import numpy as np
import pytest

from qshare import entanglement, noise, qmath
from qshare.entanglement import PureBipartiteState


def single_clone_isometry(p):
    """Explicit matrix of the one-particle transformation.

    Maps |i> to c |i,i,i> + d sum_{j != i} (|i,j> + |j,i>) |j>, with slots
    ordered (system, environment, ancilla).  Built entry by entry as an
    independent reference for the tensor construction inside the package.
    """
    k = p.k
    m = np.zeros((k**3, k), dtype=complex)
    for i in range(k):
        m[(i * k + i) * k + i, i] += p.c
        for j in range(k):
            if j == i:
                continue
            m[(i * k + j) * k + j, i] += p.d
            m[(j * k + i) * k + j, i] += p.d
    return m


def bruteforce_full_output(lambdas, p):
    """Push sqrt(lambda_i) |ii> through two explicit isometries and trace ancillas."""
    k = p.k
    w = single_clone_isometry(p)
    psi_in = np.zeros(k * k, dtype=complex)
    for i in range(k):
        psi_in[i * k + i] = np.sqrt(lambdas[i])
    psi = (np.kron(w, w) @ psi_in).reshape(k, k, k, k, k, k)
    # incoming slots: (sys1, env1, anc1, sys2, env2, anc2); move the two
    # ancillas to the back, keeping (sys1, env1, sys2, env2) in front
    psi = psi.transpose(0, 1, 3, 4, 2, 5).reshape(k**4, k**2)
    rho = psi @ psi.conj().T
    return rho


class TestParams:
    def test_unitarity_identity(self):
        for k in (2, 3, 4, 7):
            p = noise.params_from_c(0.73, k=k)
            assert p.c**2 + 2 * (k - 1) * p.d**2 == pytest.approx(1.0, abs=1e-14)

    def test_noiseless_limit(self):
        p = noise.params_from_c(1.0, k=2)
        assert p.d == 0.0

    def test_rejects_out_of_range_c(self):
        with pytest.raises(ValueError):
            noise.params_from_c(1.2)
        with pytest.raises(ValueError):
            noise.params_from_c(-0.1)

    def test_rejects_k_below_two(self):
        with pytest.raises(ValueError):
            noise.params_from_c(0.8, k=1)

    def test_direct_construction_checks_normalization(self):
        with pytest.raises(ValueError):
            noise.NoiseChannelParams(k=2, c=0.8, d=0.8)


class TestCoefficients:
    def test_reference_point(self):
        # c^2 = 2/3 at k = 2: P = 25/36, Q = 4/9, R = 5/36, S = 1/36
        p = noise.params_from_c(np.sqrt(2.0 / 3.0), k=2)
        coef = noise.channel_coefficients(p)
        assert coef.P == pytest.approx(25.0 / 36.0, abs=1e-14)
        assert coef.Q == pytest.approx(4.0 / 9.0, abs=1e-14)
        assert coef.R == pytest.approx(5.0 / 36.0, abs=1e-14)
        assert coef.S == pytest.approx(1.0 / 36.0, abs=1e-14)

    def test_k2_reductions(self):
        p = noise.params_from_c(0.77, k=2)
        coef = noise.channel_coefficients(p)
        c2, d2 = p.c**2, p.d**2
        assert coef.P == pytest.approx((c2 + d2) ** 2, abs=1e-14)
        assert coef.Q == pytest.approx(4 * c2 * d2, abs=1e-14)
        assert coef.R == pytest.approx(d2 * (c2 + d2), abs=1e-14)
        assert coef.S == pytest.approx(d2 * d2, abs=1e-14)

    def test_trace_identity(self):
        # P + 2(k-1) R + (k-1)(k-... the nonlocal diagonal must sum to one:
        # P + (k-1) S + (k-1)(2R + (k-2) S) = 1 for every k
        for k in (2, 3, 4, 6):
            p = noise.params_from_c(0.81, k=k)
            coef = noise.channel_coefficients(p)
            total = coef.P + (k - 1) * coef.S + (k - 1) * (2 * coef.R + (k - 2) * coef.S)
            assert total == pytest.approx(1.0, abs=1e-13)

    def test_q_peak_at_k2(self):
        # 4 c^2 d^2 with d^2 = (1 - c^2)/2 peaks at 1/2 when c^2 = 1/2
        peak = noise.channel_coefficients(noise.params_from_c(np.sqrt(0.5), k=2)).Q
        assert peak == pytest.approx(0.5, abs=1e-14)
        for c in (0.6, 0.75, 0.9, 0.99):
            q = noise.channel_coefficients(noise.params_from_c(c, k=2)).Q
            assert 0.0 < q < 0.5


class TestFullChannel:
    @pytest.mark.parametrize(
        "k,lambdas",
        [
            (2, [1.0, 0.0]),
            (2, [0.5, 0.5]),
            (2, [0.83, 0.17]),
            (3, [0.5, 0.3, 0.2]),
            (4, [0.4, 0.3, 0.2, 0.1]),
        ],
    )
    def test_matches_bruteforce_isometry(self, k, lambdas):
        s = PureBipartiteState(k=k, lambdas=lambdas)
        for c in (0.6, 0.85, 1.0):
            p = noise.params_from_c(c, k=k)
            got = noise.apply_channel_full(s, p)
            ref = bruteforce_full_output(lambdas, p)
            assert np.trace(ref).real == pytest.approx(1.0, abs=1e-12)
            np.testing.assert_allclose(got.matrix, ref, atol=1e-13)

    def test_amplitude_route_agrees_on_schmidt_input(self):
        p = noise.params_from_c(0.8, k=2)
        s = PureBipartiteState(k=2, lambdas=[0.7, 0.3])
        amps = np.zeros(4)
        amps[0] = np.sqrt(0.7)
        amps[3] = np.sqrt(0.3)
        a = noise.apply_channel_amplitudes(amps, p)
        b = noise.apply_channel_full(s, p)
        np.testing.assert_allclose(a.matrix, b.matrix, atol=1e-14)

    def test_amplitude_route_sees_signs(self):
        # |00> - |11> and |00> + |11> give different coherence signs
        p = noise.params_from_c(0.8, k=2)
        plus = noise.apply_channel_amplitudes(np.array([1, 0, 0, 1]) / np.sqrt(2), p)
        minus = noise.apply_channel_amplitudes(np.array([1, 0, 0, -1]) / np.sqrt(2), p)
        red_p = noise.reduce_output(plus, 2, noise.NONLOCAL_SLOTS)
        red_m = noise.reduce_output(minus, 2, noise.NONLOCAL_SLOTS)
        q = noise.channel_coefficients(p).Q
        assert red_p.matrix[0, 3].real == pytest.approx(q / 2, abs=1e-14)
        assert red_m.matrix[0, 3].real == pytest.approx(-q / 2, abs=1e-14)

    def test_amplitude_route_rejects_bad_input(self):
        p = noise.params_from_c(0.8, k=2)
        with pytest.raises(ValueError):
            noise.apply_channel_amplitudes(np.array([1.0, 0, 0, 1.0]), p)
        with pytest.raises(qmath.DimensionMismatchError):
            noise.apply_channel_amplitudes(np.array([1.0, 0, 0]), p)

    def test_k_guard(self):
        s = PureBipartiteState(k=5, lambdas=np.full(5, 0.2))
        p = noise.params_from_c(0.8, k=5)
        with pytest.raises(ValueError):
            noise.apply_channel_full(s, p)

    def test_k_mismatch(self):
        s = PureBipartiteState(k=2, lambdas=[0.5, 0.5])
        p = noise.params_from_c(0.8, k=3)
        with pytest.raises(qmath.DimensionMismatchError):
            noise.apply_channel_full(s, p)

    def test_output_layout(self):
        layout = noise.output_layout(3)
        assert layout.dims == (3, 3, 3, 3)
        assert layout.total == 81


class TestClosedForms:
    def test_local_structure_k2(self):
        p = noise.params_from_c(0.8, k=2)
        s = PureBipartiteState(k=2, lambdas=[0.6, 0.4])
        rho = noise.local_output(s, p).matrix
        c2, d2 = p.c**2, p.d**2
        expect = np.diag([c2 * 0.6, d2, d2, c2 * 0.4]).astype(complex)
        expect[1, 2] = expect[2, 1] = d2
        np.testing.assert_allclose(rho, expect, atol=1e-14)

    def test_nonlocal_structure_k2(self):
        p = noise.params_from_c(0.8, k=2)
        s = PureBipartiteState(k=2, lambdas=[0.6, 0.4])
        rho = noise.nonlocal_output(s, p).matrix
        coef = noise.channel_coefficients(p)
        expect = np.diag(
            [
                coef.P * 0.6 + coef.S * 0.4,
                coef.R,
                coef.R,
                coef.P * 0.4 + coef.S * 0.6,
            ]
        ).astype(complex)
        expect[0, 3] = expect[3, 0] = coef.Q * np.sqrt(0.6 * 0.4)
        np.testing.assert_allclose(rho, expect, atol=1e-14)

    def test_closed_forms_exact_at_k2_and_k3(self):
        for k, lambdas in ((2, [0.7, 0.3]), (3, [0.5, 0.3, 0.2]), (3, [1.0, 0.0, 0.0])):
            s = PureBipartiteState(k=k, lambdas=lambdas)
            for c in (0.65, 0.9):
                local_dev, nonlocal_dev = noise.closed_form_deviations(
                    s, noise.params_from_c(c, k=k)
                )
                assert local_dev < 1e-14
                assert nonlocal_dev < 1e-14

    def test_claimed_coherence_deviates_at_k4(self):
        # the claimed nonlocal coefficient misses a (k-2)(k-3) d^4 term in
        # the |ii><jj| entries, which first shows up at k = 4
        lam = np.array([0.4, 0.3, 0.2, 0.1])
        s = PureBipartiteState(k=4, lambdas=lam)
        p = noise.params_from_c(0.8, k=4)
        local_dev, nonlocal_dev = noise.closed_form_deviations(s, p)
        assert local_dev < 1e-14
        pred = 2.0 * p.d**4 * np.sqrt(np.outer(lam, lam))
        np.fill_diagonal(pred, 0.0)
        assert nonlocal_dev == pytest.approx(pred.max(), abs=1e-15)

    def test_k4_coherence_entry_exact_value(self):
        lam = np.array([0.4, 0.3, 0.2, 0.1])
        s = PureBipartiteState(k=4, lambdas=lam)
        p = noise.params_from_c(0.8, k=4)
        full = noise.apply_channel_full(s, p)
        red = noise.reduce_output(full, 4, noise.NONLOCAL_SLOTS)
        k, c, d = 4, p.c, p.d
        exact = (4 * c**2 * d**2 + 4 * (k - 2) * c * d**3 + (k - 2) ** 2 * d**4) * np.sqrt(
            lam[0] * lam[1]
        )
        assert red.matrix[0, 4 + 1].real == pytest.approx(exact, abs=1e-14)

    def test_reductions_of_full_output_match_closed_forms_k2(self):
        rng = np.random.default_rng(131)
        for _ in range(10):
            lam1 = rng.uniform(0, 1)
            c = rng.uniform(0.6, 1.0)
            s = PureBipartiteState(k=2, lambdas=[lam1, 1 - lam1])
            p = noise.params_from_c(c, k=2)
            full = noise.apply_channel_full(s, p)
            np.testing.assert_allclose(
                noise.reduce_output(full, 2, noise.LOCAL_SLOTS).matrix,
                noise.local_output(s, p).matrix,
                atol=1e-12,
            )
            np.testing.assert_allclose(
                noise.reduce_output(full, 2, noise.NONLOCAL_SLOTS).matrix,
                noise.nonlocal_output(s, p).matrix,
                atol=1e-12,
            )

    def test_nonlocal_marginals_maximally_mixed_for_bell_input(self):
        s = PureBipartiteState(k=2, lambdas=[0.5, 0.5])
        for c in (0.6, 0.85, 1.0):
            rho = noise.nonlocal_output(s, noise.params_from_c(c, k=2))
            pair = qmath.SubsystemLayout((2, 2))
            for keep in ((0,), (1,)):
                marg = qmath.partial_trace(rho.matrix, pair, keep)
                np.testing.assert_allclose(marg, np.eye(2) / 2, atol=1e-14)

    def test_perfect_copy_limit_decoheres(self):
        # at c = 1 the machine still copies into the environment, and the
        # which-branch record in the ancilla kills all coherence
        s = PureBipartiteState(k=2, lambdas=[0.7, 0.3])
        rho = noise.nonlocal_output(s, noise.params_from_c(1.0, k=2)).matrix
        np.testing.assert_allclose(rho, np.diag([0.7, 0, 0, 0.3]), atol=1e-14)


class TestWernerDecomposition:
    def test_exact_family_member(self):
        phi = (qmath.basis_ket(0, 4) + qmath.basis_ket(3, 4)) / np.sqrt(2)
        bell = qmath.outer(phi)
        for w in (0.0, 0.3, 4.0 / 9.0, 0.8, 1.0):
            rho = qmath.validate_density_matrix(w * bell + (1 - w) * np.eye(4) / 4)
            got_w, residual = noise.werner_decomposition_check(rho)
            assert got_w == pytest.approx(w, abs=1e-13)
            assert residual < 1e-13

    def test_reference_nonlocal_point(self):
        s = PureBipartiteState(k=2, lambdas=[0.5, 0.5])
        rho = noise.nonlocal_output(s, noise.params_from_c(np.sqrt(2.0 / 3.0), k=2))
        w, residual = noise.werner_decomposition_check(rho)
        assert w == pytest.approx(4.0 / 9.0, abs=1e-13)
        assert residual < 1e-13

    def test_non_family_state_has_residual(self):
        rho = qmath.validate_density_matrix(np.diag([0.4, 0.3, 0.2, 0.1]))
        _, residual = noise.werner_decomposition_check(rho)
        assert residual > 1e-3

    def test_dimension_check(self):
        rho = qmath.validate_density_matrix(np.eye(2) / 2)
        with pytest.raises(qmath.DimensionMismatchError):
            noise.werner_decomposition_check(rho)
