import numpy as np
import pytest

from oracles import kraus_loop, product_channel_by_contraction, product_channel_by_kraus
from renyi_dvoretzky.channels import (PartialTraceChannel, apply, certified_product_lower_bounds,
                                      conjugate_channel, kraus_from_isometry, maximally_entangled_state,
                                      product_channel_on_max_entangled)
from renyi_dvoretzky.ensembles import Isometry, RngStream, haar_isometry
from renyi_dvoretzky.entropy import renyi_entropy
from renyi_dvoretzky.errors import DimensionError, InvalidOrderError, UnsupportedShapeError
from renyi_dvoretzky.linalg import DensityMatrix, PureState, schmidt_coefficients


def random_state(rng, m, rank=None):
    rank = rank or m
    g = rng.standard_normal((m, rank)) + 1j * rng.standard_normal((m, rank))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def channel(m, d, r=None, field="complex", seed=0):
    return PartialTraceChannel(haar_isometry(m, d, d if r is None else r, field, RngStream(seed)))


@pytest.fixture
def rng():
    return np.random.default_rng(77)


class TestApply:
    def test_identity_isometry_on_product(self, rng):
        r1, r2 = random_state(rng, 3), random_state(rng, 2)
        ch = PartialTraceChannel(Isometry.identity(3, 2))
        np.testing.assert_allclose(apply(ch, np.kron(r1.matrix, r2.matrix)).matrix, r1.matrix, atol=1e-14)

    def test_pure_input_eigenvalues_are_squared_schmidt(self, rng):
        ch = channel(5, 3, 4, seed=1)
        x = PureState.normalized(rng.standard_normal(5) + 1j * rng.standard_normal(5))
        out = apply(ch, DensityMatrix.from_pure(x))
        s = schmidt_coefficients(ch.V @ x.amplitudes, (3, 4))
        np.testing.assert_allclose(out.eigenvalues(), s**2, atol=1e-10)

    def test_kraus_and_partial_trace_agree(self, rng):
        for seed, (m, d, r) in enumerate([(4, 2, 3), (6, 3, 3), (1, 2, 2)]):
            ch = channel(m, d, r, seed=seed)
            rho = random_state(rng, m)
            via_kraus = sum(k @ rho.matrix @ k.conj().T for k in kraus_loop(ch.V, d, r))
            np.testing.assert_allclose(apply(ch, rho).matrix, via_kraus, atol=1e-10)

    def test_trace_and_positivity(self, rng):
        ch = channel(7, 3, seed=2)
        out = apply(ch, random_state(rng, 7, rank=2)).matrix
        assert np.trace(out).real == pytest.approx(1, abs=1e-10)
        assert np.linalg.eigvalsh(out).min() > -1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            apply(channel(3, 2, seed=0), np.eye(2) / 2)


class TestKraus:
    def test_identity_blocks(self):
        ks = kraus_from_isometry(PartialTraceChannel(Isometry.identity(2, 3)))
        assert len(ks.operators) == 3
        assert ks.completeness_defect() == 0.0
        np.testing.assert_array_equal(ks.operators[1][:, 1::3].real, np.eye(2))

    def test_m1_assembles_reshaped_state(self):
        ch = channel(1, 2, 3, seed=4)
        ks = kraus_from_isometry(ch)
        cols = np.stack([k[:, 0] for k in ks.operators], axis=1)
        np.testing.assert_allclose(cols, ch.V[:, 0].reshape(2, 3))

    def test_random_completeness_and_match_loop(self):
        ch = channel(5, 3, 4, seed=5)
        ks = kraus_from_isometry(ch)
        assert ks.completeness_defect() < 1e-10
        for a, b in zip(ks.operators, kraus_loop(ch.V, 3, 4)):
            np.testing.assert_array_equal(a, b)


class TestConjugate:
    def test_real_channel_is_self_conjugate(self):
        ch = channel(5, 3, field="real", seed=6)
        assert np.array_equal(conjugate_channel(ch).V, ch.V)

    def test_involution(self):
        ch = channel(5, 3, seed=7)
        assert conjugate_channel(conjugate_channel(ch)).V.tobytes() == ch.V.tobytes()

    def test_conjugate_output(self, rng):
        ch = channel(4, 3, seed=8)
        rho = random_state(rng, 4)
        lhs = apply(conjugate_channel(ch), rho.matrix.conj()).matrix
        np.testing.assert_allclose(lhs, apply(ch, rho).matrix.conj(), atol=1e-12)


class TestMaximallyEntangled:
    def test_m1(self):
        np.testing.assert_array_equal(maximally_entangled_state(1).amplitudes, [1])

    def test_m2(self):
        np.testing.assert_allclose(maximally_entangled_state(2).amplitudes, np.array([1, 0, 0, 1]) / np.sqrt(2))

    def test_reduced_state(self):
        psi = maximally_entangled_state(4)
        red = np.einsum("ijkj->ik", psi.projector().reshape(4, 4, 4, 4))
        np.testing.assert_allclose(red, np.eye(4) / 4, atol=1e-15)


class TestProductChannel:
    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_identity_gives_max_entangled(self, d):
        ch = PartialTraceChannel(Isometry.identity(d))
        out = product_channel_on_max_entangled(ch).matrix
        psi = maximally_entangled_state(d).projector()
        np.testing.assert_allclose(out, psi, atol=1e-12)
        np.testing.assert_allclose(product_channel_by_contraction(ch.V, d), psi, atol=1e-12)

    def test_matches_kraus_sum(self):
        for seed, (m, d) in enumerate([(3, 2), (5, 3), (8, 3)]):
            for field in ("complex", "real"):
                ch = channel(m, d, field=field, seed=seed)
                out = product_channel_on_max_entangled(ch).matrix
                np.testing.assert_allclose(out, product_channel_by_kraus(ch.V, d), atol=1e-12)
                np.testing.assert_allclose(out, product_channel_by_contraction(ch.V, d), atol=1e-12)

    def test_eigenvalue_bound(self):
        for d in range(2, 7):
            for m in (1, d, d * d // 2, d * d):
                ch = channel(m, d, seed=100 * d + m)
                out = product_channel_on_max_entangled(ch)
                assert out.eigenvalues()[0] >= m / d**2 - 1e-9
                assert np.trace(out.matrix).real == pytest.approx(1, abs=1e-10)

    def test_non_square(self):
        with pytest.raises(UnsupportedShapeError):
            product_channel_on_max_entangled(channel(3, 2, 3, seed=0))


class TestCertifiedBounds:
    def test_identity(self):
        b = certified_product_lower_bounds(PartialTraceChannel(Isometry.identity(3)), 2)
        assert b.lambda_max == pytest.approx(1, abs=1e-12)
        assert b.entropy_ub == pytest.approx(0, abs=1e-12)

    def test_d4_m8(self):
        b = certified_product_lower_bounds(channel(8, 4, seed=9), 2)
        assert b.bound_m_over_d2 == 0.5
        assert b.p_norm_lb >= b.lambda_max >= 0.5
        assert b.overlap >= 0.5 - 1e-12
        assert b.entropy_ub <= 2 * np.log(16 / 8) + 1e-9

    def test_entropy_is_that_of_output(self):
        ch = channel(6, 3, seed=10)
        b = certified_product_lower_bounds(ch, 3)
        assert b.entropy_ub == pytest.approx(renyi_entropy(product_channel_on_max_entangled(ch), 3), abs=1e-12)

    def test_invalid_order(self):
        with pytest.raises(InvalidOrderError):
            certified_product_lower_bounds(channel(2, 2, seed=0), 1)
