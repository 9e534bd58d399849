import numpy as np
import pytest

from conftest import draw_point

from bcn_ruijsenaars.errors import InvalidInput, SeparationViolation
from bcn_ruijsenaars.hamiltonians import (
    fd_gradient,
    grad_hamiltonian,
    hamiltonian_q,
    hamiltonian_sigma,
    involution_report,
    phi_reduced,
    phi_trace,
    poisson_bracket_fd,
    spectral_invariants,
    weyl_check,
)
from bcn_ruijsenaars.model import ReducedPoint, abc_from_params, make_params
from bcn_ruijsenaars.reconstruction import assemble


class TestPhiTrace:
    @pytest.mark.parametrize("nu", [1, 2, 3])
    def test_identity_element(self, nu):
        assert phi_trace(np.eye(6), nu) == pytest.approx(-3.0 / nu)

    def test_reference_value(self):
        params = make_params(0.5, 1, 1, 1)
        fact, _ = assemble(ReducedPoint(np.array([0.0]), np.array([0.0])), params)
        assert phi_trace(fact.g, 1) == pytest.approx(-1.0, abs=1e-12)

    def test_real_on_random_surface_points(self):
        rng = np.random.default_rng(51)
        params = make_params(0.5, 1.1, 0.9, 3)
        for _ in range(10):
            fact, _ = assemble(draw_point(rng, params), params)
            for nu in (1, 2, 3):
                phi_trace(fact.g, nu)   # raises NumericalFailure if not real

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidInput):
            phi_trace(np.full((2, 2), np.nan), 1)


class TestClosedForms:
    def test_scalar_rest_value(self):
        params = make_params(0.5, 1, 1, 1)
        for q in (-1.0, 0.0, 2.0):
            assert hamiltonian_sigma([np.exp(q)], [0.0], params) == \
                pytest.approx(-1.0, abs=1e-12)

    def test_large_separation_decouples(self):
        # the pair factors deviate from 1 by ~exp(-2 gap); with the
        # exp(-2 q) prefactors this leaves ~1e-5 at a gap of 12
        params = make_params(0.5, 1.0, 1.0, 2)
        pt = ReducedPoint(np.array([6.0, -6.0]), np.array([0.7, -0.4]))
        val = phi_reduced(pt, params, 1)
        scalar_params = make_params(0.5, 1.0, 1.0, 1)
        parts = sum(
            phi_reduced(ReducedPoint(pt.q[i:i+1], pt.p[i:i+1]), scalar_params, 1)
            for i in range(2))
        assert val == pytest.approx(parts, abs=1e-4)

    def test_master_cross_validation(self):
        rng = np.random.default_rng(52)
        for n in (1, 2, 3):
            params = make_params(0.5, 1.2, 0.8, n)
            for _ in range(10):
                pt = draw_point(rng, params)
                t = phi_reduced(pt, params, 1)
                s = hamiltonian_sigma(np.exp(pt.q), pt.p, params)
                assert abs(t - s) <= 1e-9 * max(1.0, abs(s))

    def test_parameter_correspondence(self):
        rng = np.random.default_rng(53)
        params = make_params(0.45, 1.4, 0.7, 3)
        a2, b2, c2 = abc_from_params(params)
        for _ in range(20):
            pt = draw_point(rng, params)
            h1 = hamiltonian_q(pt.q, pt.p, a2, b2, c2)
            h2 = hamiltonian_sigma(np.exp(pt.q), pt.p, params)
            assert abs(h1 - h2) <= 1e-12 * max(1.0, abs(h1), abs(h2))

    def test_zero_coupling_decouples(self):
        q = np.array([0.8, -0.3])
        p = np.array([0.4, 1.0])
        val = hamiltonian_q(q, p, 1.0, 1.0, 0.0)
        parts = sum(hamiltonian_q(q[i:i+1], p[i:i+1], 1.0, 1.0, 0.0)
                    for i in range(2))
        assert val == pytest.approx(parts, abs=1e-14)

    def test_separation_violation(self):
        params = make_params(0.5, 1, 1, 2)
        with pytest.raises(SeparationViolation):
            hamiltonian_sigma(np.exp([0.1, 0.0]), np.zeros(2), params)

    def test_phase_periodicity(self):
        rng = np.random.default_rng(54)
        params = make_params(0.5, 1, 1, 2)
        pt = draw_point(rng, params)
        v1 = phi_reduced(pt, params, 2)
        v2 = phi_reduced(ReducedPoint(pt.q, pt.p + 2 * np.pi), params, 2)
        assert v1 == pytest.approx(v2, abs=1e-10)


class TestGradient:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_analytic_matches_fd(self, n):
        rng = np.random.default_rng(55 + n)
        params = make_params(0.55, 1.2, 0.85, n)
        f = lambda pt, pr: hamiltonian_sigma(np.exp(pt.q), pt.p, pr)
        for _ in range(5):
            pt = draw_point(rng, params, q_range=(-1.2, 1.2))
            aq, ap = grad_hamiltonian(pt, params)
            fq, fp = fd_gradient(f, pt, params)
            scale = max(1.0, float(np.max(np.abs(aq))), float(np.max(np.abs(ap))))
            assert np.max(np.abs(aq - fq)) <= 1e-6 * scale
            assert np.max(np.abs(ap - fp)) <= 1e-6 * scale


class TestPoissonBracket:
    def test_canonical_pairs(self):
        params = make_params(0.5, 1, 1, 2)
        pt = ReducedPoint(np.array([0.9, -0.4]), np.array([0.3, 1.0]))
        for i in range(2):
            for j in range(2):
                f = lambda z, _p, i=i: float(z.q[i])
                h = lambda z, _p, j=j: float(z.p[j])
                val = poisson_bracket_fd(f, h, pt, params)
                assert val == pytest.approx(0.5 if i == j else 0.0, abs=1e-8)

    def test_antisymmetry_self(self):
        params = make_params(0.5, 1, 1, 2)
        pt = ReducedPoint(np.array([0.9, -0.4]), np.array([0.3, 1.0]))
        f = lambda z, pr: phi_reduced(z, pr, 1)
        assert abs(poisson_bracket_fd(f, f, pt, params)) < 1e-10

    def test_first_two_hamiltonians_commute(self):
        rng = np.random.default_rng(56)
        params = make_params(0.5, 1, 1, 2)
        pt = draw_point(rng, params, q_range=(-1.0, 1.0))
        val = poisson_bracket_fd(lambda z, pr: phi_reduced(z, pr, 1),
                                 lambda z, pr: phi_reduced(z, pr, 2),
                                 pt, params, h0=1e-3)
        assert abs(val) < 1e-5


class TestInvolution:
    def test_report_structure_and_magnitude(self):
        rng = np.random.default_rng(57)
        params = make_params(0.5, 1.0, 1.0, 2)
        pts = [draw_point(rng, params, q_range=(-1.0, 1.0)) for _ in range(5)]
        rep = involution_report(params, pts, max_order=3)
        assert rep.orders == (1, 2, 3)
        assert np.allclose(np.diagonal(rep.bracket_matrix), 0.0)
        assert np.allclose(rep.bracket_matrix, rep.bracket_matrix.T)
        assert rep.max_abs < 1e-5
        assert rep.extrapolation_order == 4

    def test_max_order_guard(self):
        params = make_params(0.5, 1, 1, 2)
        with pytest.raises(InvalidInput):
            involution_report(params, [], max_order=5)


class TestWeyl:
    def test_sign_flip(self):
        params = make_params(0.5, 1, 1, 2)
        s = np.exp(np.array([1.0, -0.2]))
        p = np.array([0.3, 1.1])
        v1 = hamiltonian_sigma(s, p, params)
        v2 = hamiltonian_sigma(s * np.array([-1.0, 1.0]), p, params)
        assert v1 == v2

    def test_pair_swap(self):
        params = make_params(0.5, 1, 1, 2)
        s = np.exp(np.array([1.0, -0.2]))
        p = np.array([0.3, 1.1])
        v1 = hamiltonian_sigma(s, p, params)
        v2 = hamiltonian_sigma(s[::-1], p[::-1], params)
        assert abs(v1 - v2) < 1e-13 * max(1.0, abs(v1))

    def test_full_orbit(self):
        rng = np.random.default_rng(58)
        params = make_params(0.5, 1.1, 0.9, 3)
        pt = draw_point(rng, params)
        rep = weyl_check(np.exp(pt.q), pt.p, params)
        assert rep.ok
        assert rep.orbit_size == 2 ** 3 * 6


class TestSpectralInvariants:
    def test_identity(self):
        vals = spectral_invariants(np.eye(4))
        assert np.allclose(vals, 1.0)

    def test_trace_power_identity(self):
        rng = np.random.default_rng(59)
        params = make_params(0.5, 1.0, 1.0, 2)
        fact, _ = assemble(draw_point(rng, params), params)
        vals = spectral_invariants(fact.g)
        for nu in (1, 2, 3):
            lhs = -np.sum(vals ** nu).real / (2.0 * nu)
            assert lhs == pytest.approx(phi_trace(fact.g, nu), abs=1e-10)
