import math

import numpy as np
import pytest
import scipy.linalg as la
from hypothesis import given, settings
from hypothesis import strategies as st

from holsim.dynamics import (
    ChannelSpec,
    IntegratorConfig,
    Trajectory,
    density_matrix,
    evolve_open,
    evolve_unitary,
    localized_state,
)
from holsim.errors import ValidationError
from holsim.model import (
    BathSpec,
    ProductBasis,
    SiteNetwork,
    build_system_hamiltonian,
    build_total_hamiltonian,
    chain_couplings,
)
from holsim.transport import (
    EfficiencyCurve,
    coherence_l1,
    crossover_scan,
    default_horizon,
    default_window,
    hopping_rates,
    log_grid,
    mean_squared_displacement,
    site_populations,
    sweep_dephasing,
    transfer_efficiency,
)


def fake_traj(populations, times=None):
    P = np.atleast_2d(np.asarray(populations, dtype=float))
    t = np.arange(len(P), dtype=float) if times is None else np.asarray(times, dtype=float)
    return Trajectory(times=t, populations=P, coherence=np.zeros(len(t)),
                      trace=P.sum(axis=1), sink_captured=1 - P.sum(axis=1), has_sink=False)


def dimer(detuning, kappa=1.0, J=1.0):
    return SiteNetwork(2, [detuning, 0.0], [(0, 1, J)], sink=(1, kappa))


def chain(n, J=1.0):
    return SiteNetwork(n, [0.0] * n, chain_couplings(n, J))


class TestObservables:
    def test_populations_examples(self):
        np.testing.assert_array_equal(site_populations(localized_state(5, 3)), [0, 0, 0, 1, 0])
        np.testing.assert_allclose(site_populations(np.eye(4) / 4), 0.25)

    def test_joint_populations_with_zero_coupling(self):
        net = SiteNetwork(3, [0.2, 0.0, -0.4], chain_couplings(3, 0.8))
        bath = BathSpec(modes=[(1.0, 3), (0.6, 2)], couplings=[[0.0, 0.0]] * 3)
        basis = ProductBasis.for_bath(3, bath)
        H = build_total_hamiltonian(net, bath, basis)
        cfg = IntegratorConfig(0.1, 6.0)
        joint = evolve_unitary(H, localized_state(basis.total_dim, basis.encode(0, (0, 0))), cfg,
                               n_sites=3)
        bare = evolve_unitary(build_system_hamiltonian(net), localized_state(3, 0), cfg)
        assert np.max(np.abs(joint.populations - bare.populations)) <= 1e-9

    def test_reduced_populations_trace_bath(self):
        psi = np.zeros(6, dtype=complex)
        psi[[0, 2, 4]] = [0.6, 0.8j, 0.0]
        np.testing.assert_allclose(site_populations(psi, n_sites=2), [1.0, 0.0], atol=1e-15)
        with pytest.raises(ValidationError):
            site_populations(np.ones(5), n_sites=2)

    @pytest.mark.parametrize("n", [1, 2, 5, 9])
    def test_l1_examples(self, n):
        assert coherence_l1(np.diag(np.full(n, 1 / n))) == 0.0
        psi = np.full(n, 1 / math.sqrt(n))
        assert coherence_l1(density_matrix(psi)) == pytest.approx(n - 1, abs=1e-12)

    def test_l1_tracks_pure_dephasing(self):
        c, g = 0.35, 1.3
        rho0 = np.array([[0.5, c], [c, 0.5]])
        traj = evolve_open(np.zeros((2, 2)), ChannelSpec([g, g]), rho0,
                           IntegratorConfig(0.05, 2.0))
        np.testing.assert_allclose(traj.coherence, 2 * c * np.exp(-g * traj.times), atol=1e-6)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 6), st.integers(0, 10_000))
    def test_l1_permutation_invariant(self, n, seed):
        rng = np.random.default_rng(seed)
        A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        rho = A @ A.conj().T
        rho /= np.trace(rho)
        perm = rng.permutation(n)
        assert coherence_l1(rho[np.ix_(perm, perm)]) == pytest.approx(coherence_l1(rho), rel=1e-12)


class TestMSD:
    def test_examples(self):
        at_origin = fake_traj([[0, 1, 0]])
        assert mean_squared_displacement(at_origin, 1, [-1, 0, 1])[0, 1] == 0.0
        split = fake_traj([[0.5, 0, 0.5]])
        assert mean_squared_displacement(split, 1, [-1, 0, 1])[0, 1] == 1.0

    def test_missing_coordinates(self):
        with pytest.raises(ValidationError, match="coordinates"):
            mean_squared_displacement(fake_traj([[1, 0]]), 0)
        with pytest.raises(ValidationError):
            mean_squared_displacement(fake_traj([[1, 0]]), 0, [0, 1, 2])
        with pytest.raises(ValidationError):
            mean_squared_displacement(fake_traj([[1, 0]]), 2, [0, 1])

    def test_ballistic_chain(self):
        # continuous-time walk on an infinite chain: MSD = 2 J^2 t^2
        net = chain(41)
        H = build_system_hamiltonian(net)
        traj = evolve_unitary(H, localized_state(41, 20), IntegratorConfig(0.1, 4.0))
        msd = mean_squared_displacement(traj, 20, np.arange(41))
        np.testing.assert_allclose(msd[:, 1], 2 * traj.times**2, atol=1e-8)


class TestEfficiency:
    def test_zero_sink_rate(self):
        net = dimer(0.0, kappa=0.0)
        curve = sweep_dephasing(net, [0.0, 1.0], IntegratorConfig(0.1, 10.0))
        assert np.all(curve.efficiencies <= 1e-12)
        assert all(p[2] == math.inf for p in curve.points)

    @pytest.mark.parametrize("kappa", [0.1, 0.5, 2.0])
    def test_single_site(self, kappa):
        net = SiteNetwork(1, [0.0], sink=(0, kappa))
        T = 3.0
        traj = evolve_open(build_system_hamiltonian(net), ChannelSpec.from_network(net),
                           np.ones((1, 1)), IntegratorConfig(0.01, T))
        eta, t50 = transfer_efficiency(traj)
        assert eta == pytest.approx(1 - math.exp(-2 * kappa * T), abs=1e-9)
        t_half = math.log(2) / (2 * kappa)
        if t_half <= T:
            assert t50 == pytest.approx(math.ceil(t_half / 0.01 - 1e-9) * 0.01)
        else:
            assert t50 == math.inf

    def test_no_sink(self):
        net = chain(3)
        traj = evolve_open(build_system_hamiltonian(net), ChannelSpec.from_network(net),
                           density_matrix(localized_state(3, 0)), IntegratorConfig(0.1, 1.0))
        with pytest.raises(ValidationError, match="sink"):
            transfer_efficiency(traj)
        with pytest.raises(ValidationError, match="sink"):
            sweep_dephasing(net, [0.0], IntegratorConfig(0.1, 1.0))

    def test_non_decreasing_in_time(self):
        net = dimer(3.0, kappa=0.3)
        ch = ChannelSpec.from_network(net, 0.7)
        traj = evolve_open(build_system_hamiltonian(net), ch,
                           density_matrix(localized_state(2, 0)), IntegratorConfig(0.1, 30.0))
        captured = traj.sink_captured
        assert np.all(np.diff(captured) >= -1e-14)
        assert 0.0 <= captured[-1] <= 1.0 + 1e-9


class TestSweep:
    def test_single_point_equals_baseline(self):
        net = dimer(2.0)
        cfg = IntegratorConfig(0.2, 20.0)
        curve = sweep_dephasing(net, [0.0], cfg)
        traj = evolve_open(build_system_hamiltonian(net), ChannelSpec.from_network(net),
                           density_matrix(localized_state(2, 0)), cfg)
        assert curve.points[0][:2] == (0.0, transfer_efficiency(traj)[0])

    def test_resonant_dimer_coherence_optimal(self):
        net = dimer(0.0)
        grid = [0.0] + log_grid(1e-3, 1e2, 26)
        eta = sweep_dephasing(net, grid, IntegratorConfig(0.5, 50.0)).efficiencies
        assert eta[0] >= eta.max() - 1e-9 or np.all(np.diff(eta) <= 1e-9)

    def test_detuned_dimer_interior_maximum(self):
        net = dimer(10.0)
        grid = log_grid(1e-2, 1e3, 31)
        eta = sweep_dephasing(net, grid, IntegratorConfig(0.5, 50.0)).efficiencies
        k = int(np.argmax(eta))
        assert 0 < k < len(eta) - 1
        assert eta[k] >= 1.1 * max(eta[0], eta[-1])
        assert np.all((eta >= 0) & (eta <= 1 + 1e-9))

    def test_deterministic_and_parallel(self):
        net = dimer(5.0, kappa=0.5)
        grid = [0.0, 0.5, 5.0, 50.0]
        cfg = IntegratorConfig(0.25, 20.0)
        a = sweep_dephasing(net, grid, cfg)
        b = sweep_dephasing(net, grid, cfg)
        c = sweep_dephasing(net, grid, cfg, jobs=2)
        assert a.points == b.points == c.points

    @pytest.mark.parametrize("grid", [[], [1.0, 0.5], [0.0, 0.0], [-1.0], [float("inf")]])
    def test_bad_grid(self, grid):
        with pytest.raises(ValidationError):
            sweep_dephasing(dimer(1.0), grid, IntegratorConfig(0.1, 1.0))

    def test_integrator_error_names_gamma(self):
        from holsim.errors import IntegratorError
        with pytest.raises(IntegratorError) as exc:
            sweep_dephasing(dimer(1.0), [0.0, 2000.0], IntegratorConfig(0.005, 1.0, "rk4"))
        assert exc.value.diagnostics["gamma"] == 2000.0
        assert "gamma=2000" in str(exc.value)

    def test_curve_invariants(self):
        with pytest.raises(ValidationError):
            EfficiencyCurve("gamma", ((1.0, 0.1, 2.0), (1.0, 0.2, 1.0)))


def rate_equation_alpha(n, gamma, origin, times, window):
    """Oracle: classical hopping with rate 2 J^2 / gamma between neighbours."""
    r = 2.0 / gamma
    W = np.zeros((n, n))
    for i in range(n - 1):
        W[i + 1, i] = W[i, i + 1] = r
    W -= np.diag(W.sum(axis=0))
    P0 = np.zeros(n)
    P0[origin] = 1.0
    x = np.arange(n) - origin
    msd = np.array([(la.expm(W * t) @ P0) @ x**2 for t in times])
    m = (times >= window[0] - 1e-12) & (times <= window[1] + 1e-12)
    return np.polyfit(np.log(times[m]), 0.5 * np.log(msd[m]), 1)[0], msd


class TestCrossover:
    def test_defaults(self):
        net = chain(41)
        assert default_window(net) == pytest.approx((2.0, 4.1))
        assert default_horizon(dimer(1.0, J=2.0)) == 25.0

    def test_hopping_rates(self):
        net = SiteNetwork(2, [1.0, -1.0], [(0, 1, 0.5)])
        hops = hopping_rates(net, [1.0, 3.0])
        # G = 2, dE = 2 -> 2 * 0.25 * 2 / (4 + 4)
        assert hops == [(0, 1, 0.125), (1, 0, 0.125)]
        with pytest.raises(ValidationError):
            hopping_rates(net, 0.0)

    def test_coherent_to_diffusive(self):
        net = chain(41)
        grid = [0.0, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0]
        rep = crossover_scan(net, grid)
        assert rep.warnings == ()
        a, err = rep.alphas, rep.stderrs
        assert a[0] >= 0.95
        assert a[-1] <= 0.6
        assert np.all(np.diff(a) <= err[1:] + err[:-1])

    def test_strong_dephasing_matches_rate_equation(self):
        n, gamma = 41, 100.0
        net = chain(n)
        rep = crossover_scan(net, [gamma])
        times = np.arange(0, 82) * 0.05
        alpha, _ = rate_equation_alpha(n, gamma, 20, times, rep.window)
        assert alpha == pytest.approx(0.5, abs=1e-9)
        assert abs(rep.alphas[0] - alpha) <= 0.01

    def test_strong_dephasing_matches_hopping_channels(self):
        # same limit through the Lindblad hop channels with the coherent part removed
        n, gamma = 21, 50.0
        net = chain(n)
        cfg = IntegratorConfig(0.1, 4.0)
        rho0 = density_matrix(localized_state(n, 10))
        full = evolve_open(build_system_hamiltonian(net), ChannelSpec.from_network(net, gamma),
                           rho0, cfg)
        hop = evolve_open(np.zeros((n, n)), ChannelSpec([0.0] * n, hopping_rates(net, gamma)),
                          rho0, cfg)
        assert np.max(np.abs(full.populations - hop.populations)) <= 2e-3

    def test_reflection_warning(self):
        rep = crossover_scan(chain(11), [0.0, 10.0], window=(1.0, 4.0))
        assert len(rep.warnings) == 1 and "reflection" in rep.warnings[0]

    def test_errors(self):
        ring = SiteNetwork(5, [0.0] * 5, chain_couplings(5, ring=True))
        with pytest.raises(ValidationError, match="chain"):
            crossover_scan(ring, [0.0])
        with pytest.raises(ValidationError, match="sink"):
            crossover_scan(SiteNetwork(5, [0.0] * 5, chain_couplings(5), sink=(4, 1.0)), [0.0])
        with pytest.raises(ValidationError):
            crossover_scan(chain(5), [0.0], window=(3.0, 1.0))
        with pytest.raises(ValidationError):
            crossover_scan(chain(5), [0.0], origin_site=7)
