import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holsim.errors import ResourceError, ValidationError
from holsim.model import (
    BathSpec,
    Distribution,
    ProductBasis,
    SiteNetwork,
    build_bath_hamiltonian,
    build_interaction_hamiltonian,
    build_system_hamiltonian,
    build_total_hamiltonian,
    chain_couplings,
    generate_disordered_network,
    is_hermitian,
)


def brute_force_total(net, bath):
    """Dense Holstein Hamiltonian built element by element from occupation tuples."""
    occs = list(itertools.product(*[range(c + 1) for c in bath.cutoffs]))
    labels = [(i, occ) for i in range(net.n_sites) for occ in occs]
    index = {lab: k for k, lab in enumerate(labels)}
    D = len(labels)
    H = np.zeros((D, D))
    t = {}
    for i, j, amp in net.couplings:
        t[(i, j)] = t[(j, i)] = amp
    g = bath.coupling_matrix
    for a, (i, occ) in enumerate(labels):
        H[a, a] += net.on_site_energies[i] + sum(w * n for w, n in zip(bath.frequencies, occ))
        for j in range(net.n_sites):
            if (i, j) in t:
                H[a, index[(j, occ)]] += t[(i, j)]
        for k, c in enumerate(bath.cutoffs):
            if occ[k] < c:
                up = occ[:k] + (occ[k] + 1,) + occ[k + 1:]
                b = index[(i, up)]
                elem = g[i, k] * np.sqrt(occ[k] + 1)
                H[b, a] += elem
                H[a, b] += elem
    return H


class TestSystemHamiltonian:
    def test_single_site(self):
        H = build_system_hamiltonian(SiteNetwork(1, [3.0]))
        np.testing.assert_array_equal(H, [[3.0]])

    def test_dimer_spectrum(self):
        H = build_system_hamiltonian(SiteNetwork(2, [0.0, 0.0], [(0, 1, 1.0)]))
        np.testing.assert_allclose(np.linalg.eigvalsh(H), [-1.0, 1.0], atol=1e-14)

    def test_seven_site_chain_is_tridiagonal(self):
        net = SiteNetwork(7, np.linspace(-1, 1, 7), chain_couplings(7, 0.7))
        H = build_system_hamiltonian(net)
        assert H.shape == (7, 7)
        assert is_hermitian(H)
        np.testing.assert_array_equal(np.triu(H, 2), 0)
        np.testing.assert_array_equal(np.diag(H, 1), 0.7)
        np.testing.assert_array_equal(np.diag(H), net.on_site_energies)

    @pytest.mark.parametrize("pairs", [[(0, 1, 1.0), (0, 1, 2.0)], [(0, 1, 1.0), (1, 0, 2.0)]])
    def test_duplicate_pair_named(self, pairs):
        with pytest.raises(ValidationError, match=r"duplicate coupling for pair \(0, 1\)"):
            SiteNetwork(2, [0, 0], pairs)

    @pytest.mark.parametrize("kwargs, msg", [
        (dict(n_sites=2, on_site_energies=[0], couplings=()), "expected 2"),
        (dict(n_sites=2, on_site_energies=[0, 0], couplings=[(0, 2, 1.0)]), "outside"),
        (dict(n_sites=2, on_site_energies=[0, 0], couplings=[(1, 1, 1.0)]), "self-coupling"),
        (dict(n_sites=2, on_site_energies=[0, 0], sink=(1, -1.0)), "sink rate"),
        (dict(n_sites=2, on_site_energies=[0, 0], sink=(1, float("inf"))), "sink rate"),
    ])
    def test_invalid_networks(self, kwargs, msg):
        with pytest.raises(ValidationError, match=msg):
            SiteNetwork(**kwargs)

    def test_negative_energies_allowed(self):
        H = build_system_hamiltonian(SiteNetwork(2, [-5.0, -1.0], [(0, 1, 0.3)]))
        assert H[0, 0] == -5.0


class TestBath:
    def test_harmonic_ladder(self):
        bath = BathSpec(modes=[(2.0, 2)], couplings=[[0.0]])
        H = build_bath_hamiltonian(bath, ProductBasis.for_bath(1, bath))
        np.testing.assert_array_equal(H.diagonal(), [0, 2, 4])

    def test_two_modes_codec_order(self):
        bath = BathSpec(modes=[(1.0, 1), (3.0, 1)], couplings=[[0.0, 0.0]])
        basis = ProductBasis.for_bath(1, bath)
        # oracle: enumerate occupation vectors through the codec
        expected = [sum(w * n for w, n in zip((1.0, 3.0), basis.decode(k)[1]))
                    for k in range(basis.total_dim)]
        assert expected == [0, 3, 1, 4]
        np.testing.assert_array_equal(build_bath_hamiltonian(bath, basis).diagonal(), expected)

    def test_zero_modes(self):
        bath = BathSpec.empty(3)
        H = build_bath_hamiltonian(bath, ProductBasis.for_bath(3, bath))
        assert H.shape == (3, 3)
        assert H.nnz == 0 or not H.toarray().any()

    def test_site_independent(self):
        bath = BathSpec(modes=[(1.5, 2)], couplings=[[0.0], [0.0]])
        d = build_bath_hamiltonian(bath, ProductBasis.for_bath(2, bath)).diagonal()
        np.testing.assert_array_equal(d[:3], d[3:])

    def test_cutoff_mismatch(self):
        bath = BathSpec(modes=[(1.0, 2)], couplings=[[0.0]])
        with pytest.raises(ValidationError, match="cutoffs"):
            build_bath_hamiltonian(bath, ProductBasis(1, (3,)))

    @pytest.mark.parametrize("modes", [[(0.0, 1)], [(-1.0, 1)], [(1.0, 0)]])
    def test_invalid_modes(self, modes):
        with pytest.raises(ValidationError):
            BathSpec(modes=modes, couplings=[[0.1]])

    def test_coupling_shape_checked(self):
        with pytest.raises(ValidationError, match="entries"):
            BathSpec(modes=[(1.0, 1), (2.0, 1)], couplings=[[0.1]])


class TestInteraction:
    def test_zero_coupling(self):
        net = SiteNetwork(2, [0, 0], [(0, 1, 1.0)])
        bath = BathSpec(modes=[(1.0, 3)], couplings=[[0.0], [0.0]])
        H = build_interaction_hamiltonian(net, bath, ProductBasis.for_bath(2, bath))
        assert not H.toarray().any()

    def test_single_ladder_coupling(self):
        net = SiteNetwork(1, [0.0])
        bath = BathSpec(modes=[(1.0, 1)], couplings=[[0.5]])
        H = build_interaction_hamiltonian(net, bath, ProductBasis.for_bath(1, bath)).toarray()
        np.testing.assert_array_equal(H, [[0, 0.5], [0.5, 0]])

    def test_polaron_shift(self):
        E1, nu, g = 0.3, 1.0, 0.5
        net = SiteNetwork(1, [E1])
        bath = BathSpec(modes=[(nu, 40)], couplings=[[g]])
        H = build_total_hamiltonian(net, bath).toarray()
        assert abs(np.linalg.eigvalsh(H)[0] - (E1 - g**2 / nu)) < 1e-6

    def test_dimension_mismatch(self):
        net = SiteNetwork(2, [0, 0])
        bath = BathSpec(modes=[(1.0, 1)], couplings=[[0.1]])
        with pytest.raises(ValidationError):
            build_interaction_hamiltonian(net, bath, ProductBasis.for_bath(1, bath))

    def test_matches_brute_force(self):
        rng = np.random.default_rng(4)
        net = SiteNetwork(3, rng.normal(size=3), [(0, 1, 0.7), (1, 2, -0.4), (0, 2, 0.2)])
        bath = BathSpec.from_arrays([0.8, 1.7], [2, 1], rng.normal(size=(3, 2)))
        H = build_total_hamiltonian(net, bath).toarray()
        np.testing.assert_allclose(H, brute_force_total(net, bath), atol=1e-14)


class TestTotal:
    def test_dimension(self):
        net = SiteNetwork(2, [0, 0], [(0, 1, 1.0)])
        bath = BathSpec(modes=[(1.0, 2)], couplings=[[0.1], [0.2]])
        assert build_total_hamiltonian(net, bath).shape == (6, 6)

    def test_sum_of_parts(self):
        net = SiteNetwork(2, [0.1, -0.2], [(0, 1, 1.0)])
        bath = BathSpec(modes=[(1.0, 2), (0.5, 1)], couplings=[[0.1, 0.3], [0.2, 0.0]])
        basis = ProductBasis.for_bath(2, bath)
        H = build_total_hamiltonian(net, bath, basis).toarray()
        parts = (np.kron(build_system_hamiltonian(net), np.eye(basis.bath_dim))
                 + build_bath_hamiltonian(bath, basis).toarray()
                 + build_interaction_hamiltonian(net, bath, basis).toarray())
        np.testing.assert_array_equal(H, parts)

    def test_resource_limit_before_allocation(self):
        net = SiteNetwork(2, [0, 0])
        bath = BathSpec(modes=[(1.0, 9)] * 10, couplings=[[0.1] * 10] * 2)
        with pytest.raises(ResourceError):
            build_total_hamiltonian(net, bath)
        with pytest.raises(ResourceError):
            build_total_hamiltonian(SiteNetwork(1, [0]), BathSpec([(1.0, 7)], [[0.1]]), max_dim=4)


@st.composite
def small_instances(draw, couple=True):
    n = draw(st.integers(1, 3))
    n_modes = draw(st.integers(0, 2))
    cutoffs = draw(st.lists(st.integers(1, 3), min_size=n_modes, max_size=n_modes))
    real = st.floats(-2, 2, allow_nan=False)
    energies = draw(st.lists(real, min_size=n, max_size=n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    couplings = [(i, j, draw(real)) for i, j in chosen]
    freqs = draw(st.lists(st.floats(0.1, 3), min_size=n_modes, max_size=n_modes))
    g = [[draw(real) if couple else 0.0 for _ in range(n_modes)] for _ in range(n)]
    return SiteNetwork(n, energies, couplings), BathSpec(list(zip(freqs, cutoffs)), g)


@settings(max_examples=60, deadline=None)
@given(small_instances(couple=False))
def test_uncoupled_spectrum_is_cartesian_sum(instance):
    net, bath = instance
    basis = ProductBasis.for_bath(net.n_sites, bath)
    assert basis.total_dim <= 64
    H = build_total_hamiltonian(net, bath, basis).toarray()
    sys_eigs = np.linalg.eigvalsh(build_system_hamiltonian(net))
    one_site = BathSpec(bath.modes, [bath.couplings[0]])
    bath_eigs = build_bath_hamiltonian(one_site, ProductBasis.for_bath(1, one_site)).diagonal()
    expected = np.sort(np.add.outer(sys_eigs, bath_eigs).ravel())
    np.testing.assert_allclose(np.linalg.eigvalsh(H), expected, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(small_instances())
def test_builders_hermitian_and_sized(instance):
    net, bath = instance
    basis = ProductBasis.for_bath(net.n_sites, bath)
    H = build_total_hamiltonian(net, bath, basis)
    assert H.shape == (net.n_sites * np.prod([c + 1 for c in bath.cutoffs]),) * 2
    assert H.shape[0] == basis.total_dim
    assert is_hermitian(H)
    assert is_hermitian(build_interaction_hamiltonian(net, bath, basis))
    assert is_hermitian(build_system_hamiltonian(net))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.lists(st.integers(0, 3), max_size=3))
def test_codec_round_trip(n_sites, cutoffs):
    basis = ProductBasis(n_sites, cutoffs)
    assert basis.total_dim == n_sites * int(np.prod([c + 1 for c in cutoffs]))
    for k in range(basis.total_dim):
        site, occ = basis.decode(k)
        assert basis.encode(site, occ) == k
    occs = basis.occupations()
    for b, occ in enumerate(occs):
        assert basis.encode(0, tuple(occ)) == b


def test_codec_rejects_bad_labels():
    basis = ProductBasis(2, (1,))
    with pytest.raises(ValidationError):
        basis.encode(0, (2,))
    with pytest.raises(ValidationError):
        basis.encode(2, (0,))
    with pytest.raises(ValidationError):
        basis.decode(4)


class TestGenerator:
    def test_constant_is_homogeneous(self):
        for seed in (0, 1, 99):
            net = generate_disordered_network(5, "chain", Distribution.constant(0.5),
                                              Distribution.constant(1.0), seed)
            assert net.on_site_energies == (0.5,) * 5
            assert net.couplings == tuple((i, i + 1, 1.0) for i in range(4))

    def test_deterministic(self):
        args = (6, "complete", Distribution.uniform(-1, 1), Distribution.normal(1.0, 0.2))
        a = generate_disordered_network(*args, seed=12)
        b = generate_disordered_network(*args, seed=12)
        c = generate_disordered_network(*args, seed=13)
        assert a == b
        assert repr(a).encode() == repr(b).encode()
        assert a != c

    def test_uniform_energy_mean(self):
        n = 10_000
        net = generate_disordered_network(n, [], Distribution.uniform(-1, 1),
                                          Distribution.constant(1.0), seed=3)
        sigma_mean = (2 / np.sqrt(12)) / np.sqrt(n)
        assert abs(np.mean(net.on_site_energies)) < 3 * sigma_mean

    @pytest.mark.parametrize("topology, n_edges", [("chain", 4), ("ring", 5), ("complete", 10),
                                                    ([(0, 2), (1, 4)], 2)])
    def test_topologies(self, topology, n_edges):
        net = generate_disordered_network(5, topology, Distribution.constant(0),
                                          Distribution.constant(1), 0)
        assert len(net.couplings) == n_edges

    @pytest.mark.parametrize("make", [lambda: Distribution.uniform(1, -1),
                                      lambda: Distribution.normal(0, -1),
                                      lambda: Distribution("cauchy", 0, 1)])
    def test_invalid_distribution(self, make):
        with pytest.raises(ValidationError):
            make()

    def test_unknown_topology(self):
        with pytest.raises(ValidationError):
            generate_disordered_network(3, "star", Distribution.constant(0),
                                        Distribution.constant(1))
