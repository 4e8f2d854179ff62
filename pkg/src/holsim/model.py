"""Holstein Hamiltonian in the single-excitation manifold.

The particle lives on ``n_sites`` sites (one excitation, so the site basis is
``|0>, ..., |N-1>``).  The environment is a finite set of bosonic modes, each
truncated at a maximum occupation.  The joint space is ordered site-major:
``index = site * bath_dim + bath_index`` where ``bath_index`` enumerates the
occupation vectors in C order (last mode varies fastest).

All energies are angular frequencies with hbar = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import ResourceError, ValidationError

__all__ = [
    "DEFAULT_MAX_DIM",
    "SiteNetwork",
    "BathSpec",
    "ProductBasis",
    "Distribution",
    "is_hermitian",
    "build_system_hamiltonian",
    "build_bath_hamiltonian",
    "build_interaction_hamiltonian",
    "build_total_hamiltonian",
    "generate_disordered_network",
    "chain_couplings",
]

DEFAULT_MAX_DIM = 2**20


def _finite(x):
    return isinstance(x, (int, float, np.integer, np.floating)) and math.isfinite(x)


@dataclass(frozen=True)
class SiteNetwork:
    """An N-site tight-binding network.

    Parameters
    ----------
    n_sites : int
        Number of sites.
    on_site_energies : sequence of float
        One energy per site.
    couplings : sequence of (i, j, t)
        Coherent hopping amplitudes on unordered site pairs.  Each pair may
        appear once; the matrix element is placed symmetrically.
    sink : (site, rate) or None
        Optional absorbing site and its capture rate.
    """

    n_sites: int
    on_site_energies: tuple
    couplings: tuple = ()
    sink: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "on_site_energies",
                           tuple(float(e) for e in self.on_site_energies))
        object.__setattr__(self, "couplings",
                           tuple((int(i), int(j), float(t)) for i, j, t in self.couplings))
        if self.sink is not None:
            site, rate = self.sink
            object.__setattr__(self, "sink", (int(site), float(rate)))
        errors = self.validation_errors()
        if errors:
            raise ValidationError(errors[0], errors)

    def validation_errors(self):
        errors = []
        n = self.n_sites
        if not isinstance(n, (int, np.integer)) or n < 1:
            return [f"n_sites must be a positive integer, got {n!r}"]
        if len(self.on_site_energies) != n:
            errors.append(f"expected {n} on-site energies, got {len(self.on_site_energies)}")
        for k, e in enumerate(self.on_site_energies):
            if not math.isfinite(e):
                errors.append(f"on-site energy {k} is not finite")
        seen = set()
        for k, (i, j, t) in enumerate(self.couplings):
            if not (0 <= i < n and 0 <= j < n):
                errors.append(f"coupling {k} ({i}, {j}) has a site index outside [0, {n})")
                continue
            if i == j:
                errors.append(f"coupling {k} is a self-coupling on site {i}")
                continue
            pair = (min(i, j), max(i, j))
            if pair in seen:
                errors.append(f"duplicate coupling for pair {pair}")
            seen.add(pair)
            if not math.isfinite(t):
                errors.append(f"coupling {k} amplitude is not finite")
        if self.sink is not None:
            site, rate = self.sink
            if not 0 <= site < n:
                errors.append(f"sink site {site} outside [0, {n})")
            if not (math.isfinite(rate) and rate >= 0):
                errors.append(f"sink rate must be finite and >= 0, got {rate}")
        return errors

    @property
    def typical_coupling(self):
        """Largest |t_ij|, used as the natural rate scale."""
        return max((abs(t) for _, _, t in self.couplings), default=0.0)


@dataclass(frozen=True)
class BathSpec:
    """A finite set of bosonic modes coupled to the sites.

    ``modes`` is a sequence of ``(frequency, fock_cutoff)`` pairs and
    ``couplings`` an ``n_sites x n_modes`` nested sequence holding g_{i,k}.
    """

    modes: tuple
    couplings: tuple

    def __post_init__(self):
        object.__setattr__(self, "modes",
                           tuple((float(w), int(c)) for w, c in self.modes))
        object.__setattr__(self, "couplings",
                           tuple(tuple(float(g) for g in row) for row in self.couplings))
        errors = self.validation_errors()
        if errors:
            raise ValidationError(errors[0], errors)

    def validation_errors(self, n_sites=None):
        errors = []
        for k, (w, c) in enumerate(self.modes):
            if not (math.isfinite(w) and w > 0):
                errors.append(f"mode {k} frequency must be > 0, got {w}")
            if c < 1:
                errors.append(f"mode {k} Fock cutoff must be >= 1, got {c}")
        for i, row in enumerate(self.couplings):
            if len(row) != self.n_modes:
                errors.append(f"coupling row {i} has {len(row)} entries, expected {self.n_modes}")
            elif not all(math.isfinite(g) for g in row):
                errors.append(f"coupling row {i} has non-finite entries")
        if n_sites is not None and len(self.couplings) != n_sites:
            errors.append(f"coupling matrix has {len(self.couplings)} rows, expected n_sites={n_sites}")
        return errors

    @classmethod
    def from_arrays(cls, frequencies, cutoffs, couplings):
        g = np.atleast_2d(np.asarray(couplings, dtype=float))
        return cls(modes=tuple(zip(frequencies, cutoffs)), couplings=tuple(map(tuple, g)))

    @classmethod
    def empty(cls, n_sites):
        return cls(modes=(), couplings=((),) * n_sites)

    @property
    def n_modes(self):
        return len(self.modes)

    @property
    def n_sites(self):
        return len(self.couplings)

    @property
    def frequencies(self):
        return np.array([w for w, _ in self.modes], dtype=float)

    @property
    def cutoffs(self):
        return tuple(c for _, c in self.modes)

    @property
    def coupling_matrix(self):
        return np.array(self.couplings, dtype=float).reshape(self.n_sites, self.n_modes)


@dataclass(frozen=True)
class ProductBasis:
    """Site (x) Fock product basis with a flat-index codec."""

    n_sites: int
    cutoffs: tuple = ()
    _shape: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "cutoffs", tuple(int(c) for c in self.cutoffs))
        if self.n_sites < 1:
            raise ValidationError(f"n_sites must be >= 1, got {self.n_sites}")
        if any(c < 0 for c in self.cutoffs):
            raise ValidationError(f"Fock cutoffs must be >= 0, got {self.cutoffs}")
        object.__setattr__(self, "_shape", tuple(c + 1 for c in self.cutoffs))

    @classmethod
    def for_bath(cls, n_sites, bath):
        return cls(n_sites, bath.cutoffs)

    @property
    def bath_dim(self):
        return math.prod(self._shape)

    @property
    def total_dim(self):
        return self.n_sites * self.bath_dim

    def encode(self, site, occupations=()):
        occupations = tuple(occupations)
        if len(occupations) != len(self.cutoffs):
            raise ValidationError(
                f"expected {len(self.cutoffs)} occupations, got {len(occupations)}")
        if not 0 <= site < self.n_sites:
            raise ValidationError(f"site {site} outside [0, {self.n_sites})")
        for k, (n, c) in enumerate(zip(occupations, self.cutoffs)):
            if not 0 <= n <= c:
                raise ValidationError(f"occupation {n} of mode {k} outside [0, {c}]")
        bath_index = 0
        for n, d in zip(occupations, self._shape):
            bath_index = bath_index * d + n
        return site * self.bath_dim + bath_index

    def decode(self, index):
        if not 0 <= index < self.total_dim:
            raise ValidationError(f"index {index} outside [0, {self.total_dim})")
        site, rest = divmod(int(index), self.bath_dim)
        occ = []
        for d in reversed(self._shape):
            rest, n = divmod(rest, d)
            occ.append(n)
        return site, tuple(reversed(occ))

    def occupations(self):
        """Occupation vectors of all bath states in codec order, shape (bath_dim, n_modes)."""
        if not self._shape:
            return np.zeros((1, 0), dtype=int)
        grids = np.indices(self._shape).reshape(len(self._shape), -1)
        return grids.T.copy()


def is_hermitian(H, rtol=1e-12):
    """True if max|H - H^dagger| <= rtol * max|H| (max-norm, relative)."""
    if sp.issparse(H):
        diff = abs(H - H.conj().T).max() if H.nnz else 0.0
        scale = abs(H).max() if H.nnz else 0.0
    else:
        H = np.asarray(H)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            return False
        diff = np.max(np.abs(H - H.conj().T), initial=0.0)
        scale = np.max(np.abs(H), initial=0.0)
    return diff <= rtol * scale


def build_system_hamiltonian(net):
    """Dense N x N tight-binding Hamiltonian with E_i on the diagonal."""
    errors = net.validation_errors()
    if errors:
        raise ValidationError(errors[0], errors)
    H = np.diag(np.asarray(net.on_site_energies, dtype=float))
    for i, j, t in net.couplings:
        H[i, j] = t
        H[j, i] = t
    return H


def _check_bath(bath, basis, n_sites=None):
    if tuple(bath.cutoffs) != tuple(basis.cutoffs):
        raise ValidationError(
            f"basis cutoffs {basis.cutoffs} do not match bath cutoffs {bath.cutoffs}")
    if bath.n_sites != basis.n_sites:
        raise ValidationError(
            f"bath couples {bath.n_sites} sites but basis has {basis.n_sites}")
    if n_sites is not None and n_sites != basis.n_sites:
        raise ValidationError(f"network has {n_sites} sites but basis has {basis.n_sites}")


def _check_size(basis, max_dim):
    if basis.total_dim > max_dim:
        raise ResourceError(
            f"joint dimension {basis.total_dim} exceeds the limit {max_dim}")


def build_bath_hamiltonian(bath, basis, max_dim=DEFAULT_MAX_DIM):
    """Diagonal operator sum_k nu_k n_k on the joint space (sparse)."""
    _check_bath(bath, basis)
    _check_size(basis, max_dim)
    bath_energies = basis.occupations() @ bath.frequencies
    return sp.diags(np.tile(bath_energies, basis.n_sites), format="csr")


def _ladder_x(cutoff):
    """Truncated a + a^dagger for one mode, (cutoff+1) x (cutoff+1)."""
    off = np.sqrt(np.arange(1, cutoff + 1, dtype=float))
    return sp.diags([off, off], [-1, 1], format="csr")


def build_interaction_hamiltonian(net, bath, basis, max_dim=DEFAULT_MAX_DIM):
    """sum_{i,k} g_{ik} |i><i| (x) (a_k + a_k^dagger), sparse."""
    _check_bath(bath, basis, net.n_sites)
    _check_size(basis, max_dim)
    dims = [c + 1 for c in bath.cutoffs]
    g = bath.coupling_matrix
    H = sp.csr_matrix((basis.total_dim, basis.total_dim))
    for k in range(bath.n_modes):
        if not np.any(g[:, k]):
            continue
        left = sp.identity(math.prod(dims[:k]), format="csr")
        right = sp.identity(math.prod(dims[k + 1:]), format="csr")
        x_k = sp.kron(sp.kron(left, _ladder_x(bath.cutoffs[k])), right)
        H = H + sp.kron(sp.diags(g[:, k]), x_k)
    return sp.csr_matrix(H)


def build_total_hamiltonian(net, bath=None, basis=None, max_dim=DEFAULT_MAX_DIM):
    """H_p (x) 1 + 1 (x) H_vib + H_int as a sparse CSR matrix.

    Raises
    ------
    ResourceError
        If the joint dimension exceeds ``max_dim``; checked before any
        operator is allocated.
    """
    if bath is None:
        bath = BathSpec.empty(net.n_sites)
    if basis is None:
        basis = ProductBasis.for_bath(net.n_sites, bath)
    _check_size(basis, max_dim)
    _check_bath(bath, basis, net.n_sites)
    H_p = sp.kron(sp.csr_matrix(build_system_hamiltonian(net)),
                  sp.identity(basis.bath_dim), format="csr")
    return (H_p + build_bath_hamiltonian(bath, basis, max_dim)
            + build_interaction_hamiltonian(net, bath, basis, max_dim)).tocsr()


@dataclass(frozen=True)
class Distribution:
    """A scalar sampling distribution: uniform(lo, hi), normal(mean, sd) or constant(value)."""

    kind: str
    a: float
    b: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        errors = self.validation_errors()
        if errors:
            raise ValidationError(errors[0], errors)

    def validation_errors(self):
        if self.kind not in ("uniform", "normal", "constant"):
            return [f"unknown distribution kind {self.kind!r}"]
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            return [f"{self.kind} parameters must be finite"]
        if self.kind == "uniform" and not self.a < self.b:
            return [f"uniform bounds must satisfy lo < hi, got ({self.a}, {self.b})"]
        if self.kind == "normal" and self.b < 0:
            return [f"normal standard deviation must be >= 0, got {self.b}"]
        return []

    @classmethod
    def uniform(cls, lo, hi):
        return cls("uniform", lo, hi)

    @classmethod
    def normal(cls, mean, sd):
        return cls("normal", mean, sd)

    @classmethod
    def constant(cls, value):
        return cls("constant", value)

    def sample(self, rng, size):
        if self.kind == "uniform":
            return rng.uniform(self.a, self.b, size)
        if self.kind == "normal":
            return rng.normal(self.a, self.b, size)
        return np.full(size, self.a)


def chain_couplings(n_sites, amplitude=1.0, ring=False):
    """Nearest-neighbour couplings of a chain (or ring)."""
    pairs = [(i, i + 1, amplitude) for i in range(n_sites - 1)]
    if ring and n_sites > 2:
        pairs.append((0, n_sites - 1, amplitude))
    return pairs


def _topology_edges(n_sites, topology):
    if isinstance(topology, str):
        if topology == "chain":
            return [(i, i + 1) for i in range(n_sites - 1)]
        if topology == "ring":
            edges = [(i, i + 1) for i in range(n_sites - 1)]
            if n_sites > 2:
                edges.append((0, n_sites - 1))
            return edges
        if topology == "complete":
            return [(i, j) for i in range(n_sites) for j in range(i + 1, n_sites)]
        raise ValidationError(f"unknown topology {topology!r}")
    return [(int(i), int(j)) for i, j in topology]


def generate_disordered_network(n_sites: int, topology, energy_distribution: Distribution,
                                coupling_distribution: Distribution, seed: int | None = 0,
                                sink: Sequence | None = None) -> SiteNetwork:
    """Draw a random network; identical arguments give an identical network.

    ``topology`` is ``"chain"``, ``"ring"``, ``"complete"`` or an explicit
    list of ``(i, j)`` edges.  Energies are drawn first, then one coupling per
    edge in edge order, from ``numpy.random.default_rng(seed)``.
    """
    if n_sites < 1:
        raise ValidationError(f"n_sites must be >= 1, got {n_sites}")
    for d in (energy_distribution, coupling_distribution):
        errors = d.validation_errors()
        if errors:
            raise ValidationError(errors[0], errors)
    edges = _topology_edges(n_sites, topology)
    rng = np.random.default_rng(seed)
    energies = energy_distribution.sample(rng, n_sites)
    amplitudes = coupling_distribution.sample(rng, len(edges))
    couplings = [(i, j, t) for (i, j), t in zip(edges, amplitudes)]
    return SiteNetwork(n_sites, tuple(energies), tuple(couplings), sink)
