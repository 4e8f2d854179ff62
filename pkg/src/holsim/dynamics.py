"""Closed and open time evolution.

Closed dynamics propagate a pure state on the joint site (x) bath space with
``exp(-i H dt)``.  Open dynamics propagate a site-space density matrix under a
Lindblad generator with local pure dephasing, incoherent hops and an
anti-Hermitian sink term ``-kappa {P_sink, rho}``; the weight lost from the
trace is the captured population.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator

from .errors import IntegratorError, ResourceError, ValidationError
from .model import is_hermitian

__all__ = [
    "METHODS",
    "ChannelSpec",
    "IntegratorConfig",
    "Trajectory",
    "expv",
    "step_propagator",
    "lindblad_generator",
    "evolve_unitary",
    "evolve_open",
    "localized_state",
    "density_matrix",
    "validate_density_matrix",
]

METHODS = ("dense-expm", "krylov", "rk4")
AUTO_DENSE_LIMIT = 512
MAX_DENSE_DIM = 2048


@dataclass(frozen=True)
class ChannelSpec:
    """Markovian channels acting on the site space.

    Parameters
    ----------
    dephasing : sequence of float
        Pure-dephasing rate gamma_i for every site.
    hops : sequence of (i, j, rate)
        Incoherent transfer i -> j with jump operator |j><i|.
    sink : (site, kappa) or None
        Absorbing site; usually copied from the network.
    """

    dephasing: tuple
    hops: tuple = ()
    sink: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "dephasing", tuple(float(g) for g in self.dephasing))
        object.__setattr__(self, "hops",
                           tuple((int(i), int(j), float(r)) for i, j, r in self.hops))
        if self.sink is not None:
            object.__setattr__(self, "sink", (int(self.sink[0]), float(self.sink[1])))
        errors = self.validation_errors()
        if errors:
            raise ValidationError(errors[0], errors)

    @classmethod
    def from_network(cls, net, dephasing=0.0, hops=()):
        """Channels for ``net``; a scalar ``dephasing`` applies to every site."""
        if np.ndim(dephasing) == 0:
            dephasing = [float(dephasing)] * net.n_sites
        return cls(tuple(dephasing), tuple(hops), net.sink)

    @property
    def n_sites(self):
        return len(self.dephasing)

    def validation_errors(self):
        errors = []
        n = self.n_sites
        for i, g in enumerate(self.dephasing):
            if not (math.isfinite(g) and g >= 0):
                errors.append(f"dephasing rate of site {i} must be finite and >= 0, got {g}")
        for k, (i, j, r) in enumerate(self.hops):
            if not (0 <= i < n and 0 <= j < n) or i == j:
                errors.append(f"hop {k} ({i} -> {j}) is not a valid pair of distinct sites")
            if not (math.isfinite(r) and r >= 0):
                errors.append(f"hop {k} rate must be finite and >= 0, got {r}")
        if self.sink is not None:
            site, rate = self.sink
            if not 0 <= site < n:
                errors.append(f"sink site {site} outside [0, {n})")
            if not (math.isfinite(rate) and rate >= 0):
                errors.append(f"sink rate must be finite and >= 0, got {rate}")
        return errors


@dataclass(frozen=True)
class IntegratorConfig:
    """Time grid and propagation method.

    ``method=None`` picks ``dense-expm`` up to a generator dimension of 512
    and ``krylov`` above.  Every ``stride``-th step is recorded, plus the final
    one.  A final partial step is taken if ``t_final`` is not a multiple of
    ``dt``.
    """

    dt: float
    t_final: float
    method: str | None = None
    stride: int = 1
    krylov_tol: float = 1e-12
    krylov_dim: int = 30
    max_substeps: int = 100_000
    norm_tol: float = 1e-9
    positivity_tol: float = 1e-8
    snapshots: bool = False

    def __post_init__(self):
        errors = self.validation_errors()
        if errors:
            raise ValidationError(errors[0], errors)

    def validation_errors(self):
        errors = []
        if not (math.isfinite(self.dt) and self.dt > 0):
            errors.append(f"dt must be > 0, got {self.dt}")
        if not (math.isfinite(self.t_final) and self.t_final > 0):
            errors.append(f"t_final must be > 0, got {self.t_final}")
        elif not errors and self.dt > self.t_final:
            errors.append(f"dt={self.dt} exceeds t_final={self.t_final}")
        if self.method is not None and self.method not in METHODS:
            errors.append(f"unknown method {self.method!r}; choose from {METHODS}")
        if not (isinstance(self.stride, (int, np.integer)) and self.stride >= 1):
            errors.append(f"stride must be an integer >= 1, got {self.stride!r}")
        if self.krylov_tol <= 0 or self.krylov_dim < 2:
            errors.append("krylov_tol must be > 0 and krylov_dim >= 2")
        return errors

    def resolve_method(self, dim):
        if self.method is not None:
            return self.method
        return "dense-expm" if dim <= AUTO_DENSE_LIMIT else "krylov"

    def schedule(self):
        """Step sizes and the indices of the steps to record (0 is the initial state)."""
        n_full = int(math.floor(self.t_final / self.dt + 1e-9))
        steps = [self.dt] * n_full
        remainder = self.t_final - n_full * self.dt
        if remainder > 1e-12 * self.t_final:
            steps.append(remainder)
        n = len(steps)
        record = sorted(set(range(0, n + 1, self.stride)) | {n})
        return steps, record


@dataclass
class Trajectory:
    """Recorded observables of one run; row k of every array belongs to ``times[k]``."""

    times: np.ndarray
    populations: np.ndarray
    coherence: np.ndarray
    trace: np.ndarray
    sink_captured: np.ndarray
    has_sink: bool = False
    norm: np.ndarray | None = None
    energy: np.ndarray | None = None
    states: list | None = field(default=None, repr=False)

    def __len__(self):
        return len(self.times)

    @property
    def n_sites(self):
        return self.populations.shape[1]


def expv(A, v, t=1.0, tol=1e-12, m_max=30, max_substeps=100_000):
    """exp(t A) v by Arnoldi projection with adaptive sub-stepping.

    ``A`` is anything supporting ``A @ x`` (dense, sparse or LinearOperator).
    Each sub-step builds a Krylov basis of at most ``m_max`` vectors and
    shrinks the step until the a-posteriori estimate
    ``beta * h_{m+1,m} * |[exp(h H_m)]_{m,1}|`` falls below the share of
    ``tol`` proportional to the step length.
    """
    w = np.array(v, dtype=complex)
    n = w.size
    t = float(t)
    if t == 0.0 or n == 0:
        return w
    m_max = max(1, min(m_max, n))
    done = 0.0
    h = t
    substeps = 0
    while done < t * (1 - 1e-14):
        beta = np.linalg.norm(w)
        if beta == 0.0:
            return w
        V = np.zeros((m_max + 1, n), dtype=complex)
        Hm = np.zeros((m_max + 1, m_max), dtype=complex)
        V[0] = w / beta
        m = m_max
        breakdown = False
        for j in range(m_max):
            p = np.asarray(A @ V[j], dtype=complex).ravel()
            scale = np.linalg.norm(p)
            for _ in range(2):
                c = V[: j + 1].conj() @ p
                p = p - c @ V[: j + 1]
                Hm[: j + 1, j] += c
            s = np.linalg.norm(p)
            Hm[j + 1, j] = s
            if s <= 1e-13 * max(scale, 1e-300):
                m = j + 1
                breakdown = True
                break
            V[j + 1] = p / s
        h = min(h, t - done)
        while True:
            substeps += 1
            if substeps > max_substeps:
                raise IntegratorError(
                    "krylov propagation did not converge",
                    {"t_done": done, "t_total": t, "step": h, "krylov_dim": m,
                     "substeps": substeps})
            F = la.expm(h * Hm[:m, :m])
            err = 0.0 if breakdown else beta * abs(Hm[m, m - 1]) * abs(F[m - 1, 0])
            if not math.isfinite(err):
                err = math.inf
            if err <= tol * h / t:
                break
            h *= 0.5
        w = beta * (F[:, 0] @ V[:m])
        done += h
        h = min(2 * h, t - done) if done < t else h
    return w


def _dense_limit_check(dim, method):
    if dim > MAX_DENSE_DIM:
        raise ResourceError(
            f"method {method!r} unavailable at dimension {dim} (limit {MAX_DENSE_DIM})")


def _generator_propagator(A, dt, method, cfg=None):
    """Propagator for exp(dt A) as a dense matrix or a LinearOperator."""
    dim = A.shape[0]
    if method == "dense-expm":
        _dense_limit_check(dim, method)
        dense = A.toarray() if sp.issparse(A) else np.asarray(A)
        return la.expm(dt * dense)
    if method == "krylov":
        tol = cfg.krylov_tol if cfg else 1e-12
        m_max = cfg.krylov_dim if cfg else 30
        max_sub = cfg.max_substeps if cfg else 100_000

        def matvec(x):
            return expv(A, x, dt, tol=tol, m_max=m_max, max_substeps=max_sub)

        return LinearOperator((dim, dim), matvec=matvec, dtype=complex)
    if method == "rk4":
        def matvec(x):
            x = np.asarray(x, dtype=complex).ravel()
            k1 = A @ x
            k2 = A @ (x + 0.5 * dt * k1)
            k3 = A @ (x + 0.5 * dt * k2)
            k4 = A @ (x + dt * k3)
            return x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)

        return LinearOperator((dim, dim), matvec=matvec, dtype=complex)
    raise ValidationError(f"unknown method {method!r}; choose from {METHODS}")


def step_propagator(H, dt, method="dense-expm", cfg=None):
    """Return U = exp(-i H dt), dense for ``dense-expm``, a LinearOperator for ``krylov``.

    Both results support ``U @ psi``.
    """
    if method not in ("dense-expm", "krylov"):
        raise ValidationError(f"step_propagator supports dense-expm and krylov, not {method!r}")
    if dt < 0 or not math.isfinite(dt):
        raise ValidationError(f"dt must be finite and >= 0, got {dt}")
    if not is_hermitian(H):
        raise ValidationError("Hamiltonian is not Hermitian")
    A = -1j * (sp.csr_matrix(H) if sp.issparse(H) else np.asarray(H, dtype=complex))
    return _generator_propagator(A, dt, method, cfg)


def localized_state(dim, index):
    psi = np.zeros(dim, dtype=complex)
    psi[index] = 1.0
    return psi


def density_matrix(psi):
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def validate_density_matrix(rho, n_sites=None, trace=1.0, trace_tol=1e-9,
                            herm_tol=1e-12, eig_tol=1e-9):
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValidationError(f"density matrix must be square, got shape {rho.shape}")
    if n_sites is not None and rho.shape[0] != n_sites:
        raise ValidationError(f"density matrix has dimension {rho.shape[0]}, expected {n_sites}")
    if not is_hermitian(rho, herm_tol):
        raise ValidationError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if trace is not None and abs(tr - trace) > trace_tol:
        raise ValidationError(f"density matrix trace {tr} differs from {trace}")
    lam = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if lam[0] < -eig_tol:
        raise ValidationError(f"density matrix has negative eigenvalue {lam[0]}")
    return rho


def lindblad_generator(H_p, channels):
    """Sparse Liouvillian acting on row-major vec(rho), shape (N^2, N^2).

    Uses vec(A rho B) = (A (x) B^T) vec(rho).
    """
    H = np.asarray(H_p, dtype=complex)
    n = H.shape[0]
    if channels.n_sites != n:
        raise ValidationError(
            f"channels describe {channels.n_sites} sites, Hamiltonian has dimension {n}")
    eye = sp.identity(n, dtype=complex, format="csr")
    Hs = sp.csr_matrix(H)
    L = -1j * (sp.kron(Hs, eye) - sp.kron(eye, Hs.T))
    # Pure dephasing with site projectors damps rho_ij by (g_i + g_j)/2, i != j.
    g = np.asarray(channels.dephasing)
    damp = 0.5 * (g[:, None] + g[None, :])
    np.fill_diagonal(damp, 0.0)
    L = L - sp.diags(damp.ravel().astype(complex))
    for i, j, r in channels.hops:
        if r == 0:
            continue
        jump = sp.csr_matrix(([1.0], ([j], [i])), shape=(n, n), dtype=complex)
        LdL = jump.conj().T @ jump
        L = L + r * (sp.kron(jump, jump.conj())
                     - 0.5 * (sp.kron(LdL, eye) + sp.kron(eye, LdL.T)))
    if channels.sink is not None and channels.sink[1] > 0:
        site, kappa = channels.sink
        P = sp.csr_matrix(([1.0], ([site], [site])), shape=(n, n), dtype=complex)
        L = L - kappa * (sp.kron(P, eye) + sp.kron(eye, P))
    return sp.csr_matrix(L)


def _reduced_density(psi, n_sites):
    block = psi.reshape(n_sites, -1)
    return block @ block.conj().T


def _l1(rho):
    a = np.abs(rho)
    return float(a.sum() - np.trace(a))


def evolve_unitary(H, psi0, cfg, n_sites=None):
    """Propagate a pure state under exp(-i H t).

    Parameters
    ----------
    H : (D, D) array or sparse matrix
        Hermitian Hamiltonian (system-only or joint site (x) bath).
    psi0 : (D,) array
        Normalized initial state.
    cfg : IntegratorConfig
        ``rk4`` is rejected here; it is reserved for open dynamics.
    n_sites : int, optional
        Number of sites when ``H`` acts on the joint space; populations and
        coherence are taken from the bath-traced density matrix.

    Returns
    -------
    Trajectory
        With ``norm`` and ``energy`` filled in.
    """
    psi = np.asarray(psi0, dtype=complex).ravel()
    dim = H.shape[0]
    if H.shape != (dim, dim) or psi.size != dim:
        raise ValidationError(f"dimension mismatch: H is {H.shape}, psi0 has {psi.size}")
    if not is_hermitian(H):
        raise ValidationError("Hamiltonian is not Hermitian")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-9:
        raise ValidationError(f"initial state norm {np.linalg.norm(psi)} is not 1")
    n_sites = dim if n_sites is None else int(n_sites)
    if dim % n_sites:
        raise ValidationError(f"dimension {dim} is not a multiple of n_sites={n_sites}")
    method = cfg.resolve_method(dim)
    if method == "rk4":
        raise ValidationError("rk4 is only available for open-system evolution")
    steps, record = cfg.schedule()
    Hc = sp.csr_matrix(H, dtype=complex) if sp.issparse(H) else np.asarray(H, dtype=complex)
    props = {dt: step_propagator(Hc, dt, method, cfg) for dt in set(steps)}

    times, pops, coh, norms, energies, states = [], [], [], [], [], []
    record_set = set(record)
    norm0 = np.linalg.norm(psi)
    t = 0.0

    def snap():
        rho = _reduced_density(psi, n_sites)
        times.append(t)
        pops.append(np.clip(np.diag(rho).real, 0.0, None))
        coh.append(_l1(rho))
        norms.append(np.linalg.norm(psi))
        energies.append(np.vdot(psi, Hc @ psi).real)
        if cfg.snapshots:
            states.append(psi.copy())

    snap()
    for k, dt in enumerate(steps, start=1):
        psi = np.asarray(props[dt] @ psi).ravel()
        t = k * cfg.dt if k < len(steps) else cfg.t_final
        drift = abs(np.linalg.norm(psi) - norm0)
        if drift > cfg.norm_tol:
            raise IntegratorError("norm drift exceeds tolerance; reduce dt or tighten krylov_tol",
                                  {"time": t, "drift": drift, "method": method})
        if k in record_set:
            snap()
    norm = np.array(norms)
    return Trajectory(
        times=np.array(times), populations=np.array(pops), coherence=np.array(coh),
        trace=norm**2, sink_captured=np.zeros(len(times)), has_sink=False,
        norm=norm, energy=np.array(energies), states=states if cfg.snapshots else None)


def evolve_open(H_p, channels, rho0, cfg):
    """Integrate the site-space Lindblad equation with dephasing, hops and sink.

    drho/dt = -i[H, rho] + sum_i g_i (P_i rho P_i - {P_i, rho}/2)
              + sum_hops r (L rho L^+ - {L^+ L, rho}/2) - kappa {P_sink, rho}

    Raises
    ------
    IntegratorError
        If a recorded state has an eigenvalue below ``-cfg.positivity_tol``.
    """
    H = np.asarray(H_p, dtype=complex)
    n = H.shape[0]
    if H.shape != (n, n):
        raise ValidationError(f"Hamiltonian must be square, got {H.shape}")
    if not is_hermitian(H):
        raise ValidationError("Hamiltonian is not Hermitian")
    errors = channels.validation_errors()
    if errors:
        raise ValidationError(errors[0], errors)
    rho = validate_density_matrix(rho0, n_sites=n)
    L = lindblad_generator(H, channels)
    method = cfg.resolve_method(n * n)
    steps, record = cfg.schedule()
    props = {dt: _generator_propagator(L, dt, method, cfg) for dt in set(steps)}
    has_sink = channels.sink is not None

    times, pops, coh, traces, states = [], [], [], [], []
    record_set = set(record)
    vec = rho.ravel().copy()
    t = 0.0

    def snap():
        r = vec.reshape(n, n)
        herm = 0.5 * (r + r.conj().T)
        lam = np.linalg.eigvalsh(herm)[0]
        if lam < -cfg.positivity_tol:
            raise IntegratorError("density matrix lost positivity; use a smaller dt",
                                  {"time": t, "min_eigenvalue": float(lam), "method": method})
        times.append(t)
        pops.append(np.diag(r).real.copy())
        coh.append(_l1(r))
        traces.append(np.trace(r).real)
        if cfg.snapshots:
            states.append(r.copy())

    snap()
    for k, dt in enumerate(steps, start=1):
        vec = np.asarray(props[dt] @ vec).ravel()
        if not np.all(np.isfinite(vec)):
            raise IntegratorError("non-finite state; use a smaller dt",
                                  {"time": t, "method": method})
        t = k * cfg.dt if k < len(steps) else cfg.t_final
        if k in record_set:
            snap()
    trace = np.array(traces)
    return Trajectory(
        times=np.array(times), populations=np.array(pops), coherence=np.array(coh),
        trace=trace, sink_captured=(1.0 - trace) if has_sink else np.zeros(len(trace)),
        has_sink=has_sink, states=states if cfg.snapshots else None)
