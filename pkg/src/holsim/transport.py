"""Transport observables and the dephasing experiments built on them."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import ChannelSpec, IntegratorConfig, density_matrix, evolve_open, localized_state
from .errors import IntegratorError, ValidationError
from .model import SiteNetwork, build_system_hamiltonian
from .walks import fit_spreading_exponent

__all__ = [
    "EfficiencyCurve",
    "CrossoverReport",
    "site_populations",
    "coherence_l1",
    "mean_squared_displacement",
    "transfer_efficiency",
    "hopping_rates",
    "log_grid",
    "default_horizon",
    "default_window",
    "sweep_dephasing",
    "crossover_scan",
]


@dataclass(frozen=True)
class EfficiencyCurve:
    """Transfer efficiency per sweep value; rows are ``(value, eta, t_threshold)``."""

    variable: str
    points: tuple

    def __post_init__(self):
        values = [p[0] for p in self.points]
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValidationError("sweep values must be strictly increasing")

    @property
    def values(self):
        return np.array([p[0] for p in self.points])

    @property
    def efficiencies(self):
        return np.array([p[1] for p in self.points])


@dataclass(frozen=True)
class CrossoverReport:
    """Fitted spreading exponent per dephasing rate; rows are ``(gamma, alpha, residual, alpha_stderr)``."""

    points: tuple
    window: tuple
    warnings: tuple = ()

    @property
    def gammas(self):
        return np.array([p[0] for p in self.points])

    @property
    def alphas(self):
        return np.array([p[1] for p in self.points])

    @property
    def stderrs(self):
        return np.array([p[3] for p in self.points])


def site_populations(state, n_sites=None):
    """Site occupation probabilities of a density matrix or a (joint) pure state.

    A 1-D ``state`` of length ``n_sites * bath_dim`` is traced over the bath,
    assuming the site-major ordering of :class:`holsim.model.ProductBasis`.
    """
    state = np.asarray(state)
    if state.ndim == 2:
        return np.clip(np.diag(state).real, 0.0, None)
    if state.ndim != 1:
        raise ValidationError(f"state must be 1-D or 2-D, got shape {state.shape}")
    n_sites = state.size if n_sites is None else n_sites
    if state.size % n_sites:
        raise ValidationError(f"state length {state.size} is not a multiple of {n_sites}")
    return np.sum(np.abs(state.reshape(n_sites, -1)) ** 2, axis=1)


def coherence_l1(rho):
    """Sum of |rho_ij| over i != j."""
    a = np.abs(np.asarray(rho))
    return float(a.sum() - np.trace(a))


def mean_squared_displacement(traj, origin_site, positions=None):
    """MSD(t) = sum_i P_i(t) (x_i - x_origin)^2 as an array of ``(t, msd)`` rows."""
    if positions is None:
        raise ValidationError("site coordinates are required to compute a displacement")
    x = np.asarray(positions, dtype=float)
    if x.shape != (traj.n_sites,):
        raise ValidationError(f"expected {traj.n_sites} site coordinates, got {x.shape}")
    if not 0 <= origin_site < traj.n_sites:
        raise ValidationError(f"origin site {origin_site} outside [0, {traj.n_sites})")
    msd = traj.populations @ (x - x[origin_site]) ** 2
    return np.column_stack([traj.times, msd])


def transfer_efficiency(traj, threshold=0.5):
    """Captured population at the final time and the first recorded time it reaches ``threshold``.

    The second value is ``math.inf`` if the threshold is never reached.
    """
    if not traj.has_sink:
        raise ValidationError("transfer efficiency needs a scenario with a sink")
    captured = np.clip(traj.sink_captured, 0.0, None)
    hit = np.nonzero(captured >= threshold)[0]
    t_hit = float(traj.times[hit[0]]) if hit.size else math.inf
    return float(captured[-1]), t_hit


def hopping_rates(net, dephasing):
    """Incoherent hops of the strong-dephasing (rate-equation) limit.

    Each coupling t_ij becomes a symmetric pair of hops with rate
    2 t^2 G / (G^2 + dE^2), where G = (g_i + g_j) / 2 is the damping of the
    coherence rho_ij and dE the energy mismatch.
    """
    g = np.broadcast_to(np.asarray(dephasing, dtype=float), (net.n_sites,))
    E = net.on_site_energies
    hops = []
    for i, j, t in net.couplings:
        G = 0.5 * (g[i] + g[j])
        if G <= 0:
            raise ValidationError(f"pair ({i}, {j}) has no dephasing; the hopping limit is undefined")
        rate = 2 * t**2 * G / (G**2 + (E[i] - E[j]) ** 2)
        hops += [(i, j, rate), (j, i, rate)]
    return hops


def log_grid(lo, hi, n):
    """``n`` logarithmically spaced values from ``lo`` to ``hi`` inclusive."""
    if not (0 < lo < hi) or n < 2:
        raise ValidationError("log grid needs 0 < lo < hi and n >= 2")
    return [float(v) for v in np.geomspace(lo, hi, n)]


def default_horizon(net):
    """Efficiency horizon T = 50 / J with J the largest coupling."""
    J = net.typical_coupling
    if J <= 0:
        raise ValidationError("network has no couplings; give the horizon explicitly")
    return 50.0 / J


def default_window(net):
    """Fit window [2, 0.4 * N / (2 v)] with group velocity bound v = 2 J."""
    J = net.typical_coupling
    if J <= 0:
        raise ValidationError("network has no couplings; give the fit window explicitly")
    # 0.4 N / (4 J) written as N / (10 J) to avoid an extra rounding
    return (2.0, net.n_sites / (10.0 * J))


def _check_grid(gammas):
    g = [float(x) for x in gammas]
    if not g:
        raise ValidationError("dephasing grid is empty")
    if any(x < 0 or not math.isfinite(x) for x in g):
        raise ValidationError("dephasing rates must be finite and >= 0")
    if any(b <= a for a, b in zip(g, g[1:])):
        raise ValidationError("dephasing grid must be strictly increasing")
    return g


def _initial_rho(net, initial):
    if np.ndim(initial) == 0:
        return density_matrix(localized_state(net.n_sites, int(initial)))
    initial = np.asarray(initial, dtype=complex)
    return density_matrix(initial) if initial.ndim == 1 else initial


def _run_point(args):
    net, gamma, hops, rho0, cfg = args
    channels = ChannelSpec.from_network(net, gamma, hops)
    try:
        return evolve_open(build_system_hamiltonian(net), channels, rho0, cfg)
    except IntegratorError as exc:
        raise IntegratorError(f"{exc} (gamma={gamma})",
                              {**exc.diagnostics, "gamma": gamma}) from exc


def _map(func, items, jobs):
    if jobs is None or jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


def _efficiency_point(args):
    *run_args, threshold = args
    return transfer_efficiency(_run_point(run_args), threshold)


def sweep_dephasing(net: SiteNetwork, gammas, cfg: IntegratorConfig, initial=0, hops=(),
                    threshold=0.5, jobs=1) -> EfficiencyCurve:
    """Transfer efficiency eta(T) for uniform dephasing rates ``gammas``.

    One open-system run per rate; everything else is held fixed.  ``initial``
    is a site index, a state vector or a density matrix.  With ``jobs > 1``
    the points run in worker processes; results keep grid order.
    """
    if net.sink is None:
        raise ValidationError("dephasing sweep needs a network with a sink")
    grid = _check_grid(gammas)
    rho0 = _initial_rho(net, initial)
    items = [(net, g, tuple(hops), rho0, cfg, threshold) for g in grid]
    results = _map(_efficiency_point, items, jobs)
    return EfficiencyCurve("gamma", tuple((g, eta, t) for g, (eta, t) in zip(grid, results)))


def _is_chain(net):
    pairs = sorted((min(i, j), max(i, j)) for i, j, _ in net.couplings)
    return pairs == [(i, i + 1) for i in range(net.n_sites - 1)]


def _crossover_point(args):
    *run_args, origin, window = args
    traj = _run_point(run_args)
    net = run_args[0]
    msd = mean_squared_displacement(traj, origin, np.arange(net.n_sites))
    t, m = msd[:, 0], msd[:, 1]
    mask = (t >= window[0] - 1e-12) & (t <= window[1] + 1e-12) & (m > 0)
    if mask.sum() < 3:
        raise ValidationError(f"fit window {window} holds fewer than three recorded times")
    return fit_spreading_exponent(np.column_stack([t[mask], np.sqrt(m[mask])]))


def crossover_scan(net: SiteNetwork, gammas, cfg: IntegratorConfig | None = None,
                   origin_site=None, window=None, jobs=1) -> CrossoverReport:
    """Spreading exponent alpha of sigma(t) = sqrt(MSD) for each dephasing rate.

    The particle starts localized on ``origin_site`` (default: the middle
    site) of a sink-free nearest-neighbour chain.  Sites sit at integer
    positions.  A warning is added if the window runs past the time at which
    the ballistic front (speed 2J) reaches the nearest chain end.
    """
    if not _is_chain(net):
        raise ValidationError("crossover scan needs a 1-D nearest-neighbour chain")
    if net.sink is not None:
        raise ValidationError("crossover scan needs a network without a sink")
    grid = _check_grid(gammas)
    origin = net.n_sites // 2 if origin_site is None else int(origin_site)
    if not 0 <= origin < net.n_sites:
        raise ValidationError(f"origin site {origin} outside [0, {net.n_sites})")
    window = tuple(default_window(net) if window is None else map(float, window))
    if not 0 < window[0] < window[1]:
        raise ValidationError(f"fit window must satisfy 0 < start < end, got {window}")
    if cfg is None:
        cfg = IntegratorConfig(dt=0.05, t_final=window[1])
    elif cfg.t_final < window[1]:
        cfg = replace(cfg, t_final=window[1])
    warnings = []
    J = net.typical_coupling
    edge = min(origin, net.n_sites - 1 - origin)
    if J > 0 and window[1] > edge / (2 * J):
        warnings.append(
            f"fit window ends at t={window[1]:g}, after the ballistic front reaches the chain "
            f"end (t={edge / (2 * J):g}); boundary reflections may bias alpha")
    rho0 = _initial_rho(net, origin)
    items = [(net, g, (), rho0, cfg, origin, window) for g in grid]
    fits = _map(_crossover_point, items, jobs)
    return CrossoverReport(
        tuple((g, f.alpha, f.residual, f.alpha_stderr) for g, f in zip(grid, fits)),
        window, tuple(warnings))
