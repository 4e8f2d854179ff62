"""Declarative experiment descriptions (YAML) and bath discretization.

A scenario file is a YAML mapping tagged ``schema: holsim/1``.  Parsing
collects every validation problem, each reported with its field path and
source line, instead of stopping at the first one.  :func:`serialize_scenario`
writes the canonical form with every default materialized, so
``serialize(parse(text)) == text`` for canonical text and ``parse`` after
``serialize`` is a fixed point.

Layout (optional blocks in brackets)::

    schema: holsim/1
    name: dimer
    description: free text
    network:                      # explicit ...
      n_sites: 2
      energies: [0.0, 0.0]
      couplings:
      - [0, 1, 1.0]
      sink: [1, 1.0]              # or null
    network:                      # ... or generated
      generator:
        n_sites: 7
        topology: chain           # chain | ring | complete | [[i, j], ...]
        energies: {uniform: [-1.0, 1.0]}   # uniform | normal | constant
        couplings: {constant: 1.0}
        seed: 0
      sink: null
    [bath]:                       # explicit modes ...
      modes:
      - [1.0, 4]                  # frequency, Fock cutoff
      couplings:
      - [0.5]                     # n_sites rows x n_modes columns
    [bath]:                       # ... or a discretized spectral density
      spectral:
        family: ohmic             # ohmic | flat | table
        coupling: 0.1
        cutoff_frequency: 1.0
        band: [0.05, 5.0]
        n_modes: 4
        fock_cutoff: 2
        pattern: uniform          # or per-site scale list
        table: null               # [[omega, J], ...] for family: table
    channels:
      dephasing: 0.0              # scalar or per-site list
      hops: []                    # [[i, j, rate], ...]
    initial:
      site: 0                     # or amplitudes: [[re, im], ...]
    integrator:
      method: auto                # auto | dense-expm | krylov | rk4
      dt: 0.05
      t_final: 10.0
      stride: 1
      krylov_tol: 1.0e-12
    observables:
      origin: null                # site for MSD output, or null
      positions: null             # site coordinates, default 0..N-1
      threshold: 0.5
    output:
      snapshots: false
    [sweep]:
      gammas: [0.0, 1.0]          # or {log: [lo, hi, n]}
      window: null                # crossover fit window [t0, t1]
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
import yaml

from .dynamics import METHODS, IntegratorConfig
from .errors import ValidationError
from .model import BathSpec, Distribution, SiteNetwork, generate_disordered_network

__all__ = [
    "SCHEMA",
    "GeneratorSpec",
    "SpectralDensitySpec",
    "SweepSpec",
    "Scenario",
    "discretize_spectral_density",
    "parse_scenario",
    "serialize_scenario",
    "load_scenario",
    "preset_names",
    "preset_text",
]

SCHEMA = "holsim/1"
SPECTRAL_FAMILIES = ("ohmic", "flat", "table")
TOPOLOGIES = ("chain", "ring", "complete")


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for a random network; see :func:`holsim.model.generate_disordered_network`."""

    n_sites: int
    topology: object
    energies: Distribution
    couplings: Distribution
    seed: int = 0
    sink: tuple | None = None

    def build(self):
        return generate_disordered_network(self.n_sites, self.topology, self.energies,
                                           self.couplings, self.seed, self.sink)


@dataclass(frozen=True)
class SpectralDensitySpec:
    """A bath spectral density to be discretized into ``n_modes`` modes.

    Families: ``ohmic`` J(w) = coupling * w * exp(-w / cutoff_frequency),
    ``flat`` J(w) = coupling, and ``table`` (piecewise-linear through
    ``table`` points, zero outside, scaled by ``coupling``).  ``pattern`` is
    ``"uniform"`` or a per-site tuple of coupling scales.
    """

    family: str = "ohmic"
    coupling: float = 0.1
    cutoff_frequency: float | None = 1.0
    band: tuple = (0.05, 5.0)
    n_modes: int = 4
    fock_cutoff: int = 2
    pattern: object = "uniform"
    table: tuple | None = None

    def validation_errors(self):
        errors = []
        if self.family not in SPECTRAL_FAMILIES:
            errors.append(f"family must be one of {SPECTRAL_FAMILIES}, got {self.family!r}")
        lo, hi = self.band
        if not (0 < lo < hi < math.inf):
            errors.append(f"band must satisfy 0 < lo < hi < inf, got {self.band}")
        if self.n_modes < 1:
            errors.append(f"n_modes must be >= 1, got {self.n_modes}")
        if self.fock_cutoff < 1:
            errors.append(f"fock_cutoff must be >= 1, got {self.fock_cutoff}")
        if not (math.isfinite(self.coupling) and self.coupling > 0):
            errors.append(f"coupling must be > 0, got {self.coupling}")
        if self.family == "ohmic" and not (self.cutoff_frequency and self.cutoff_frequency > 0):
            errors.append("ohmic family needs cutoff_frequency > 0")
        if self.family == "table":
            if not self.table or len(self.table) < 2:
                errors.append("table family needs at least two [omega, J] rows")
            else:
                w = [r[0] for r in self.table]
                if any(b <= a for a, b in zip(w, w[1:])):
                    errors.append("table frequencies must be strictly increasing")
                if any(r[1] < 0 for r in self.table):
                    errors.append("table spectral density values must be >= 0")
        if self.pattern != "uniform":
            if not isinstance(self.pattern, tuple) or not self.pattern:
                errors.append("pattern must be 'uniform' or a per-site list of scales")
        return errors

    def density(self, w):
        w = np.asarray(w, dtype=float)
        if self.family == "ohmic":
            return self.coupling * w * np.exp(-w / self.cutoff_frequency)
        if self.family == "flat":
            return np.full_like(w, self.coupling)
        tw, tj = np.array(self.table, dtype=float).T
        return self.coupling * np.interp(w, tw, tj, left=0.0, right=0.0)


def discretize_spectral_density(spec, n_sites=None):
    """Midpoint discretization into ``spec.n_modes`` equal-width bins.

    Mode k sits at the bin midpoint w_k and carries g_k^2 = J(w_k) * dw, so
    sum_k g_k^2 / w_k is the midpoint rule for the reorganization integral
    of J(w) / w over the band.  Site i couples with ``pattern[i] * g_k``.
    """
    errors = spec.validation_errors()
    if errors:
        raise ValidationError(errors[0], errors)
    if spec.pattern == "uniform":
        n_sites = 1 if n_sites is None else n_sites
        scales = np.ones(n_sites)
    else:
        scales = np.asarray(spec.pattern, dtype=float)
        if n_sites is not None and len(scales) != n_sites:
            raise ValidationError(
                f"pattern has {len(scales)} scales but the network has {n_sites} sites")
    lo, hi = spec.band
    K = spec.n_modes
    dw = (hi - lo) / K
    w = lo + dw * (np.arange(K) + 0.5)
    g = np.sqrt(spec.density(w) * dw)
    return BathSpec.from_arrays(w, [spec.fock_cutoff] * K, np.outer(scales, g))


@dataclass(frozen=True)
class SweepSpec:
    gammas: tuple | None = None
    log: tuple | None = None
    window: tuple | None = None

    def grid(self):
        if self.gammas is not None:
            return list(self.gammas)
        lo, hi, n = self.log
        return [float(v) for v in np.geomspace(lo, hi, int(n))]


@dataclass(frozen=True)
class Scenario:
    """A fully validated experiment description."""

    name: str
    integrator: IntegratorConfig
    network: SiteNetwork | None = None
    generator: GeneratorSpec | None = None
    description: str = ""
    bath: BathSpec | None = None
    spectral: SpectralDensitySpec | None = None
    dephasing: object = 0.0
    hops: tuple = ()
    initial_site: int | None = 0
    initial_amplitudes: tuple | None = None
    origin: int | None = None
    positions: tuple | None = None
    threshold: float = 0.5
    sweep: SweepSpec | None = None
    schema: str = SCHEMA
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def site_network(self):
        if "network" not in self._cache:
            self._cache["network"] = self.network or self.generator.build()
        return self._cache["network"]

    def bath_spec(self):
        if self.bath is not None:
            return self.bath
        if self.spectral is not None:
            return discretize_spectral_density(self.spectral, self.site_network().n_sites)
        return None

    def dephasing_rates(self):
        n = self.site_network().n_sites
        if isinstance(self.dephasing, tuple):
            return self.dephasing
        return (float(self.dephasing),) * n

    def site_positions(self):
        n = self.site_network().n_sites
        return np.arange(n, dtype=float) if self.positions is None else np.array(self.positions)

    def initial_site_vector(self):
        """Normalized initial amplitudes over the sites."""
        n = self.site_network().n_sites
        if self.initial_amplitudes is None:
            psi = np.zeros(n, dtype=complex)
            psi[self.initial_site] = 1.0
            return psi
        psi = np.array(self.initial_amplitudes, dtype=complex)
        return psi / np.linalg.norm(psi)

    @property
    def seeds(self):
        return {"network": self.generator.seed} if self.generator else {}


# --------------------------------------------------------------------------
# parsing


def _line_map(node, path=(), out=None):
    out = {} if out is None else out
    out[path] = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        for key, value in node.value:
            _line_map(value, path + (key.value,), out)
            out.setdefault(path + (key.value,), key.start_mark.line + 1)
    elif isinstance(node, yaml.SequenceNode):
        for i, item in enumerate(node.value):
            _line_map(item, path + (i,), out)
    return out


class _Reader:
    """Typed field access that records errors instead of raising."""

    def __init__(self, lines):
        self.lines = lines
        self.errors = []

    def error(self, path, message):
        where = ".".join(str(p) if isinstance(p, str) else f"[{p}]" for p in path)
        where = where.replace(".[", "[") or "<root>"
        p = tuple(path)
        while p not in self.lines and p:
            p = p[:-1]
        line = self.lines.get(p)
        self.errors.append(f"{where} (line {line}): {message}" if line else f"{where}: {message}")

    def mapping(self, data, path, known):
        if not isinstance(data, dict):
            self.error(path, "expected a mapping")
            return {}
        for key in data:
            if key not in known:
                self.error(path + (key,), "unknown field")
        return data

    def get(self, data, key, path, kind, required=False, default=None):
        if key not in data or data[key] is None:
            if required:
                self.error(path + (key,), "required field is missing")
            return default
        return self.convert(data[key], path + (key,), kind, default)

    def convert(self, value, path, kind, default=None):
        if kind is float:
            if isinstance(value, str):
                # YAML 1.1 reads exponent forms without a dot (1e-3) as strings
                try:
                    value = float(value)
                except ValueError:
                    pass
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                self.error(path, f"expected a number, got {value!r}")
                return default
            if not math.isfinite(value):
                self.error(path, "must be finite")
                return default
            return float(value)
        if kind is int:
            if isinstance(value, bool) or not isinstance(value, int):
                self.error(path, f"expected an integer, got {value!r}")
                return default
            return value
        if kind is str:
            if not isinstance(value, str):
                self.error(path, f"expected a string, got {value!r}")
                return default
            return value
        if kind is bool:
            if not isinstance(value, bool):
                self.error(path, f"expected true or false, got {value!r}")
                return default
            return value
        if kind is list:
            if not isinstance(value, list):
                self.error(path, f"expected a list, got {value!r}")
                return default
            return value
        raise TypeError(kind)

    def row(self, value, path, kinds):
        if not isinstance(value, list) or len(value) != len(kinds):
            self.error(path, f"expected a list of {len(kinds)} values, got {value!r}")
            return None
        out = [self.convert(v, path + (i,), k) for i, (v, k) in enumerate(zip(value, kinds))]
        return None if any(v is None for v in out) else tuple(out)


def _distribution(r, data, path):
    if not isinstance(data, dict) or len(data) != 1:
        r.error(path, "expected one of {uniform: [lo, hi]}, {normal: [mean, sd]}, {constant: v}")
        return None
    (kind, params), = data.items()
    if kind == "constant":
        value = r.convert(params, path + (kind,), float)
        return None if value is None else _checked(r, path, Distribution, "constant", value)
    if kind in ("uniform", "normal"):
        pair = r.row(params, path + (kind,), (float, float))
        return None if pair is None else _checked(r, path, Distribution, kind, *pair)
    r.error(path, f"unknown distribution {kind!r}")
    return None


def _checked(r, path, cls, *args, **kwargs):
    try:
        return cls(*args, **kwargs)
    except ValidationError as exc:
        for e in exc.errors:
            r.error(path, e)
        return None


def _sink(r, data, path):
    if data.get("sink") is None:
        return None
    return r.row(data["sink"], path + ("sink",), (int, float))


def _network(r, data, path):
    data = r.mapping(data, path, {"n_sites", "energies", "couplings", "sink", "generator"})
    sink = _sink(r, data, path)
    if "generator" in data:
        if {"n_sites", "energies", "couplings"} & set(data):
            r.error(path, "give either an explicit network or a generator, not both")
            return None, None
        gpath = path + ("generator",)
        g = r.mapping(data["generator"], gpath,
                      {"n_sites", "topology", "energies", "couplings", "seed"})
        n = r.get(g, "n_sites", gpath, int, required=True)
        topo = g.get("topology", "chain")
        if isinstance(topo, list):
            edges = [r.row(e, gpath + ("topology", k), (int, int)) for k, e in enumerate(topo)]
            topo = tuple(edges) if all(edges) else None
            if topo and n is not None:
                for k, (i, j) in enumerate(topo):
                    if not (0 <= i < n and 0 <= j < n) or i == j:
                        r.error(gpath + ("topology", k), f"edge ({i}, {j}) invalid for {n} sites")
        elif topo not in TOPOLOGIES:
            r.error(gpath + ("topology",), f"topology must be one of {TOPOLOGIES} or an edge list")
            topo = None
        energies = _distribution(r, g.get("energies"), gpath + ("energies",))
        couplings = _distribution(r, g.get("couplings"), gpath + ("couplings",))
        seed = r.get(g, "seed", gpath, int, default=0)
        if None in (n, topo, energies, couplings):
            return None, None
        if n < 1:
            r.error(gpath + ("n_sites",), "must be >= 1")
            return None, None
        if sink is not None and not 0 <= sink[0] < n:
            r.error(path + ("sink",), f"sink site {sink[0]} outside [0, {n})")
            return None, None
        return None, GeneratorSpec(n, topo, energies, couplings, seed, sink)
    n = r.get(data, "n_sites", path, int, required=True)
    energies = r.get(data, "energies", path, list, required=True)
    if energies is not None:
        energies = [r.convert(e, path + ("energies", k), float) for k, e in enumerate(energies)]
    couplings = []
    for k, c in enumerate(r.get(data, "couplings", path, list, default=[])):
        row = r.row(c, path + ("couplings", k), (int, int, float))
        if row is None:
            continue
        if n is not None and not (0 <= row[0] < n and 0 <= row[1] < n):
            r.error(path + ("couplings", k), f"site index out of range [0, {n})")
            continue
        couplings.append(row)
    if n is None or energies is None or None in energies:
        return None, None
    return _checked(r, path, SiteNetwork, n, tuple(energies), tuple(couplings), sink), None


def _spectral(r, s, path):
    s = r.mapping(s, path, {"family", "coupling", "cutoff_frequency", "band", "n_modes",
                            "fock_cutoff", "pattern", "table"})
    d = SpectralDensitySpec()
    band = r.row(s["band"], path + ("band",), (float, float)) if "band" in s else d.band
    pattern = s.get("pattern", "uniform")
    if pattern != "uniform":
        pattern = tuple(r.convert(v, path + ("pattern", k), float)
                        for k, v in enumerate(r.convert(pattern, path + ("pattern",), list, [])))
    table = None
    if s.get("table") is not None:
        rows = r.convert(s["table"], path + ("table",), list, [])
        table = tuple(r.row(v, path + ("table", k), (float, float)) for k, v in enumerate(rows))
    family = r.get(s, "family", path, str, default=d.family)
    cutoff = r.get(s, "cutoff_frequency", path, float,
                   default=d.cutoff_frequency if family == "ohmic" else None)
    spec = SpectralDensitySpec(
        family=family,
        coupling=r.get(s, "coupling", path, float, default=d.coupling),
        cutoff_frequency=cutoff,
        band=band or d.band,
        n_modes=r.get(s, "n_modes", path, int, default=d.n_modes),
        fock_cutoff=r.get(s, "fock_cutoff", path, int, default=d.fock_cutoff),
        pattern=pattern,
        table=table,
    )
    if table is not None and None in table:
        return None
    for e in spec.validation_errors():
        r.error(path, e)
    return spec


def _bath(r, data, path, n_sites):
    data = r.mapping(data, path, {"modes", "couplings", "spectral"})
    if "spectral" in data:
        if "modes" in data or "couplings" in data:
            r.error(path, "give either explicit modes or a spectral density, not both")
            return None, None
        spec = _spectral(r, data["spectral"], path + ("spectral",))
        if spec is not None and spec.pattern != "uniform" and n_sites is not None \
                and len(spec.pattern) != n_sites:
            r.error(path + ("spectral", "pattern"),
                    f"expected {n_sites} per-site scales, got {len(spec.pattern)}")
        return None, spec
    modes = [r.row(m, path + ("modes", k), (float, int))
             for k, m in enumerate(r.get(data, "modes", path, list, required=True, default=[]))]
    rows = r.get(data, "couplings", path, list, required=True, default=[])
    couplings = []
    for i, row in enumerate(rows):
        row = r.convert(row, path + ("couplings", i), list, [])
        couplings.append(tuple(r.convert(g, path + ("couplings", i, k), float)
                               for k, g in enumerate(row)))
    if None in modes or any(None in row for row in couplings):
        return None, None
    if n_sites is not None and len(couplings) != n_sites:
        r.error(path + ("couplings",), f"expected {n_sites} rows (one per site), got {len(couplings)}")
        return None, None
    return _checked(r, path, BathSpec, tuple(modes), tuple(couplings)), None


def parse_scenario(text):
    """Parse and validate scenario text.

    Raises
    ------
    ValidationError
        With ``errors`` listing every problem found, each naming the field
        path and line.
    """
    try:
        root = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" (line {mark.line + 1})" if mark else ""
        raise ValidationError(f"syntax error{where}: {getattr(exc, 'problem', exc)}") from None
    r = _Reader(_line_map(root) if root is not None else {})
    top = {"schema", "name", "description", "network", "bath", "channels", "initial",
           "integrator", "observables", "output", "sweep"}
    data = r.mapping(data, (), top)
    schema = data.get("schema")
    if schema != SCHEMA:
        r.error(("schema",), f"unsupported schema version {schema!r}; expected {SCHEMA!r}")
        raise ValidationError(r.errors[0], r.errors)
    name = r.get(data, "name", (), str, required=True)
    if name is not None and (not name or any(c in name for c in "/\\ \t\n")):
        r.error(("name",), "name must be non-empty without whitespace or path separators")
    description = r.get(data, "description", (), str, default="")

    network = generator = None
    if "network" not in data:
        r.error(("network",), "required field is missing")
    else:
        network, generator = _network(r, data["network"], ("network",))
    net = network or (generator.build() if generator else None)
    n = net.n_sites if net else None

    bath = spectral = None
    if data.get("bath") is not None:
        bath, spectral = _bath(r, data["bath"], ("bath",), n)

    path = ("channels",)
    ch = r.mapping(data.get("channels") or {}, path, {"dephasing", "hops"})
    dephasing = ch.get("dephasing", 0.0)
    if isinstance(dephasing, list):
        dephasing = tuple(r.convert(g, path + ("dephasing", k), float)
                          for k, g in enumerate(dephasing))
        if n is not None and len(dephasing) != n:
            r.error(path + ("dephasing",), f"expected {n} per-site rates, got {len(dephasing)}")
        rates = dephasing
    else:
        dephasing = r.convert(dephasing, path + ("dephasing",), float, 0.0)
        rates = (dephasing,)
    for k, g in enumerate(rates):
        if g is not None and g < 0:
            r.error(path + ("dephasing",), f"rate {k} must be >= 0, got {g}")
    hops = []
    for k, h in enumerate(r.get(ch, "hops", path, list, default=[])):
        row = r.row(h, path + ("hops", k), (int, int, float))
        if row is None:
            continue
        i, j, rate = row
        if n is not None and (not (0 <= i < n and 0 <= j < n) or i == j):
            r.error(path + ("hops", k), f"hop ({i} -> {j}) needs two distinct sites in [0, {n})")
        elif rate < 0:
            r.error(path + ("hops", k), f"rate must be >= 0, got {rate}")
        else:
            hops.append(row)
    if (bath or spectral) and (any(g for g in rates if g) or hops or (net and net.sink)):
        r.error(("bath",), "an explicit bath is propagated unitarily; remove channels and sink")

    path = ("initial",)
    ini = r.mapping(data.get("initial") or {}, path, {"site", "amplitudes"})
    initial_site, amplitudes = 0, None
    if "amplitudes" in ini:
        if "site" in ini:
            r.error(path, "give either site or amplitudes, not both")
        rows = r.convert(ini["amplitudes"], path + ("amplitudes",), list, [])
        amps = [r.row(a, path + ("amplitudes", k), (float, float)) for k, a in enumerate(rows)]
        if None not in amps:
            amplitudes = tuple(amps)
            initial_site = None
            if n is not None and len(amps) != n:
                r.error(path + ("amplitudes",), f"expected {n} amplitudes, got {len(amps)}")
            elif not any(a or b for a, b in amps):
                r.error(path + ("amplitudes",), "amplitudes must not all vanish")
    else:
        initial_site = r.get(ini, "site", path, int, default=0)
        if n is not None and initial_site is not None and not 0 <= initial_site < n:
            r.error(path + ("site",), f"site {initial_site} outside [0, {n})")

    path = ("integrator",)
    if "integrator" not in data:
        r.error(path, "required field is missing")
    it = r.mapping(data.get("integrator", {}), path,
                   {"method", "dt", "t_final", "stride", "krylov_tol"})
    method = r.get(it, "method", path, str, default="auto")
    if method != "auto" and method not in METHODS:
        r.error(path + ("method",), f"method must be auto or one of {METHODS}")
    out = r.mapping(data.get("output") or {}, ("output",), {"snapshots"})
    integrator = _checked(
        r, path, IntegratorConfig,
        dt=r.get(it, "dt", path, float, required=True, default=math.nan),
        t_final=r.get(it, "t_final", path, float, required=True, default=math.nan),
        method=None if method == "auto" else method,
        stride=r.get(it, "stride", path, int, default=1),
        krylov_tol=r.get(it, "krylov_tol", path, float, default=1e-12),
        snapshots=r.get(out, "snapshots", ("output",), bool, default=False),
    ) if it else None

    path = ("observables",)
    obs = r.mapping(data.get("observables") or {}, path, {"origin", "positions", "threshold"})
    origin = r.get(obs, "origin", path, int)
    if origin is not None and n is not None and not 0 <= origin < n:
        r.error(path + ("origin",), f"site {origin} outside [0, {n})")
    positions = r.get(obs, "positions", path, list)
    if positions is not None:
        positions = tuple(r.convert(x, path + ("positions", k), float)
                          for k, x in enumerate(positions))
        if n is not None and len(positions) != n:
            r.error(path + ("positions",), f"expected {n} coordinates, got {len(positions)}")
    threshold = r.get(obs, "threshold", path, float, default=0.5)
    if not 0 < threshold <= 1:
        r.error(path + ("threshold",), "threshold must lie in (0, 1]")

    sweep = None
    if data.get("sweep") is not None:
        path = ("sweep",)
        sw = r.mapping(data["sweep"], path, {"gammas", "window"})
        gammas = sw.get("gammas")
        grid = log = None
        if isinstance(gammas, dict) and set(gammas) == {"log"}:
            log = r.row(gammas["log"], path + ("gammas", "log"), (float, float, int))
            if log and not (0 < log[0] < log[1] and log[2] >= 2):
                r.error(path + ("gammas", "log"), "log grid needs 0 < lo < hi and n >= 2")
        elif isinstance(gammas, list) and gammas:
            grid = tuple(r.convert(g, path + ("gammas", k), float) for k, g in enumerate(gammas))
            if None not in grid and (any(g < 0 for g in grid)
                                     or any(b <= a for a, b in zip(grid, grid[1:]))):
                r.error(path + ("gammas",), "rates must be >= 0 and strictly increasing")
        else:
            r.error(path + ("gammas",), "expected a non-empty list or {log: [lo, hi, n]}")
        window = sw.get("window")
        if window is not None:
            window = r.row(window, path + ("window",), (float, float))
            if window and not 0 < window[0] < window[1]:
                r.error(path + ("window",), "window must satisfy 0 < start < end")
        sweep = SweepSpec(grid, log, window)

    if r.errors:
        raise ValidationError(r.errors[0], r.errors)
    return Scenario(
        name=name, description=description, integrator=integrator, network=network,
        generator=generator, bath=bath, spectral=spectral, dephasing=dephasing,
        hops=tuple(hops), initial_site=initial_site, initial_amplitudes=amplitudes,
        origin=origin, positions=positions, threshold=threshold, sweep=sweep)


# --------------------------------------------------------------------------
# serialization


def _dist(d):
    if d.kind == "constant":
        return {"constant": d.a}
    return {d.kind: [d.a, d.b]}


def _to_tree(s):
    tree = {"schema": s.schema, "name": s.name, "description": s.description}
    if s.generator is not None:
        g = s.generator
        topo = g.topology if isinstance(g.topology, str) else [list(e) for e in g.topology]
        tree["network"] = {
            "generator": {"n_sites": g.n_sites, "topology": topo,
                          "energies": _dist(g.energies), "couplings": _dist(g.couplings),
                          "seed": g.seed},
            "sink": list(g.sink) if g.sink else None,
        }
    else:
        net = s.network
        tree["network"] = {
            "n_sites": net.n_sites,
            "energies": list(net.on_site_energies),
            "couplings": [list(c) for c in net.couplings],
            "sink": list(net.sink) if net.sink else None,
        }
    if s.bath is not None:
        tree["bath"] = {"modes": [list(m) for m in s.bath.modes],
                        "couplings": [list(row) for row in s.bath.couplings]}
    elif s.spectral is not None:
        sp_ = s.spectral
        tree["bath"] = {"spectral": {
            "family": sp_.family, "coupling": sp_.coupling,
            "cutoff_frequency": sp_.cutoff_frequency, "band": list(sp_.band),
            "n_modes": sp_.n_modes, "fock_cutoff": sp_.fock_cutoff,
            "pattern": sp_.pattern if sp_.pattern == "uniform" else list(sp_.pattern),
            "table": [list(row) for row in sp_.table] if sp_.table else None,
        }}
    tree["channels"] = {
        "dephasing": list(s.dephasing) if isinstance(s.dephasing, tuple) else s.dephasing,
        "hops": [list(h) for h in s.hops],
    }
    if s.initial_amplitudes is not None:
        tree["initial"] = {"amplitudes": [list(a) for a in s.initial_amplitudes]}
    else:
        tree["initial"] = {"site": s.initial_site}
    cfg = s.integrator
    tree["integrator"] = {"method": cfg.method or "auto", "dt": cfg.dt, "t_final": cfg.t_final,
                          "stride": cfg.stride, "krylov_tol": cfg.krylov_tol}
    tree["observables"] = {"origin": s.origin,
                           "positions": list(s.positions) if s.positions else None,
                           "threshold": s.threshold}
    tree["output"] = {"snapshots": cfg.snapshots}
    if s.sweep is not None:
        sw = s.sweep
        tree["sweep"] = {
            "gammas": list(sw.gammas) if sw.gammas is not None else {"log": list(sw.log)},
            "window": list(sw.window) if sw.window else None,
        }
    return tree


class _Dumper(yaml.SafeDumper):
    pass


def _represent_float(dumper, value):
    # Fixed repr so output is byte-stable across platforms.
    if math.isinf(value):
        text = ".inf" if value > 0 else "-.inf"
    elif math.isnan(value):
        text = ".nan"
    else:
        text = repr(value)
        if "e" in text and "." not in text.split("e")[0]:
            mant, exp = text.split("e")
            text = f"{mant}.0e{exp}"
    return dumper.represent_scalar("tag:yaml.org,2002:float", text)


_Dumper.add_representer(float, _represent_float)


def serialize_scenario(scenario):
    """Canonical YAML text for ``scenario`` with all defaults written out."""
    return yaml.dump(_to_tree(scenario), Dumper=_Dumper, sort_keys=False,
                     default_flow_style=None, allow_unicode=True, width=100)


def load_scenario(path):
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def preset_names():
    files = resources.files("holsim.presets").iterdir()
    return sorted(f.name[:-5] for f in files if f.name.endswith(".yaml"))


def preset_text(name):
    if name not in preset_names():
        raise ValidationError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return resources.files("holsim.presets").joinpath(f"{name}.yaml").read_text(encoding="utf-8")
