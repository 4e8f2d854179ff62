"""Batch command-line interface.

Subcommands: ``simulate``, ``sweep-dephasing``, ``crossover``, ``walk``,
``memory`` and ``preset``.  Each run writes CSV files plus ``manifest.json``
into ``<out-root>/<name>-<hash>/``.  The hash covers the canonical scenario
text and the flags that change results, so identical inputs land in the same
directory.  An existing non-empty directory is only reused with
``--overwrite``.

Environment overrides: ``HOLSIM_OUT_ROOT`` (default ``./out``) and
``HOLSIM_JOBS`` (default 1).

Exit codes: 0 success, 2 validation, 3 integrator, 4 I/O, 5 resource.  On
failure one JSON object ``{"error": <category>, "message": ..., "details": [...]}``
is printed to stderr.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import platform
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .dynamics import ChannelSpec, density_matrix, evolve_open, evolve_unitary
from .errors import IntegratorError, ResourceError, ValidationError
from .memory import MemoryModel, format_bits, max_qubits, qubit_state_bits
from .model import ProductBasis, build_system_hamiltonian, build_total_hamiltonian
from .scenario import (
    SCHEMA,
    parse_scenario,
    preset_names,
    preset_text,
    serialize_scenario,
)
from .transport import crossover_scan, mean_squared_displacement, sweep_dephasing
from .walks import CoinSpec, classical_walk, quantum_walk

__all__ = ["main", "run"]

EXIT_OK, EXIT_VALIDATION, EXIT_INTEGRATOR, EXIT_IO, EXIT_RESOURCE = 0, 2, 3, 4, 5


def _fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _read_scenario_arg(path):
    """Scenario text from a YAML file or from a previous run's manifest.json."""
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".json"):
        try:
            return json.loads(text)["scenario"]
        except (ValueError, KeyError):
            raise ValidationError(f"{path} is not a run manifest with a scenario") from None
    return text


def _digest(*parts):
    h = hashlib.sha256()
    for p in parts:
        h.update(p.encode("utf-8"))
        h.update(b"\0")
    return h.hexdigest()


def _prepare_dir(args, label, digest):
    if args.out:
        out = Path(args.out)
    else:
        root = Path(args.out_root or os.environ.get("HOLSIM_OUT_ROOT", "out"))
        out = root / f"{label}-{digest[:12]}"
    if out.exists() and any(out.iterdir()) and not args.overwrite:
        raise FileExistsError(f"output directory {out} is not empty; pass --overwrite")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _manifest(out, subcommand, digest, started, files, scenario=None, text=None,
              extra=None, flags=None):
    manifest = {
        "subcommand": subcommand,
        "schema": SCHEMA,
        "inputs_hash": digest,
        "flags": flags or {},
        "seeds": scenario.seeds if scenario else {},
        "versions": {"holsim": __version__, "python": platform.python_version(),
                     "numpy": np.__version__, "scipy": scipy.__version__},
        "outputs": sorted(files),
        "wall_time_s": round(time.perf_counter() - started, 6),
    }
    if scenario is not None:
        manifest["scenario"] = text
        manifest["spectral_family"] = scenario.spectral.family if scenario.spectral else None
    manifest.update(extra or {})
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _jobs(args):
    if args.jobs is not None:
        return args.jobs
    value = os.environ.get("HOLSIM_JOBS", "1")
    try:
        return int(value)
    except ValueError:
        raise ValidationError(f"HOLSIM_JOBS must be an integer, got {value!r}") from None


def _trajectory_rows(traj):
    for k, t in enumerate(traj.times):
        yield [t, *traj.populations[k], traj.coherence[k], traj.trace[k], traj.sink_captured[k]]


def _simulate(scenario):
    net = scenario.site_network()
    bath = scenario.bath_spec()
    cfg = scenario.integrator
    psi_sites = scenario.initial_site_vector()
    if bath is not None:
        basis = ProductBasis.for_bath(net.n_sites, bath)
        H = build_total_hamiltonian(net, bath, basis)
        psi0 = np.kron(psi_sites, np.eye(basis.bath_dim)[0])
        traj = evolve_unitary(H, psi0, cfg, n_sites=net.n_sites)
        return traj, "unitary", cfg.resolve_method(basis.total_dim)
    channels = ChannelSpec.from_network(net, scenario.dephasing_rates(), scenario.hops)
    traj = evolve_open(build_system_hamiltonian(net), channels, density_matrix(psi_sites), cfg)
    return traj, "open", cfg.resolve_method(net.n_sites**2)


def cmd_simulate(args):
    started = time.perf_counter()
    scenario = parse_scenario(_read_scenario_arg(args.scenario))
    text = serialize_scenario(scenario)
    digest = _digest("simulate", text)
    out = _prepare_dir(args, scenario.name, digest)
    traj, mode, method = _simulate(scenario)
    n = traj.n_sites
    files = ["trajectory.csv"]
    _write_csv(out / "trajectory.csv",
               ["t", *[f"pop_{i}" for i in range(n)], "l1_coherence", "trace", "sink_captured"],
               _trajectory_rows(traj))
    if scenario.origin is not None:
        msd = mean_squared_displacement(traj, scenario.origin, scenario.site_positions())
        _write_csv(out / "msd.csv", ["t", "msd"], msd)
        files.append("msd.csv")
    if traj.states is not None:
        rows = []
        for t, state in zip(traj.times, traj.states):
            arr = np.atleast_1d(state)
            for idx in np.ndindex(arr.shape):
                rows.append([t, *idx, arr[idx].real, arr[idx].imag])
        index_cols = ["i", "j"] if mode == "open" else ["index"]
        _write_csv(out / "snapshots.csv", ["t", *index_cols, "re", "im"], rows)
        files.append("snapshots.csv")
    _manifest(out, "simulate", digest, started, files, scenario, text,
              {"mode": mode, "method": method})
    return out


def cmd_sweep(args):
    started = time.perf_counter()
    scenario = parse_scenario(_read_scenario_arg(args.scenario))
    if scenario.sweep is None:
        raise ValidationError("scenario has no sweep block")
    if scenario.bath is not None or scenario.spectral is not None:
        raise ValidationError("dephasing sweeps use the Markovian model; remove the bath block")
    text = serialize_scenario(scenario)
    digest = _digest("sweep-dephasing", text)
    out = _prepare_dir(args, scenario.name, digest)
    net = scenario.site_network()
    curve = sweep_dephasing(net, scenario.sweep.grid(), scenario.integrator,
                            initial=scenario.initial_site_vector(), hops=scenario.hops,
                            threshold=scenario.threshold, jobs=_jobs(args))
    _write_csv(out / "sweep.csv", ["gamma", "eta", "t50"], curve.points)
    _manifest(out, "sweep-dephasing", digest, started, ["sweep.csv"], scenario, text,
              {"horizon": scenario.integrator.t_final, "threshold": scenario.threshold},
              {"jobs": _jobs(args)})
    return out


def cmd_crossover(args):
    started = time.perf_counter()
    scenario = parse_scenario(_read_scenario_arg(args.scenario))
    if scenario.sweep is None:
        raise ValidationError("scenario has no sweep block")
    text = serialize_scenario(scenario)
    digest = _digest("crossover", text)
    out = _prepare_dir(args, scenario.name, digest)
    net = scenario.site_network()
    report = crossover_scan(net, scenario.sweep.grid(), scenario.integrator,
                            origin_site=scenario.origin, window=scenario.sweep.window,
                            jobs=_jobs(args))
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    _write_csv(out / "crossover.csv", ["gamma", "alpha", "residual"],
               [p[:3] for p in report.points])
    _manifest(out, "crossover", digest, started, ["crossover.csv"], scenario, text,
              {"window": list(report.window), "warnings": list(report.warnings),
               "alpha_stderr": [p[3] for p in report.points]}, {"jobs": _jobs(args)})
    return out


def cmd_walk(args):
    started = time.perf_counter()
    M = args.steps
    kinds = ["classical", "quantum"] if args.kind == "both" else [args.kind]
    flags = {"steps": M, "kind": args.kind, "coin_state": args.coin_state}
    digest = _digest("walk", json.dumps(flags, sort_keys=True))
    out = _prepare_dir(args, f"walk-M{M}", digest)
    summary, files = [], []
    for kind in kinds:
        if kind == "classical":
            dist = classical_walk(M)
        else:
            dist = quantum_walk(M, CoinSpec.hadamard(args.coin_state))
        name = f"walk_{kind}.csv"
        _write_csv(out / name, ["position", "probability"],
                   zip(dist.positions, dist.probabilities))
        files.append(name)
        summary.append([kind, M, dist.std()])
    with open(out / "walk_summary.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["kind", "M", "stddev"])
        for kind, m, s in summary:
            writer.writerow([kind, m, _fmt(s)])
    files.append("walk_summary.csv")
    _manifest(out, "walk", digest, started, files, flags=flags)
    return out


def cmd_memory(args):
    model = MemoryModel(bits_per_component=args.bits_per_component)
    if args.qubits is None and args.budget_bits is None:
        raise ValidationError("give --qubits and/or --budget-bits")
    if args.qubits is not None:
        bits = qubit_state_bits(args.qubits, model)
        print(f"{args.qubits} qubits: {bits} bits ({format_bits(bits)})")
    if args.budget_bits is not None:
        n = max_qubits(args.budget_bits, model)
        print(f"budget {args.budget_bits} bits ({format_bits(args.budget_bits)}): "
              f"at most {n} qubits")
    return None


def cmd_preset(args):
    if args.name is None:
        for name in preset_names():
            print(name)
        return None
    text = preset_text(args.name)
    if args.write:
        path = Path(args.write)
        if path.exists() and not args.overwrite:
            raise FileExistsError(f"{path} exists; pass --overwrite")
        path.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return None


def _add_output_flags(p):
    p.add_argument("--out", help="output directory (default: <out-root>/<name>-<hash>)")
    p.add_argument("--out-root", help="root for default output directories "
                                      "(env HOLSIM_OUT_ROOT, default ./out)")
    p.add_argument("--overwrite", action="store_true", help="reuse a non-empty output directory")


def build_parser():
    parser = argparse.ArgumentParser(prog="holsim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"holsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="propagate one scenario and write its trajectory")
    p.add_argument("scenario", help="scenario YAML file or a previous manifest.json")
    _add_output_flags(p)
    p.set_defaults(func=cmd_simulate)

    for name, func, text in (("sweep-dephasing", cmd_sweep, "transfer efficiency vs dephasing"),
                             ("crossover", cmd_crossover, "spreading exponent vs dephasing")):
        p = sub.add_parser(name, help=text)
        p.add_argument("scenario", help="scenario YAML file or a previous manifest.json")
        p.add_argument("--jobs", type=int, help="worker processes (env HOLSIM_JOBS, default 1)")
        _add_output_flags(p)
        p.set_defaults(func=func)

    p = sub.add_parser("walk", help="classical and/or Hadamard quantum walk distributions")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--kind", choices=["classical", "quantum", "both"], default="both")
    p.add_argument("--coin-state", choices=["0", "1", "symmetric"], default="symmetric")
    _add_output_flags(p)
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("memory", help="bits needed to store an n-qubit state")
    p.add_argument("--qubits", type=int)
    p.add_argument("--budget-bits", type=int)
    p.add_argument("--bits-per-component", type=int, default=32)
    p.set_defaults(func=cmd_memory)

    p = sub.add_parser("preset", help="list presets, or print/write one")
    p.add_argument("name", nargs="?")
    p.add_argument("--write", help="write the preset to this path instead of stdout")
    p.add_argument("--overwrite", action="store_true")
    p.set_defaults(func=cmd_preset)
    return parser


def _fail(code, category, message, details=()):
    payload = {"error": category, "message": message, "details": list(details)}
    print(json.dumps(payload), file=sys.stderr)
    return code


def run(argv=None):
    """Parse ``argv``, run the subcommand and return ``(exit_code, output_dir_or_None)``."""
    args = build_parser().parse_args(argv)
    try:
        out = args.func(args)
    except ValidationError as exc:
        return _fail(EXIT_VALIDATION, "validation", str(exc), exc.errors), None
    except IntegratorError as exc:
        return _fail(EXIT_INTEGRATOR, "integrator", str(exc),
                     [f"{k}={v}" for k, v in exc.diagnostics.items()]), None
    except (ResourceError, OverflowError, MemoryError) as exc:
        return _fail(EXIT_RESOURCE, "resource", str(exc)), None
    except OSError as exc:
        return _fail(EXIT_IO, "io", str(exc)), None
    if out is not None:
        print(out)
    return EXIT_OK, out


def main(argv=None):
    return run(argv)[0]


if __name__ == "__main__":
    sys.exit(main())
