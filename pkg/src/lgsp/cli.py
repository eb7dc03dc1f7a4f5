"""Experiment driver: desk-scale studies with CSV/SVG artifacts.

Modes
-----
hf-type1     quasi-free 1-RDM propagation of a Fock-matrix model
hf-type2     full density propagation of the pair-coupling HF model
fci-density  density propagation of an FCIDUMP Hamiltonian
fci-traj     quantum-jump trajectory ensemble of the same model
gap          generator spectral gap and parent-Hamiltonian diagnostics
filter-scan  tabulate the filter in frequency and time domain
resource     scaling estimate t_mix^2 * gap^-1 * N^k / eps

A config file of `key = value` lines (keys = flag names without `--`)
can predefine any flag; explicit flags win.  Every run writes
manifest.txt with resolved settings, input digests, and versions, so a
rerun from the manifest is bit-identical.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path

import numpy as np

from . import __version__, basis, filters, integrals, jumps, lindblad, quasifree, trajectory
from .errors import CapacityError, DiagnosticError, StiffnessError
from .svgplot import write_line_plot

MODES = ("hf-type1", "hf-type2", "fci-density", "fci-traj", "gap", "filter-scan", "resource")
USAGE_EXIT, FAILURE_EXIT = 2, 1


class UsageError(Exception):
    pass


def _build_parser():
    p = argparse.ArgumentParser(prog="lgsp", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--config", type=Path, help="key = value file; flags override it")
    p.add_argument("--fcidump", type=Path)
    p.add_argument("--fock", type=Path)
    p.add_argument("--nelec", type=int, help="electron count for Fock-matrix inputs")
    p.add_argument("--coupling", choices=jumps.COUPLING_KINDS)
    p.add_argument("--r", type=int, help="active-window half-width for s1/s2/t2")
    p.add_argument("--init", help="vacuum | hf | excited:P:Q | random:SEED")
    p.add_argument("--T", type=float, dest="t_final")
    p.add_argument("--dt", type=float)
    p.add_argument("--ntraj", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--gap", type=float, help="spectral-gap override (Hartree)")
    p.add_argument("--filter", choices=("erf", "ideal"), dest="filter_kind")
    p.add_argument("--jumps", choices=("exact", "quadrature"), dest="jump_method")
    p.add_argument("--filter-a", type=float)
    p.add_argument("--filter-b", type=float)
    p.add_argument("--delta-a", type=float)
    p.add_argument("--delta-b", type=float)
    p.add_argument("--s-max", type=float, help="quadrature truncation time override")
    p.add_argument("--m-nodes", type=int, help="quadrature nodes per half-interval")
    p.add_argument("--pmax", type=float, help="per-step total jump probability guard")
    p.add_argument("--variant", choices=trajectory.VARIANTS)
    p.add_argument("--log-events", action="store_true", default=None)
    p.add_argument("--samples", type=int, help="observable sampling points")
    p.add_argument("--tmix", type=float, help="resource mode: mixing time")
    p.add_argument("--eps", type=float, help="resource mode: target precision")
    p.add_argument("--poly-n", type=float, help="resource mode: system size N")
    p.add_argument("--poly-k", type=float, help="resource mode: polynomial degree")
    p.add_argument("--out", type=Path)
    return p


_DEFAULTS = {
    "init": "hf", "t_final": 30.0, "dt": 0.1, "ntraj": 100, "seed": 0,
    "filter_kind": "erf", "jump_method": "exact", "pmax": trajectory.DEFAULT_P_MAX,
    "variant": "per-step", "log_events": False, "samples": 201, "r": 1,
    "out": Path("lgsp-out"),
}


def _read_config_file(path: Path):
    values = {}
    for ln, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {ln}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = val
    return values


def resolve_config(argv=None):
    parser = _build_parser()
    args = vars(parser.parse_args(argv))
    if args.get("config"):
        file_vals = _read_config_file(args["config"])
        for key, raw in file_vals.items():
            if key not in args:
                raise UsageError(f"config key {key!r} is not a recognized flag")
            if args[key] is None:
                spec = {"fcidump": Path, "fock": Path, "out": Path, "nelec": int,
                        "r": int, "ntraj": int, "seed": int, "samples": int,
                        "t_final": float, "dt": float, "gap": float, "pmax": float,
                        "filter_a": float, "filter_b": float, "delta_a": float,
                        "delta_b": float, "s_max": float, "m_nodes": int,
                        "tmix": float, "eps": float,
                        "poly_n": float, "poly_k": float,
                        "log_events": lambda s: s.lower() in ("1", "true", "yes")}
                args[key] = spec.get(key, str)(raw)
    for key, val in _DEFAULTS.items():
        if args.get(key) is None:
            args[key] = val
    if not args.get("mode"):
        raise UsageError("missing required field: --mode")
    return args


def _digest(path: Path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(outdir: Path, cfg: dict, extra: dict, status="ok"):
    lines = [f"lgsp_version = {__version__}",
             f"numpy_version = {np.__version__}",
             f"status = {status}"]
    for key in sorted(cfg):
        if key == "config":
            continue
        val = cfg[key]
        if isinstance(val, Path):
            lines.append(f"{key} = {val}")
            if val.exists() and val.is_file():
                lines.append(f"{key}_sha256 = {_digest(val)}")
        elif val is not None:
            lines.append(f"{key} = {val}")
    for key in sorted(extra):
        lines.append(f"{key} = {extra[key]}")
    (outdir / "manifest.txt").write_text("\n".join(lines) + "\n")


def _require(cfg, field):
    if cfg.get(field) is None:
        raise UsageError(f"mode {cfg['mode']!r} requires --{field.replace('_', '-')}")
    return cfg[field]


def _load_fock_model(cfg):
    path = _require(cfg, "fock")
    mat = integrals.parse_fock_matrix(path.read_text())
    return quasifree.FockModel(mat, _require(cfg, "nelec"))


def _initial_rdm(cfg, model: quasifree.FockModel):
    spec = cfg["init"]
    n = model.n_spin
    if spec == "vacuum":
        return np.zeros((n, n), dtype=complex)
    if spec == "hf":
        return model.aufbau_projector()
    if spec.startswith("random:"):
        rng = np.random.default_rng(int(spec.split(":", 1)[1]))
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        h = 0.5 * (a + a.conj().T)
        vals, vecs = np.linalg.eigh(h)
        occ = 1.0 / (1.0 + np.exp(-vals))
        return vecs @ np.diag(occ) @ vecs.conj().T
    if spec.startswith("excited:"):
        _, p, q = spec.split(":")
        occ = np.zeros(n)
        occ[:model.n_electrons] = 1.0
        occ[int(p) - 1], occ[int(q) - 1] = 0.0, 1.0
        return model.phi @ np.diag(occ) @ model.phi.conj().T
    raise UsageError(f"unknown init spec {spec!r}")


def _initial_state_vector(cfg, sector_basis, n_electrons=None):
    spec = cfg["init"]
    dim = sector_basis.dim
    psi = np.zeros(dim, dtype=complex)
    n_elec = (sector_basis.n_electrons if sector_basis.n_electrons is not None
              else n_electrons)

    def det_index(occupied):
        bits = sum(1 << (p - 1) for p in occupied)
        if bits not in sector_basis.index:
            raise UsageError(f"init determinant {sorted(occupied)} outside the basis sector")
        return sector_basis.position(bits)

    if spec == "vacuum":
        psi[det_index([])] = 1.0
    elif spec == "hf":
        if n_elec is None:
            raise UsageError("init hf needs an electron count")
        psi[det_index(range(1, n_elec + 1))] = 1.0
    elif spec.startswith("excited:"):
        _, p, q = spec.split(":")
        occupied = set(range(1, n_elec + 1))
        if int(p) not in occupied or int(q) in occupied:
            raise UsageError(f"excited:{p}:{q} is not a particle-hole move on the aufbau state")
        occupied.discard(int(p))
        occupied.add(int(q))
        psi[det_index(occupied)] = 1.0
    elif spec.startswith("random:"):
        rng = np.random.default_rng(int(spec.split(":", 1)[1]))
        psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        psi /= np.linalg.norm(psi)
    else:
        raise UsageError(f"unknown init spec {spec!r}")
    return psi


def _build_fci_model(cfg):
    """FCIDUMP -> (LindbladModel, eigensystem, sector basis)."""
    path = _require(cfg, "fcidump")
    ints = integrals.parse_fcidump(path.read_text())
    kind = _require(cfg, "coupling")
    number_conserving = kind in ("type2", "s2", "t2")
    sector = ints.n_electrons if number_conserving else None
    b = basis.enumerate_basis(ints.L, sector)
    ham = integrals.assemble_hamiltonian(ints, b)
    eig = ham.eigensystem()
    gap = cfg.get("gap") or eig.gap
    norm_h = ham.norm2()

    if cfg["filter_kind"] == "ideal":
        diffs = np.diff(eig.values)
        diffs = diffs[diffs > 1e-8 * max(1.0, norm_h)]
        filt = filters.IdealFilter(float(diffs.min()) if len(diffs) else gap)
        params, grid = None, None
    else:
        params, grid = filters.default_filter_params(norm_h, gap)
        overrides = {"a": cfg.get("filter_a"), "b": cfg.get("filter_b"),
                     "delta_a": cfg.get("delta_a"), "delta_b": cfg.get("delta_b")}
        if any(v is not None for v in overrides.values()):
            params = filters.FilterParams(
                a=overrides["a"] or params.a, b=overrides["b"] or params.b,
                delta_a=overrides["delta_a"] or params.delta_a,
                delta_b=overrides["delta_b"] or params.delta_b)
        if cfg.get("s_max") or cfg.get("m_nodes"):
            grid = filters.QuadratureGrid(cfg.get("s_max") or grid.s_max,
                                          cfg.get("m_nodes") or grid.m)
        filt = params

    couple = jumps.build_coupling_set(kind, ints.L, ints.n_electrons, b, r=cfg["r"])
    if cfg["jump_method"] == "quadrature":
        if cfg["filter_kind"] == "ideal":
            raise UsageError("quadrature jumps need the erf filter")
        jset = jumps.jump_set_quadrature(ham, couple, params, grid)
    else:
        jset = jumps.jump_set_exact(eig, couple, filt)
    model = lindblad.LindbladModel(ham, jset)
    return model, eig, b, ints


def _sample_grid(cfg):
    return np.linspace(0.0, cfg["t_final"], cfg["samples"])


def _emit_series(outdir, name, series):
    csv_path = outdir / f"series_{name}.csv"
    with open(csv_path, "w") as fh:
        series.to_csv(fh)
    data = {"energy": series.energy}
    if not np.all(np.isnan(series.overlap)):
        data["overlap"] = series.overlap
    write_line_plot(outdir / f"plot_{name}.svg", series.times, data,
                    title=name, xlabel="t (1/Hartree)", ylabel="value")


def _run_hf_type1(cfg, outdir):
    model = _load_fock_model(cfg)
    coeffs = quasifree.bc_matrices(model, "ideal")
    p0 = _initial_rdm(cfg, model)
    traj = quasifree.propagate_rdm(model, coeffs, p0, cfg["t_final"],
                                   sample_times=_sample_grid(cfg))
    energies = np.array([float(np.trace(p @ model.f).real) for p in traj.matrices])
    e_star = float(np.trace(model.aufbau_projector() @ model.f).real)
    with open(outdir / "series_energy.csv", "w") as fh:
        fh.write("t,energy,normalized_error\n")
        denom = abs(energies[0] - e_star) or 1.0
        for t, e in zip(traj.times, energies):
            fh.write(f"{t:.12g},{e:.12g},{abs(e - e_star) / denom:.12g}\n")
    mo_traj = traj.mo_gauge(model)
    with open(outdir / "series_rdm.csv", "w") as fh:
        mo_traj.to_csv(fh)
    occupations = {f"n{p + 1}": np.array([m[p, p].real for m in mo_traj.matrices])
                   for p in range(model.n_spin)}
    write_line_plot(outdir / "plot_rdm.svg", traj.times, occupations,
                    title="orbital occupations", xlabel="t (1/Hartree)")
    write_line_plot(outdir / "plot_energy.svg", traj.times, {"energy": energies},
                    title="hf-type1 energy", xlabel="t (1/Hartree)", ylabel="Hartree")
    return {"stationary_energy": e_star, "final_energy": float(energies[-1])}


def _run_hf_type2(cfg, outdir):
    model = _load_fock_model(cfg)
    b = basis.enumerate_basis(model.n_spin // 2, model.n_electrons)
    many = quasifree.build_hf_manybody_model(model, "type2", b)
    psi0 = _initial_state_vector(cfg, b, model.n_electrons)
    rho0 = np.outer(psi0, psi0.conj())
    ground = np.zeros(b.dim)
    ground[b.position(sum(1 << p for p in range(model.n_electrons)))] = 1.0
    series, _rho = lindblad.propagate_density(
        many, rho0, cfg["t_final"], sample_times=_sample_grid(cfg),
        ground_state=ground, with_rdm=True)
    _emit_series(outdir, "observables", series)
    traj = quasifree.RdmTrajectory(series.times, series.rdms, "molecular-orbital")
    with open(outdir / "series_rdm.csv", "w") as fh:
        traj.to_csv(fh)
    occupations = {f"n{p + 1}": np.array([m[p, p].real for m in series.rdms])
                   for p in range(model.n_spin)}
    write_line_plot(outdir / "plot_rdm.svg", series.times, occupations,
                    title="orbital occupations", xlabel="t (1/Hartree)")
    return {"final_energy": float(series.energy[-1]),
            "final_overlap": float(series.overlap[-1])}


def _run_fci_density(cfg, outdir):
    model, eig, b, ints = _build_fci_model(cfg)
    psi0 = _initial_state_vector(cfg, b, ints.n_electrons)
    rho0 = np.outer(psi0, psi0.conj())
    series, _rho = lindblad.propagate_density(
        model, rho0, cfg["t_final"], sample_times=_sample_grid(cfg),
        ground_state=eig.ground_state)
    _emit_series(outdir, "observables", series)
    return {"ground_energy": eig.ground_energy,
            "final_energy": float(series.energy[-1]),
            "final_energy_error": float(abs(series.energy[-1] - eig.ground_energy)),
            "final_overlap": float(series.overlap[-1]),
            "chemical_accuracy": 1.6e-3,
            "within_chemical_accuracy":
                bool(abs(series.energy[-1] - eig.ground_energy) <= 1.6e-3)}


def _run_fci_traj(cfg, outdir):
    model, eig, b, ints = _build_fci_model(cfg)
    psi0 = _initial_state_vector(cfg, b, ints.n_electrons)
    tcfg = trajectory.TrajectoryConfig(
        dt=cfg["dt"], t_final=cfg["t_final"], n_traj=cfg["ntraj"],
        master_seed=cfg["seed"], variant=cfg["variant"], p_max=cfg["pmax"],
        log_events=cfg["log_events"])
    ens = trajectory.run_ensemble(model, psi0, tcfg, ground_state=eig.ground_state)
    with open(outdir / "series_ensemble.csv", "w") as fh:
        ens.to_csv(fh)
    write_line_plot(outdir / "plot_ensemble.svg", ens.times,
                    {"mean energy": ens.mean_energy, "mean overlap": ens.mean_overlap},
                    title="trajectory ensemble", xlabel="t (1/Hartree)", ylabel="value")
    if cfg["log_events"]:
        for idx in range(tcfg.n_traj):
            res = trajectory.run_trajectory(model, psi0, tcfg, idx,
                                            ground_state=eig.ground_state)
            with open(outdir / f"events_traj{idx}.csv", "w") as fh:
                fh.write("t,channel\n")
                for t, k in res.events:
                    fh.write(f"{t:.12g},{k}\n")
    return {"ground_energy": eig.ground_energy,
            "final_mean_energy": float(ens.mean_energy[-1]),
            "final_mean_overlap": float(ens.mean_overlap[-1])}


def _run_gap(cfg, outdir):
    if cfg.get("fcidump"):
        model, _eig, _b, _ints = _build_fci_model(cfg)
    else:
        fock = _load_fock_model(cfg)
        kind = cfg.get("coupling") or "type2"
        if kind not in quasifree.HF_MODEL_KINDS:
            raise UsageError("gap mode on a Fock input needs --coupling type1 or type2")
        sector = None if kind == "type1" else fock.n_electrons
        b = basis.enumerate_basis(fock.n_spin // 2, sector)
        model = quasifree.build_hf_manybody_model(fock, kind, b)
    gap_l = lindblad.spectral_gap(model)
    parent = lindblad.dissipative_parent_hamiltonian(model)
    with open(outdir / "series_gap.csv", "w") as fh:
        fh.write("lindbladian_gap,parent_gap,commutator_norm\n")
        fh.write(f"{gap_l:.12g},{parent.gap:.12g},{parent.commutator_norm:.12g}\n")
    return {"lindbladian_gap": gap_l, "parent_hamiltonian_gap": parent.gap,
            "commutator_norm": parent.commutator_norm}


def _run_filter_scan(cfg, outdir):
    if cfg.get("fcidump"):
        ints = integrals.parse_fcidump(cfg["fcidump"].read_text())
        b = basis.enumerate_basis(ints.L, ints.n_electrons)
        ham = integrals.assemble_hamiltonian(ints, b)
        params, grid = filters.default_filter_params(ham.norm2(),
                                                     cfg.get("gap") or ham.eigensystem().gap)
    else:
        for field in ("filter_a", "filter_b", "delta_a", "delta_b"):
            _require(cfg, field)
        params = filters.FilterParams(cfg["filter_a"], cfg["filter_b"],
                                      cfg["delta_a"], cfg["delta_b"])
        grid = filters.QuadratureGrid(cfg.get("s_max") or 10.0 / params.b,
                                      cfg.get("m_nodes") or 200)
    omega = np.linspace(-1.5 * params.a, 1.5 * params.a, 601)
    fw = params.freq(omega)
    with open(outdir / "series_filter_freq.csv", "w") as fh:
        fh.write("omega,f_hat\n")
        for w, v in zip(omega, fw):
            fh.write(f"{w:.12g},{v:.12g}\n")
    ft = params.time(grid.nodes)
    with open(outdir / "series_filter_time.csv", "w") as fh:
        fh.write("s,re_f,im_f,abs_f\n")
        for s, v in zip(grid.nodes, ft):
            fh.write(f"{s:.12g},{v.real:.12g},{v.imag:.12g},{abs(v):.12g}\n")
    write_line_plot(outdir / "plot_filter_freq.svg", omega, {"f_hat": fw},
                    title="filter (frequency domain)", xlabel="omega (Hartree)")
    write_line_plot(outdir / "plot_filter_time.svg", grid.nodes,
                    {"|f|": np.abs(ft)}, title="filter (time domain)", xlabel="s")
    return {"a": params.a, "b": params.b, "delta_a": params.delta_a,
            "delta_b": params.delta_b, "s_max": grid.s_max, "m_nodes": grid.m}


def resource_estimate(t_mix, gap, n_size, eps, poly_k):
    """Leading-order cost t_mix^2 * gap^-1 * N^k / eps (log factors omitted)."""
    for name, v in (("tmix", t_mix), ("gap", gap), ("poly-n", n_size),
                    ("eps", eps), ("poly-k", poly_k)):
        if v is None or v <= 0:
            raise ValueError(f"resource estimate needs positive --{name}")
    return t_mix ** 2 / gap * n_size ** poly_k / eps


def _run_resource(cfg, outdir):
    est = resource_estimate(cfg.get("tmix"), cfg.get("gap"), cfg.get("poly_n"),
                            cfg.get("eps"), cfg.get("poly_k"))
    with open(outdir / "series_resource.csv", "w") as fh:
        fh.write("estimate\n")
        fh.write(f"{est:.12g}\n")
    return {"resource_estimate": est,
            "note": "logarithmic factors omitted (leading-order scaling)"}


_RUNNERS = {
    "hf-type1": _run_hf_type1, "hf-type2": _run_hf_type2,
    "fci-density": _run_fci_density, "fci-traj": _run_fci_traj,
    "gap": _run_gap, "filter-scan": _run_filter_scan, "resource": _run_resource,
}


def run_experiment(cfg: dict) -> int:
    outdir = Path(cfg["out"])
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        extra = _RUNNERS[cfg["mode"]](cfg, outdir)
    except (ValueError, UsageError) as exc:
        if isinstance(exc, UsageError):
            raise
        _write_manifest(outdir, cfg, {"error": str(exc)}, status="failed")
        print(f"error: {exc}", file=sys.stderr)
        return FAILURE_EXIT
    except (DiagnosticError, StiffnessError, CapacityError) as exc:
        _write_manifest(outdir, cfg, {"error": str(exc)}, status="failed")
        print(f"error: {exc} (partial outputs flagged in manifest)", file=sys.stderr)
        return FAILURE_EXIT
    _write_manifest(outdir, cfg, extra, status="ok")
    for key, val in extra.items():
        print(f"{key} = {val}")
    return 0


def main(argv=None) -> int:
    try:
        cfg = resolve_config(argv)
        return run_experiment(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
