"""Command-line front end: ``giantkerr <command> [--preset NAME] [--config PATH] ...``

Commands write delimited data (CSV), a JSON summary and a ``manifest.json``
holding the fully resolved scenario; passing that manifest back through
``--config`` repeats the run. Exit codes: 0 success, 2 invalid input,
3 solver non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from . import config as cfg
from . import model as nsys
from .circuit import CircuitError, coresonance_energies
from .kerr import EtaFitError, KerrConvergenceError, eta_fit
from .observables import (UndefinedCorrelation, cavity_annihilation, g2_map, g2_tau, g2_zero,
                          solve_nsystem, squeezing_spectrum, table1)
from .solvers import SteadyStateError

log = logging.getLogger("giantkerr")

EXIT_OK, EXIT_INVALID, EXIT_UNCONVERGED = 0, 2, 3
TWO_PI = 2 * np.pi
DUAL_CHECK_FREQS = (0.0, 1.0, 3.0, 10.0, 30.0)


class Unconverged(RuntimeError):
    pass


@dataclass
class Run:
    tree: dict
    out: Path
    si: bool = False
    plots: bool = True

    @property
    def kappa_si(self) -> float:
        k = cfg.kappa_si(self.tree)
        if k is None:
            raise cfg.ConfigError("--si output needs kappa_si (rad/s) or an SI scenario")
        return k

    def rate(self, x):
        """Convert a kappa-unit rate column for output."""
        return np.asarray(x) * self.kappa_si if self.si else np.asarray(x)

    def col(self, name: str) -> str:
        return f"{name}_rad_s" if self.si else f"{name}_over_kappa"

    def path(self, name: str) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        return self.out / name


def write_csv(path: Path, header, rows) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
    return path


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj) if np.isfinite(obj) else None
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_json(path: Path, data) -> Path:
    path.write_text(json.dumps(_jsonable(data), indent=2) + "\n")
    return path


# --- commands -----------------------------------------------------------------


def cmd_levels(run: Run) -> dict:
    if "circuit" not in run.tree:
        raise cfg.ConfigError("levels needs a circuit section")
    circ = run.tree["circuit"]
    spec, freqs = cfg.circuit_spectrum(circ)
    hz = lambda w: w / TWO_PI  # noqa: E731
    warnings = []
    report = {
        "energies_Hz": {f"E{k}": hz(spec.energies[k - 1]) for k in range(1, 5)},
        "epsilon": spec.epsilon,
        "transitions_Hz": {f"{i}{j}": hz(spec.omega(i, j))
                           for i in range(1, 5) for j in range(1, 5) if spec.omega(i, j) > 0},
        "R": spec.R,
        "R_bar_Hz": hz(spec.R_bar),
        "circuit_frequencies_Hz": {k: (np.asarray(v) / TWO_PI).tolist() for k, v in freqs.items()
                                   if k != "C_m"},
    }
    if "C_m" in freqs:
        report["C_m_F"] = freqs["C_m"]
    pairs = spec.degenerate_pairs
    if pairs:
        report["degenerate_pairs"] = pairs
        warnings.append(f"degenerate levels {pairs}")
    if np.allclose(freqs["omega_z_bar"], 0.0) and np.isclose(*freqs["omega_x"]):
        closed = coresonance_energies(freqs["omega_x"][0], freqs["J"])
        numeric = spec.energies[[0, 2, 1, 3]]
        report["coresonance"] = {
            "closed_form_Hz": hz(closed).tolist(),
            "max_rel_deviation": float(np.max(np.abs(numeric - closed)) / np.max(np.abs(closed))),
            "omega23_equals_2J": bool(np.isclose(spec.omega(2, 3), 2 * freqs["J"], rtol=1e-12)),
        }
    if "omega_a_Hz" in circ:
        wa = TWO_PI * float(circ["omega_a_Hz"])
        wc = TWO_PI * float(circ.get("omega_c_Hz") or spec.omega(2, 3) / TWO_PI)
        from .circuit import detunings
        D, d, dc = detunings(spec, wa, wc)
        report["detunings_Hz"] = {"Delta": hz(D), "delta": hz(d), "delta_c": hz(dc)}
        for name, val, gap in (("w43", D, spec.omega(4, 3)), ("w21", d, spec.omega(2, 1))):
            if abs(val) > 1e-6 * wa:
                warnings.append(f"cavity at {hz(wa) / 1e9:.4f} GHz is off resonance with {name} = "
                                f"{hz(gap) / 1e9:.4f} GHz (detuning {hz(val) / 1e6:.2f} MHz)")
    if "kappa_Hz" in circ:
        kap = float(circ["kappa_Hz"])
        report["R_bar_over_kappa"] = hz(spec.R_bar) / kap
        if "detunings_Hz" in report:
            report["detunings_over_kappa"] = {k: v / kap for k, v in report["detunings_Hz"].items()}
    report["warnings"] = warnings
    rows = [(i, j, hz(spec.omega(i, j))) for i in range(1, 5) for j in range(1, 5) if i != j]
    write_csv(run.path("levels.csv"), ["i", "j", "omega_ij_Hz"], rows)
    write_json(run.path("levels.json"), report)
    for w in warnings:
        log.warning(w)
    return report


def cmd_table1(run: Run) -> dict:
    ratio = float(run.tree.get("table1", {}).get("coupling_ratio", 0.1))
    rows = table1(ratio)
    out = []
    for r in rows:
        note = "" if r["eta_over_kappa"] is not None else f"reference value {r['published']:g}, not recomputable"
        out.append((r["work"], r["g"], r["kappa"], r["gamma"], r["eta_over_kappa"], r["rounded"],
                    r["published"], r["matches"], note))
    write_csv(run.path("table1.csv"),
              ["work", "g_MHz", "kappa_MHz", "gamma_MHz", "eta_over_kappa", "rounded", "published",
               "matches", "note"], out)
    summary = {"coupling_ratio": ratio, "rows": rows}
    write_json(run.path("table1.json"), summary)
    return summary


def _solver(run: Run) -> dict:
    return run.tree["solver"]


def _steady(run: Run, p: nsys.NSystemParams):
    s = _solver(run)
    ss = solve_nsystem(p, n_limit=int(s["N_max_limit"]), verify=bool(s["verify_truncation"]))
    return ss, nsys.liouvillian(p.replace(N_max=ss.fock_dim))


def cmd_steady(run: Run) -> dict:
    p = cfg.model_params(run.tree)
    ss, _ = _steady(run, p)
    a = cavity_annihilation(ss.dim, ss.fock_dim)
    alpha = complex(np.trace(a @ ss.rho))
    pops = np.real(np.diag(ss.rho)).reshape(4, ss.fock_dim)
    summary = {
        "N_max": ss.fock_dim, "converged": ss.converged, "residual": ss.residual,
        "top_fock_population": ss.top_fock_population, "min_eigenvalue": ss.min_eigenvalue,
        "n_bar": ss.n_bar, "field_amplitude": [alpha.real, alpha.imag],
        "atom_populations": pops.sum(axis=1), "fock_populations": pops.sum(axis=0),
    }
    try:
        summary["g2_zero"] = g2_zero(ss.rho, ss.fock_dim).g2_zero
    except UndefinedCorrelation as exc:
        summary["g2_zero"] = None
        summary["g2_note"] = str(exc)
    write_json(run.path("steady.json"), summary)
    if not ss.converged:
        raise Unconverged(f"steady state not converged at N_max={ss.fock_dim}")
    return summary


def _run_g2map(run: Run, tree: dict | None = None):
    tree = tree or run.tree
    p = cfg.model_params(tree)
    scale = cfg.rate_scale(tree)
    Ep = cfg.sweep_grid(tree, "E_p", scale)
    Oc = cfg.sweep_grid(tree, "Omega_c", scale)
    s = tree["solver"]
    return g2_map(p, Ep, Oc, n_limit=int(s["N_max_limit"]), verify=bool(s["verify_truncation"]),
                  jobs=s.get("jobs"))


def _write_locus(run: Run, gmap, name="g2map_locus.csv"):
    locus = gmap.minimum_locus()
    row_of = {float(e): i for i, e in enumerate(gmap.Ep_grid)}
    rows = [(run.rate(e), run.rate(o), g, float(np.log10(max(g, 1e-12))), gmap.n_bar[row_of[e], j],
             gmap.converged[row_of[e], j])
            for e, o, g, j in locus]
    write_csv(run.path(name), [run.col("E_p"), run.col("Omega_c"), "g2", "log10_g2", "n_bar",
                               "converged"], rows)
    return locus


def cmd_g2map(run: Run) -> dict:
    gmap = _run_g2map(run)
    rows = []
    for i, e in enumerate(gmap.Ep_grid):
        for j, o in enumerate(gmap.Omega_c_grid):
            rows.append((run.rate(e), run.rate(o), gmap.log10_g2[i, j], gmap.g2[i, j],
                         gmap.n_bar[i, j], gmap.converged[i, j]))
    write_csv(run.path("g2map.csv"),
              [run.col("E_p"), run.col("Omega_c"), "log10_g2", "g2", "n_bar", "converged"], rows)
    locus = _write_locus(run, gmap)
    k = np.unravel_index(np.nanargmin(gmap.g2), gmap.g2.shape)
    summary = {
        "min_g2": gmap.g2[k], "min_at": {"E_p": gmap.Ep_grid[k[0]], "Omega_c": gmap.Omega_c_grid[k[1]]},
        "n_bar_at_min": gmap.n_bar[k], "unconverged_fraction": gmap.unconverged_fraction,
        "failed_cells": {f"{i},{j}": v for (i, j), v in gmap.errors.items()},
        "locus": [{"E_p": e, "Omega_c": o, "g2": g} for e, o, g, _ in locus],
    }
    write_json(run.path("g2map.json"), summary)
    if run.plots:
        from .plotting import plot_g2_map
        plot_g2_map(gmap, run.path("g2map.png"), title=run.tree.get("name"))
    limit = float(_solver(run).get("max_unconverged_fraction", 0.05))
    if gmap.unconverged_fraction > limit:
        raise Unconverged(f"{gmap.unconverged_fraction:.1%} of cells unconverged (limit {limit:.0%})")
    return summary


def cmd_g2tau(run: Run) -> dict:
    p = cfg.model_params(run.tree)
    tau = cfg.sweep_grid(run.tree, "tau") * cfg.rate_scale(run.tree)
    ss, L = _steady(run, p)
    res = g2_tau(L, ss.rho, ss.fock_dim, tau)
    tcol = "tau_s" if run.si else "tau_times_kappa"
    tvals = tau / run.kappa_si if run.si else tau
    write_csv(run.path("g2tau.csv"), [tcol, "g2"], zip(tvals, res.series.values))
    summary = {"g2_zero": res.g2_zero, "n_bar": res.n_bar, "N_max": ss.fock_dim,
               "converged": ss.converged, "g2_at_tau_max": float(res.series.values[-1])}
    write_json(run.path("g2tau.json"), summary)
    if run.plots:
        from .plotting import plot_g2_tau
        plot_g2_tau(res.series, run.path("g2tau.png"))
    if not ss.converged:
        raise Unconverged("steady state not converged")
    return summary


def cmd_squeeze(run: Run) -> dict:
    p = cfg.model_params(run.tree)
    scale = cfg.rate_scale(run.tree)
    omega = cfg.sweep_grid(run.tree, "omega", scale)
    ss, L = _steady(run, p)
    theta = run.tree.get("squeeze", {}).get("theta", "auto")
    spec = squeezing_spectrum(L, ss.rho, ss.fock_dim, omega, theta=theta, kappa=p.kappa)
    write_csv(run.path("squeeze.csv"), [run.col("omega"), "S"], zip(run.rate(omega), spec.S))
    w_min, s_min = spec.minimum
    summary = {"theta": spec.theta, "min_S": s_min, "omega_at_min": w_min,
               "N_max": ss.fock_dim, "converged": ss.converged, "n_bar": ss.n_bar}
    if _solver(run).get("dual_check"):
        summary["dual_check"] = dual_check(L, ss, DUAL_CHECK_FREQS)
        write_csv(run.path("squeeze_dualcheck.csv"),
                  ["omega_over_kappa", "kind", "spectral_re", "spectral_im", "time_domain_re",
                   "time_domain_im", "rel_error"],
                  [(r["omega"], r["kind"], *r["spectral"], *r["time_domain"], r["rel_error"])
                   for r in summary["dual_check"]["points"]])
    write_json(run.path("squeeze.json"), summary)
    if run.plots:
        from .plotting import plot_squeeze
        plot_squeeze([spec], run.path("squeeze.png"), labels=[run.tree.get("name", "S")])
    if not ss.converged:
        raise Unconverged("steady state not converged")
    return summary


def dual_check(L, ss, freqs, dt=1e-4, tau_max=150.0) -> dict:
    """Compare frequency-domain solves with propagated two-time correlations."""
    from .observables import fluctuation_transforms_time_domain
    from .solvers import spectral_solve
    from .operators import dag
    freqs = np.asarray(freqs, dtype=float)
    a = cavity_annihilation(ss.dim, ss.fock_dim)
    sp_aa = spectral_solve(L, a, a, ss.rho, freqs).values
    sp_ad = spectral_solve(L, dag(a), a, ss.rho, freqs).values
    td_aa, td_ad = fluctuation_transforms_time_domain(L, ss.rho, ss.fock_dim, freqs, dt, tau_max)
    points = []
    for kind, sp, td in (("<da(t)da>", sp_aa, td_aa), ("<da+(t)da>", sp_ad, td_ad)):
        for w, x, y in zip(freqs, sp, td):
            points.append({"omega": w, "kind": kind, "spectral": [x.real, x.imag],
                           "time_domain": [y.real, y.imag], "rel_error": abs(x - y) / abs(x)})
    return {"max_rel_error": max(p["rel_error"] for p in points), "points": points}


def _read_locus(path) -> list[tuple[float, float, float]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    if header[0] != "E_p_over_kappa":
        raise cfg.ConfigError("locus CSV must be in kappa units")
    gi = header.index("g2")
    return [(float(r[0]), float(r[1]), float(r[gi])) for r in body]


def cmd_eta_fit(run: Run) -> dict:
    fit = run.tree.get("fit", {})
    if fit.get("locus_csv"):
        locus = _read_locus(fit["locus_csv"])
    else:
        gmap = _run_g2map(run)
        locus = [(e, o, g) for e, o, g, _ in _write_locus(run, gmap)]
    kappa = 1.0
    rows, fitted = [], []
    for ep, oc, g in locus:
        try:
            eta = eta_fit(g, ep, kappa, N_max=int(_solver(run)["N_max"]))
            status = "ok"
            fitted.append((ep, eta))
        except (EtaFitError, KerrConvergenceError) as exc:
            eta, status = float("nan"), str(exc)
        rows.append((run.rate(ep), run.rate(oc), g, run.rate(eta), status))
    write_csv(run.path("eta_fit.csv"), [run.col("E_p"), run.col("Omega_c"), "g2", run.col("eta"),
                                         "status"], rows)
    summary = {"points": [{"E_p": r[0], "Omega_c": r[1], "g2": r[2], "eta": r[3], "status": r[4]}
                          for r in rows]}
    write_json(run.path("eta_fit.json"), summary)
    if run.plots and fitted:
        from .plotting import plot_eta
        plot_eta([f[0] for f in fitted], [f[1] for f in fitted], run.path("eta_fit.png"))
    return summary


COMMANDS = {
    "levels": cmd_levels,
    "table1": cmd_table1,
    "steady": cmd_steady,
    "g2map": cmd_g2map,
    "g2tau": cmd_g2tau,
    "squeeze": cmd_squeeze,
    "eta-fit": cmd_eta_fit,
}

TOLERANCES = {"steady_residual": 1e-10, "top_fock_population": 1e-8, "resolve_rtol": 1e-4,
              "positivity": -1e-8, "eta_fit_rtol": 1e-3, "log10_clamp": 1e-12}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="giantkerr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, help="scenario JSON (overlays the preset)")
        sp.add_argument("--preset", choices=cfg.PRESETS)
        sp.add_argument("--out", type=Path, help="output directory")
        sp.add_argument("--nmax", type=int, help="initial Fock truncation")
        sp.add_argument("--jobs", type=int, help="parallel worker processes for sweeps")
        sp.add_argument("--si", action="store_true", help="emit rates in rad/s instead of kappa units")
        sp.add_argument("--no-plot", action="store_true", help="skip figure rendering")
        sp.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        tree = cfg.load(args.config, args.preset)
        if args.nmax is not None:
            tree["solver"]["N_max"] = args.nmax
        if args.jobs is not None:
            tree["solver"]["jobs"] = args.jobs
        out = args.out or Path(tree.get("output", {}).get("dir", f"results/{args.command}"))
        plots = tree.get("output", {}).get("plots", True) and not args.no_plot
        run = Run(tree=tree, out=Path(out), si=args.si, plots=plots)
        if args.si:
            run.kappa_si  # noqa: B018  fail early on missing scale
        manifest = dict(tree)
        manifest["manifest"] = {"tool": "giantkerr", "version": __version__, "command": args.command,
                                "tolerances": TOLERANCES, "si_output": args.si}
        write_json(run.path("manifest.json"), manifest)
        summary = COMMANDS[args.command](run)
    except (cfg.ConfigError, CircuitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (Unconverged, SteadyStateError, KerrConvergenceError) as exc:
        print(f"not converged: {exc}", file=sys.stderr)
        return EXIT_UNCONVERGED
    print(json.dumps(_jsonable(_brief(summary)), indent=2))
    return EXIT_OK


def _brief(summary: dict) -> dict:
    return {k: v for k, v in summary.items() if k not in ("points", "locus")} or summary


if __name__ == "__main__":
    sys.exit(main())
