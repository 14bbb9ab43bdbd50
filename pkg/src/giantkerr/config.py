"""Scenario files: loading, preset lookup, validation and model construction.

A scenario is a JSON tree with optional sections ``model``, ``circuit``,
``sweep``, ``solver``, ``output`` and ``fit``. Model rates are in units of the
cavity decay (``"units": "kappa"``, the default) or in rad/s (``"units": "si"``);
SI scenarios are rescaled by ``model.kappa`` before anything is solved, so both
forms produce the same dimensionless numbers. Circuit quantities are SI, with
``*_Hz`` keys holding cyclic frequencies.
"""
from __future__ import annotations

import copy
import json
from importlib import resources
from pathlib import Path

import numpy as np

from . import circuit as cpb
from .model import NSystemParams, _decay_matrix, detuning_map

PRESETS = ("fig3", "fig3-dephasing", "fig4a", "fig4b", "table1", "prototype", "offset", "coresonance")

DEFAULT_SOLVER = {"N_max": 8, "N_max_limit": 20, "verify_truncation": True, "jobs": None,
                  "dual_check": False, "max_unconverged_fraction": 0.05}


class ConfigError(ValueError):
    pass


def preset_path(name: str) -> Path:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return Path(str(resources.files("giantkerr") / "presets" / f"{name}.json"))


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def load(config: str | Path | None = None, preset: str | None = None) -> dict:
    """Preset tree overlaid with the config file (either may be omitted)."""
    tree: dict = {}
    if preset:
        tree = json.loads(preset_path(preset).read_text())
    if config:
        try:
            user = json.loads(Path(config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {config}: {exc}") from exc
        user.pop("manifest", None)
        tree = _merge(tree, user)
    if not tree:
        raise ConfigError("no scenario given: pass --config and/or --preset")
    tree.setdefault("solver", {})
    tree["solver"] = {**DEFAULT_SOLVER, **tree["solver"]}
    return tree


def grid(spec) -> np.ndarray:
    """Expand ``[v0, v1, ...]`` or ``{"start", "stop", "num", "spacing"}``."""
    if isinstance(spec, (list, tuple)):
        g = np.asarray(spec, dtype=float)
    elif isinstance(spec, dict):
        try:
            start, stop, num = float(spec["start"]), float(spec["stop"]), int(spec["num"])
        except KeyError as exc:
            raise ConfigError(f"grid needs start/stop/num: {spec}") from exc
        spacing = spec.get("spacing", "linear")
        if spacing == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError("log-spaced grid needs positive bounds")
            g = np.geomspace(start, stop, num)
        elif spacing == "linear":
            g = np.linspace(start, stop, num)
        else:
            raise ConfigError(f"unknown grid spacing {spacing!r}")
    else:
        g = np.atleast_1d(np.asarray(spec, dtype=float))
    if g.size == 0 or not np.all(np.isfinite(g)):
        raise ConfigError("grids must be finite and non-empty")
    if np.any(np.diff(g) <= 0):
        raise ConfigError("grids must be strictly increasing")
    return g


def sweep_grid(tree: dict, key: str, scale: float = 1.0) -> np.ndarray:
    try:
        spec = tree["sweep"][key]
    except KeyError as exc:
        raise ConfigError(f"sweep.{key} is required for this command") from exc
    return grid(spec) / scale


def rate_scale(tree: dict) -> float:
    """Divisor that brings model rates to kappa units."""
    units = tree.get("units", "kappa")
    if units == "kappa":
        return 1.0
    if units == "si":
        kappa = tree.get("model", {}).get("kappa")
        if not kappa or kappa <= 0:
            raise ConfigError("SI scenarios need a positive model.kappa in rad/s")
        return float(kappa)
    raise ConfigError(f"units must be 'kappa' or 'si', not {units!r}")


def kappa_si(tree: dict) -> float | None:
    """Cavity decay in rad/s, if the scenario pins it."""
    if tree.get("units") == "si":
        return float(tree["model"]["kappa"])
    val = tree.get("kappa_si")
    return float(val) if val else None


# --- circuit ------------------------------------------------------------------


def _hz(section: dict, key: str, default=None):
    if key not in section:
        if default is None:
            raise ConfigError(f"circuit field {key!r} is required")
        return default
    v = section[key]
    return 2 * np.pi * np.asarray(v, dtype=float) if v is not None else None


def circuit_frequencies(circ: dict) -> dict:
    """omega_z_bar, omega_x, J (rad/s) from either a direct or a device description."""
    if ("hamiltonian" in circ) == ("device" in circ):
        raise ConfigError("circuit needs exactly one of 'hamiltonian' or 'device'")
    try:
        if "hamiltonian" in circ:
            h = circ["hamiltonian"]
            J = float(_hz(h, "J_Hz"))
            wx = _hz(h, "omega_x_Hz")
            if "omega_z_Hz" in h:
                offs = np.broadcast_to(np.asarray(h.get("gate_offset", 0.0), dtype=float), (2,))
                wz_bar = _hz(h, "omega_z_Hz") * offs
            else:
                wz_bar = _hz(h, "omega_z_bar_Hz", 0.0)
            return {"omega_z_bar": np.broadcast_to(wz_bar, (2,)).tolist(),
                    "omega_x": np.broadcast_to(wx, (2,)).tolist(), "J": J}
        dev = dict(circ["device"])
        geom = dev.pop("geometry", None)
        if geom is not None:
            if "C_m" in dev:
                raise ConfigError("give either device.C_m or device.geometry, not both")
            dev["C_m"] = cpb.mutual_capacitance(cpb.GeometryParams(**geom))
        phi = dev.pop("Phi_over_Phi0", None)
        pair = lambda v: tuple(np.broadcast_to(np.asarray(v, dtype=float), (2,)).tolist())  # noqa: E731
        params = cpb.CircuitParams(
            C_j=pair(dev["C_j"]), C_g=pair(dev["C_g"]), C_m=float(dev["C_m"]),
            calE_J=pair(dev["calE_J"]), N_g=pair(dev.get("N_g", 0.5)),
            Phi=tuple(cpb.PHI0 * x for x in pair(phi if phi is not None else 0.0)))
        f = cpb.two_box_frequencies(params)
        f["C_m"] = params.C_m
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in f.items()}
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"incomplete circuit section: {exc}") from exc
    except cpb.CircuitError as exc:
        raise ConfigError(str(exc)) from exc


def circuit_spectrum(circ: dict) -> tuple[cpb.MoleculeSpectrum, dict]:
    f = circuit_frequencies(circ)
    H = cpb.molecule_hamiltonian(f["omega_z_bar"], f["omega_x"], f["J"])
    return cpb.spectrum(H), f


# --- model --------------------------------------------------------------------


def _gamma_matrix(model: dict) -> np.ndarray:
    raw = model.get("gamma", {})
    try:
        return _decay_matrix(raw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad gamma specification: {exc}") from exc


def model_params(tree: dict) -> NSystemParams:
    """N-system parameters in kappa units."""
    if "model" not in tree:
        raise ConfigError("a model section is required for this command")
    m = tree["model"]
    scale = rate_scale(tree)
    solver = tree.get("solver", DEFAULT_SOLVER)
    direct = any(k in m for k in ("Delta", "delta", "Delta21", "Delta31", "Delta41"))
    if direct and "circuit" in tree and tree["circuit"].get("drive_detunings", False):
        raise ConfigError("detunings given both directly and via the circuit section")
    if "circuit" in tree and tree["circuit"].get("drive_detunings", False):
        spec, _ = circuit_spectrum(tree["circuit"])
        wa = _hz(tree["circuit"], "omega_a_Hz")
        wc = _hz(tree["circuit"], "omega_c_Hz", spec.omega(2, 3))
        k_si = kappa_si(tree)
        if k_si is None:
            raise ConfigError("circuit-derived detunings need kappa_si (or an SI model)")
        D, d, dc = cpb.detunings(spec, float(wa), float(wc))
        d21, d31, d41 = (x / k_si * scale for x in detuning_map(D, d, dc))
    elif any(k in m for k in ("Delta21", "Delta31", "Delta41")):
        d21, d31, d41 = (float(m.get(k, 0.0)) for k in ("Delta21", "Delta31", "Delta41"))
    else:
        d21, d31, d41 = detuning_map(float(m.get("Delta", 0.0)), float(m.get("delta", 0.0)),
                                     float(m.get("delta_c", 0.0)))
    Oc = m.get("Omega_c", 0.0)
    if isinstance(Oc, (list, tuple)):
        Oc = complex(Oc[0], Oc[1])
    try:
        p = NSystemParams(
            g1=float(m.get("g1", m.get("g", 0.0))), g2=float(m.get("g2", m.get("g", 0.0))),
            Omega_c=Oc, E_p=float(m.get("E_p", 0.0)),
            Delta21=d21, Delta31=d31, Delta41=d41,
            kappa=float(m.get("kappa", 1.0)), gamma=_gamma_matrix(m),
            gamma_ph=m.get("gamma_ph", 0.0), N_max=int(solver.get("N_max", 8)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if p.kappa <= 0:
        raise ConfigError("model.kappa must be positive")
    return p.scaled(scale).replace(N_max=p.N_max)
