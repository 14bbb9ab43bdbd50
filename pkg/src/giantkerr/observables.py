"""Photon statistics, squeezing spectra and effective-Kerr estimates."""
from __future__ import annotations

import logging
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import model as nsys
from .operators import dag, destroy, tensor, vec
from .solvers import (CorrelationSeries, SteadyState, converged_steady_state,
                      fourier_one_sided, spectral_solve, trace_series, two_time)

log = logging.getLogger(__name__)

N_BAR_FLOOR = 1e-12
LOG10_CLAMP = 1e-12


class UndefinedCorrelation(ValueError):
    """g2 requested for a state with (numerically) no photons."""


def cavity_annihilation(dim: int, fock_dim: int) -> np.ndarray:
    return tensor(np.eye(dim // fock_dim), destroy(fock_dim))


@dataclass
class G2Result:
    g2_zero: float
    n_bar: float
    series: CorrelationSeries | None = None
    converged: bool = True

    @property
    def log10_g2(self) -> float:
        return float(np.log10(max(self.g2_zero, LOG10_CLAMP)))


def g2_zero(rho: np.ndarray, fock_dim: int) -> G2Result:
    """Equal-time ``<a+ a+ a a> / <a+ a>^2``."""
    a = cavity_annihilation(rho.shape[0], fock_dim)
    ad = dag(a)
    n = float(np.real(np.trace(ad @ a @ rho)))
    if n < N_BAR_FLOOR:
        raise UndefinedCorrelation(f"mean photon number {n:.3e} too small for g2")
    n2 = float(np.real(np.trace(ad @ ad @ a @ a @ rho)))
    return G2Result(g2_zero=max(n2, 0.0) / n ** 2, n_bar=n)


def g2_tau(L, rho: np.ndarray, fock_dim: int, tau_grid) -> G2Result:
    """Normalised intensity correlation on a delay grid (regression theorem)."""
    base = g2_zero(rho, fock_dim)
    a = cavity_annihilation(rho.shape[0], fock_dim)
    ad = dag(a)
    series = two_time(L, ad @ a, ad, a, rho, tau_grid, tag="g2")
    series.values = np.real(series.values) / base.n_bar ** 2
    base.series = series
    return base


# --- analytic effective nonlinearity ------------------------------------------


@dataclass(frozen=True)
class EtaEstimate:
    eta: float
    regime_valid: bool


def kerr_eta_estimate(g1, g2, Omega_c, Delta, delta, gamma43, gamma21, gamma23) -> EtaEstimate:
    """Adiabatic self-Kerr strength of the N-scheme.

    ``eta = (g1/Omega_c)^2 [g2^2 Delta / (gamma43^2 + Delta^2)
    - g1^2 delta / ((gamma21 + gamma23)^2 + delta^2)]``, trustworthy only
    for ``(g1/Omega_c)^2 << 1``; ``regime_valid`` uses the cut 0.1.
    """
    if Omega_c == 0:
        raise ZeroDivisionError("Omega_c must be nonzero")
    ratio = abs(g1 / Omega_c) ** 2
    upper = g2 ** 2 * Delta / (gamma43 ** 2 + Delta ** 2) if (gamma43 or Delta) else 0.0
    gtot = gamma21 + gamma23
    lower = g1 ** 2 * delta / (gtot ** 2 + delta ** 2) if (gtot or delta) else 0.0
    return EtaEstimate(eta=ratio * (upper - lower), regime_valid=ratio <= 0.1 + 1e-12)


@dataclass(frozen=True)
class Table1Row:
    work: str
    g: float | None
    kappa: float | None
    gamma: float | None
    published: str

    @property
    def published_value(self) -> float:
        return float(self.published.replace(",", ""))

    @property
    def decimals(self) -> int:
        s = self.published.replace(",", "")
        return len(s.split(".")[1]) if "." in s else 0


# (g, kappa, gamma) / 2pi in MHz, with the eta/kappa value as printed
TABLE1_ROWS = (
    Table1Row("D. Englund et al., Nature 450, 857 (2007)", 8000, 16000, 100, "2"),
    Table1Row("P. Maunz et al., Nature 428, 50 (2004)", 16, 1.4, 3, "3"),
    Table1Row("K. M. Birnbaum et al., Nature 436, 87 (2005)", 33, 4.1, 2.5, "5.4"),
    Table1Row("C. J. Hood et al., PRL 80, 4157 (1998)", 120, 40, 2.6, "6.9"),
    Table1Row("A. Imamoglu et al., PRL 79, 1467 (1997)", None, None, None, "20"),
    Table1Row("CPB molecule", 300, 1, 0.1, "45,000"),
)


def table1_eta(row: Table1Row, coupling_ratio: float = 0.1) -> float | None:
    """eta/kappa for one row with ``(g/Omega_c)^2 = coupling_ratio``,
    ``(Delta, delta) = (gamma, 0)`` and all level decays equal to gamma."""
    if row.g is None:
        return None
    Omega_c = row.g / np.sqrt(coupling_ratio)
    est = kerr_eta_estimate(row.g, row.g, Omega_c, row.gamma, 0.0, row.gamma, row.gamma, row.gamma)
    return est.eta / row.kappa


def table1(coupling_ratio: float = 0.1) -> list[dict]:
    out = []
    for row in TABLE1_ROWS:
        val = table1_eta(row, coupling_ratio)
        rounded = None if val is None else round(val, row.decimals)
        out.append({
            "work": row.work, "g": row.g, "kappa": row.kappa, "gamma": row.gamma,
            "eta_over_kappa": val, "rounded": rounded, "published": row.published_value,
            "matches": None if val is None else bool(np.isclose(rounded, row.published_value)),
        })
    return out


# --- squeezing spectrum ---------------------------------------------------------


@dataclass
class SqueezeSpectrum:
    omega_grid: np.ndarray
    S: np.ndarray
    theta: float
    vacuum_level: float = 1.0

    @property
    def minimum(self) -> tuple[float, float]:
        k = int(np.argmin(self.S))
        return float(self.omega_grid[k]), float(self.S[k])


def amplitude_phase(rho: np.ndarray, fock_dim: int) -> float:
    a = cavity_annihilation(rho.shape[0], fock_dim)
    alpha = np.trace(a @ rho)
    if abs(alpha) < 1e-14:
        warnings.warn("<a> vanishes; amplitude quadrature undefined, using theta = 0")
        return 0.0
    return float(np.angle(alpha))


def _assemble_S(F_aa_pos, F_aa_neg, F_ad_pos, F_ad_neg, theta, kappa):
    # S = 1 + 2 kappa int e^{iwt} <:dX(t) dX(0):>, with the one-sided transforms of
    # f(t) = e^{-2i theta} <da(t) da> + <da+(t) da> evaluated at +w and -w
    rot = np.exp(-2j * theta)
    F_pos = rot * F_aa_pos + F_ad_pos
    F_neg = rot * F_aa_neg + F_ad_neg
    return 1.0 + 4.0 * kappa * np.real(F_pos + F_neg)


def squeezing_spectrum(L, rho: np.ndarray, fock_dim: int, omega_grid, theta="auto",
                       kappa: float = 1.0) -> SqueezeSpectrum:
    """Normally ordered quadrature spectrum of the output field; vacuum = 1.

    ``theta="auto"`` selects the amplitude quadrature ``arg <a>``.
    """
    omega = np.asarray(omega_grid, dtype=float)
    if isinstance(theta, str):
        if theta != "auto":
            raise ValueError("theta must be a number or 'auto'")
        theta = amplitude_phase(rho, fock_dim)
    a = cavity_annihilation(rho.shape[0], fock_dim)
    both = np.concatenate([omega, -omega])
    F_aa = spectral_solve(L, a, a, rho, both).values
    F_ad = spectral_solve(L, dag(a), a, rho, both).values
    n = len(omega)
    S = _assemble_S(F_aa[:n], F_aa[n:], F_ad[:n], F_ad[n:], theta, kappa)
    return SqueezeSpectrum(omega_grid=omega, S=S, theta=float(theta))


def fluctuation_transforms_time_domain(L, rho: np.ndarray, fock_dim: int, omega_grid,
                                       dt: float, tau_max: float) -> tuple[np.ndarray, np.ndarray]:
    """Time-domain route to the one-sided transforms used by the spectrum.

    Propagates ``da rho`` on a uniform delay grid, reads off ``<da(t) da>`` and
    ``<da+(t) da>``, and integrates with composite Simpson weights.
    """
    n = int(np.ceil(tau_max / dt))
    n += n % 2  # even number of intervals
    tau = dt * np.arange(n + 1)
    d = rho.shape[0]
    a = cavity_annihilation(d, fock_dim)
    I = np.eye(d)
    da = a - np.trace(a @ rho) * I
    dad = dag(da)
    rows = np.vstack([vec(da.T), vec(dad.T)])
    vals = trace_series(L, rows, vec(da @ rho), tau)
    F_aa = fourier_one_sided(vals[0], dt, omega_grid)
    F_ad = fourier_one_sided(vals[1], dt, omega_grid)
    return F_aa, F_ad


def squeezing_spectrum_time_domain(L, rho, fock_dim, omega_grid, theta="auto", kappa=1.0,
                                   dt: float = 1e-4, tau_max: float = 150.0) -> SqueezeSpectrum:
    omega = np.asarray(omega_grid, dtype=float)
    if isinstance(theta, str):
        theta = amplitude_phase(rho, fock_dim)
    F_aa, F_ad = fluctuation_transforms_time_domain(
        L, rho, fock_dim, np.concatenate([omega, -omega]), dt, tau_max)
    n = len(omega)
    S = _assemble_S(F_aa[:n], F_aa[n:], F_ad[:n], F_ad[n:], theta, kappa)
    return SqueezeSpectrum(omega_grid=omega, S=S, theta=float(theta))


# --- blockade landscape --------------------------------------------------------


def solve_nsystem(p: nsys.NSystemParams, n_limit: int = 20, verify: bool = True) -> SteadyState:
    """Converged steady state of the N-system starting at ``p.N_max``."""
    def build(n):
        return nsys.liouvillian(p.replace(N_max=n))
    return converged_steady_state(build, n_max=int(p.N_max), n_limit=n_limit, verify=verify)


def _g2_cell(args):
    p, n_limit, verify = args
    try:
        ss = solve_nsystem(p, n_limit=n_limit, verify=verify)
        res = g2_zero(ss.rho, ss.fock_dim)
        res.converged = ss.converged
        return res, None
    except Exception as exc:  # recorded per cell, never fatal for the map
        return None, f"{type(exc).__name__}: {exc}"


@dataclass
class G2Map:
    Ep_grid: np.ndarray
    Omega_c_grid: np.ndarray
    g2: np.ndarray
    n_bar: np.ndarray
    converged: np.ndarray
    errors: dict = field(default_factory=dict)

    @property
    def log10_g2(self) -> np.ndarray:
        return np.log10(np.clip(self.g2, LOG10_CLAMP, None))

    def minimum_locus(self) -> list[tuple[float, float, float, int]]:
        """Per drive strength: ``(E_p, Omega_c, g2, column index)`` at the g2 minimum.

        Ties go to the smaller control field.
        """
        out = []
        for i, ep in enumerate(self.Ep_grid):
            row = self.g2[i]
            if np.all(np.isnan(row)):
                continue
            j = int(np.nanargmin(row))
            out.append((float(ep), float(self.Omega_c_grid[j]), float(row[j]), j))
        return out

    @property
    def unconverged_fraction(self) -> float:
        return float(np.mean(~self.converged))

    def cell(self, i: int, j: int) -> G2Result:
        return G2Result(self.g2[i, j], self.n_bar[i, j], converged=bool(self.converged[i, j]))


def g2_map(base: nsys.NSystemParams, Ep_grid, Omega_c_grid, n_limit: int = 20,
           verify: bool = True, jobs: int | None = 1) -> G2Map:
    """g2(0) over the (E_p, Omega_c) grid; row index follows ``Ep_grid``."""
    Ep = np.asarray(Ep_grid, dtype=float)
    Oc = np.asarray(Omega_c_grid, dtype=float)
    if Ep.size == 0 or Oc.size == 0:
        raise ValueError("grids must be non-empty")
    tasks = [(base.replace(E_p=float(e), Omega_c=float(o)), n_limit, verify) for e in Ep for o in Oc]
    jobs = jobs or os.cpu_count() or 1
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_g2_cell, tasks))
    else:
        results = [_g2_cell(t) for t in tasks]
    shape = (Ep.size, Oc.size)
    g2 = np.full(shape, np.nan)
    nb = np.full(shape, np.nan)
    conv = np.zeros(shape, dtype=bool)
    errors = {}
    for k, (res, err) in enumerate(results):
        i, j = divmod(k, Oc.size)
        if res is None:
            errors[(i, j)] = err
            log.warning("g2 cell E_p=%g Omega_c=%g failed: %s", Ep[i], Oc[j], err)
            continue
        g2[i, j], nb[i, j], conv[i, j] = res.g2_zero, res.n_bar, res.converged
    return G2Map(Ep, Oc, g2, nb, conv, errors)
