"""Driven, damped single-mode Kerr oscillator used to calibrate g2 -> eta.

``H = Delta_a a+a + eta a+^2 a^2 + E_p (a + a+)`` with cavity loss ``kappa D[a]``
in the same no-1/2 dissipator convention as the N-system. Its steady-state
g2(0) falls monotonically with ``eta`` at fixed weak drive, so a measured
g2(0) can be inverted for an effective nonlinearity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .observables import G2Result, g2_zero
from .operators import dag, destroy, liouvillian_matrix
from .solvers import converged_steady_state

LOG10_ETA_BRACKET = (-3.0, 12.0)
MAX_BISECTIONS = 60
FIT_RTOL = 1e-3


class KerrConvergenceError(RuntimeError):
    pass


class EtaFitError(ValueError):
    def __init__(self, msg, achievable=None):
        super().__init__(msg)
        self.achievable = achievable


@dataclass(frozen=True)
class KerrParams:
    eta: float
    kappa: float = 1.0
    E_p: float = 0.1
    Delta_a: float = 0.0
    N_max: int = 8

    def __post_init__(self):
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.N_max < 3:
            raise ValueError("N_max must be >= 3")


def kerr_liouvillian(p: KerrParams, n: int | None = None):
    n = n or p.N_max
    a = destroy(n)
    ad = dag(a)
    H = p.Delta_a * ad @ a + p.eta * ad @ ad @ a @ a + p.E_p * (a + ad)
    return liouvillian_matrix(H, [(p.kappa, a)], sparse=True)


def kerr_g2_zero(p: KerrParams, n_limit: int = 40, verify: bool = True) -> G2Result:
    ss = converged_steady_state(lambda n: kerr_liouvillian(p, n), n_max=p.N_max,
                                n_limit=max(n_limit, p.N_max), verify=verify)
    if not ss.converged:
        raise KerrConvergenceError(
            f"Kerr steady state not converged (eta={p.eta:g}, E_p={p.E_p:g}, "
            f"top population {ss.top_fock_population:.2e})")
    res = g2_zero(ss.rho, ss.fock_dim)
    res.converged = True
    return res


def eta_fit(target_g2: float, E_p: float, kappa: float = 1.0, N_max: int = 8,
            bracket=LOG10_ETA_BRACKET, rtol: float = FIT_RTOL) -> float:
    """Kerr strength whose steady state reproduces ``target_g2`` at drive ``E_p``.

    Bisection on ``log10(eta / kappa)`` inside ``bracket``; g2 is monotone in
    eta here. Raises :class:`EtaFitError` when the target lies outside what
    the bracket can reach.
    """
    if not 0 < target_g2 < 1:
        raise EtaFitError(f"target g2 must lie in (0, 1), got {target_g2}")

    def g2_at(log_eta):
        p = KerrParams(eta=kappa * 10 ** log_eta, kappa=kappa, E_p=E_p, N_max=N_max)
        return kerr_g2_zero(p, verify=False).g2_zero

    lo, hi = bracket
    g_lo, g_hi = g2_at(lo), g2_at(hi)
    if not g_hi <= target_g2 <= g_lo:
        raise EtaFitError(
            f"g2={target_g2:.3e} not reachable at E_p={E_p:g}: achievable [{g_hi:.3e}, {g_lo:.3e}]",
            achievable=(g_hi, g_lo))
    log_target = math.log(target_g2)
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        g_mid = g2_at(mid)
        if abs(g_mid / target_g2 - 1) <= rtol:
            return kappa * 10 ** mid
        if math.log(g_mid) > log_target:
            lo = mid
        else:
            hi = mid
    return kappa * 10 ** (0.5 * (lo + hi))


def weak_drive_g2(eta: float, kappa: float = 1.0, E_p: float = 1e-3, Delta_a: float = 0.0) -> float:
    """g2(0) from the 0-1-2 photon amplitudes of the non-Hermitian Hamiltonian."""
    # c0 = 1; stationary amplitudes of H - i kappa a+a truncated at two photons
    M = np.array([[-(kappa + 1j * Delta_a), -1j * np.sqrt(2) * E_p],
                  [-1j * np.sqrt(2) * E_p, -(2 * kappa + 2j * Delta_a + 2j * eta)]], dtype=complex)
    rhs = np.array([1j * E_p, 0.0])
    c1, c2 = np.linalg.solve(M, rhs)
    return float(2 * abs(c2) ** 2 / abs(c1) ** 4)
