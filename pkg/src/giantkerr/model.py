"""Driven, dissipative four-level N-system coupled to one cavity mode.

Rotating frame: cavity at ``omega_a``, control field at ``omega_c``. In that
frame the level shifts are ``Delta21 = delta``, ``Delta31 = delta - delta_c``
and ``Delta41 = delta - delta_c + Delta``.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .circuit import HBAR
from .operators import (HilbertSpace, atomic_sigma, dag, fock_annihilation,
                        liouvillian_matrix)

# radiative channels i -> j drawn in the N-scheme
DECAY_CHANNELS = ((2, 1), (2, 3), (3, 1), (4, 1), (4, 2), (4, 3))


def _decay_matrix(rates) -> np.ndarray:
    g = np.zeros((4, 4))
    if rates is None:
        return g
    if isinstance(rates, dict):
        for key, val in rates.items():
            i, j = (int(c) for c in str(key)) if not isinstance(key, tuple) else key
            g[i - 1, j - 1] = val
        return g
    return np.array(rates, dtype=float).reshape(4, 4)


@dataclass(frozen=True)
class NSystemParams:
    """Master-equation parameters; all rates share one unit (usually kappa).

    ``gamma[i-1, j-1]`` is the decay rate from level ``i`` to level ``j``. Only
    the six energy-downward channels in ``DECAY_CHANNELS`` may be nonzero; note
    that 2 -> 3 is downward in energy because E3 < E2.
    """

    g1: float = 0.0
    g2: float = 0.0
    Omega_c: complex = 0.0
    E_p: float = 0.0
    Delta21: float = 0.0
    Delta31: float = 0.0
    Delta41: float = 0.0
    kappa: float = 1.0
    gamma: np.ndarray = field(default_factory=lambda: np.zeros((4, 4)))
    gamma_ph: np.ndarray = field(default_factory=lambda: np.zeros(4))
    N_max: int = 8

    def __post_init__(self):
        gamma = _decay_matrix(self.gamma)
        gph = np.broadcast_to(np.asarray(self.gamma_ph, dtype=float), (4,)).copy()
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "gamma_ph", gph)
        if self.kappa < 0 or np.any(gamma < 0) or np.any(gph < 0):
            raise ValueError("decay and dephasing rates must be non-negative")
        if np.any(np.diag(gamma) != 0):
            raise ValueError("diagonal decay entries are not channels; use gamma_ph for dephasing")
        allowed = np.zeros((4, 4), dtype=bool)
        for i, j in DECAY_CHANNELS:
            allowed[i - 1, j - 1] = True
        if np.any(gamma[~allowed] != 0):
            bad = [(i + 1, j + 1) for i, j in zip(*np.nonzero(gamma * ~allowed))]
            raise ValueError(f"decay channels {bad} are not part of the N-scheme")
        if int(self.N_max) != self.N_max or self.N_max < 2:
            raise ValueError("N_max must be an integer >= 2")

    @classmethod
    def from_detunings(cls, Delta: float, delta: float, delta_c: float = 0.0, **kw) -> "NSystemParams":
        d21, d31, d41 = detuning_map(Delta, delta, delta_c)
        return cls(Delta21=d21, Delta31=d31, Delta41=d41, **kw)

    def replace(self, **changes) -> "NSystemParams":
        return dataclasses.replace(self, **changes)

    def scaled(self, unit: float) -> "NSystemParams":
        """Every rate divided by ``unit`` (e.g. by kappa to get kappa units)."""
        return self.replace(
            g1=self.g1 / unit, g2=self.g2 / unit, Omega_c=self.Omega_c / unit, E_p=self.E_p / unit,
            Delta21=self.Delta21 / unit, Delta31=self.Delta31 / unit, Delta41=self.Delta41 / unit,
            kappa=self.kappa / unit, gamma=self.gamma / unit, gamma_ph=self.gamma_ph / unit)

    def space(self) -> HilbertSpace:
        return HilbertSpace(int(self.N_max))


def detuning_map(Delta: float, delta: float, delta_c: float = 0.0) -> tuple[float, float, float]:
    return delta, delta - delta_c, delta - delta_c + Delta


def system_hamiltonian(p: NSystemParams, space: HilbertSpace | None = None) -> np.ndarray:
    space = space or p.space()
    a = fock_annihilation(space)
    ad = dag(a)
    s = lambda i, j: atomic_sigma(space, i, j)  # noqa: E731
    H = (p.Delta21 * s(2, 2) + p.Delta31 * s(3, 3) + p.Delta41 * s(4, 4)
         + p.g1 * (ad @ s(1, 2) + s(2, 1) @ a)
         + p.g2 * (ad @ s(3, 4) + s(4, 3) @ a)
         + np.conj(p.Omega_c) * s(3, 2) + p.Omega_c * s(2, 3)
         + p.E_p * (a + ad))
    return H.astype(complex)


def collapse_channels(p: NSystemParams, space: HilbertSpace | None = None) -> list[tuple[float, np.ndarray]]:
    """Cavity loss, every nonzero level decay ``(gamma_ij, sigma_ji)``, then dephasing."""
    space = space or p.space()
    channels = []
    if p.kappa > 0:
        channels.append((float(p.kappa), fock_annihilation(space)))
    for i, j in DECAY_CHANNELS:
        rate = p.gamma[i - 1, j - 1]
        if rate > 0:
            channels.append((float(rate), atomic_sigma(space, j, i)))
    for k in range(1, 5):
        rate = p.gamma_ph[k - 1]
        if rate > 0:
            channels.append((float(rate), atomic_sigma(space, k, k)))
    return channels


def liouvillian(p: NSystemParams, space: HilbertSpace | None = None, sparse: bool = True):
    space = space or p.space()
    return liouvillian_matrix(system_hamiltonian(p, space), collapse_channels(p, space), sparse=sparse)


def drive_from_power(P: float, kappa: float, omega_a: float) -> float:
    """Cavity drive amplitude ``sqrt(P kappa / (hbar omega_a))`` in rad/s.

    ``P / (hbar omega_a)`` is the incident photon flux; the unit prefactor is a
    convention; only the scaling with power, loss and frequency is physical.
    """
    if P < 0:
        raise ValueError("power must be non-negative")
    return float(np.sqrt(P * kappa / (HBAR * omega_a)))


def power_from_drive(E_p: float, kappa: float, omega_a: float) -> float:
    return float(E_p ** 2 * HBAR * omega_a / kappa)


def fig_rates(gamma42: bool = True) -> np.ndarray:
    """Decay matrix used for the blockade and squeezing scenarios (kappa units).

    ``gamma42=False`` takes the listed rates literally, leaving 4 -> 2 dark.
    """
    rates = {(2, 1): 0.1, (4, 3): 0.1, (3, 1): 0.1, (2, 3): 0.01, (4, 1): 0.01}
    if gamma42:
        rates[(4, 2)] = 0.1
    return _decay_matrix(rates)
