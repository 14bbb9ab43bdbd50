"""Two capacitively coupled Cooper-pair boxes ("CPB molecule").

Capacitance geometry, charging and Josephson energies, and the 4x4 two-box
Hamiltonian with its N-scheme level labelling. All frequencies are angular
(rad/s); energies are in joules.

Level labels follow the N-scheme energy order ``E1 < E3 < E2 < E4``: the cavity
couples 1<->2 and 3<->4 and the control field drives 2<->3. Direct
diagonalization of the symmetric co-resonance Hamiltonian gives
``w21 = w43 = J (eps + 1)``, ``w42 = J (eps - 1)`` and ``w23 = 2 J``. Some
literature quotes the first pair as ``w21 = w42``; with this labelling the
resonant pair is 1<->2 and 3<->4, which is what the cavity couples.

The two-level truncation of each box to the charge states ``n in {1, 2}`` is
taken as given: ``hbar wz = E_C + E_m / 2``, ``hbar wx = E_J / 2`` and
``hbar J = E_m / 4``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HBAR = 1.054571817e-34
E_CHARGE = 1.602176634e-19
EPS0 = 8.8541878128e-12
PHI0 = 2 * np.pi * HBAR / (2 * E_CHARGE)

# single-box Pauli matrices in the {|0>, |1>} = {up, down} basis
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])
ID2 = np.eye(2)

# energy-sorted eigenvalue index -> N-scheme level label
_SORTED_TO_LEVEL = (1, 3, 2, 4)


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class GeometryParams:
    """Slab geometry of the coupling capacitor (SI lengths)."""

    l: float
    w: float
    r: float
    epsilon_r: float = 9.0

    def __post_init__(self):
        if min(self.l, self.w, self.r) <= 0:
            raise CircuitError("geometry lengths must be positive")
        if self.w + self.r >= self.l:
            raise CircuitError("require w + r < l")
        if self.epsilon_r < 1:
            raise CircuitError("relative permittivity must be >= 1")


@dataclass(frozen=True)
class CircuitParams:
    """Lumped-element description of the two boxes; pairs are (box 1, box 2)."""

    C_j: tuple[float, float]
    C_g: tuple[float, float]
    C_m: float
    calE_J: tuple[float, float]
    N_g: tuple[float, float] = (0.5, 0.5)
    Phi: tuple[float, float] = (0.0, 0.0)
    Phi_0: float = PHI0

    def __post_init__(self):
        caps = (*self.C_j, *self.C_g, self.C_m)
        if min(caps) <= 0:
            raise CircuitError("all capacitances must be positive")
        if self.xi <= 0:
            raise CircuitError("C_sum1 * C_sum2 - C_m**2 must be positive")

    @property
    def C_sum(self) -> tuple[float, float]:
        return tuple(self.C_m + cg + cj for cg, cj in zip(self.C_g, self.C_j))

    @property
    def xi(self) -> float:
        c1, c2 = self.C_sum
        return c1 * c2 - self.C_m ** 2

    @property
    def gate_offsets(self) -> tuple[float, float]:
        return tuple(n - 0.5 for n in self.N_g)

    def swapped(self) -> "CircuitParams":
        return CircuitParams(self.C_j[::-1], self.C_g[::-1], self.C_m, self.calE_J[::-1],
                             self.N_g[::-1], self.Phi[::-1], self.Phi_0)


def K(x):
    """Geometric kernel ``x asinh(1/x) + asinh(x)``."""
    x = np.asarray(x, dtype=float)
    return x * np.arcsinh(1.0 / x) + np.arcsinh(x)


def geometry_factor(geom: GeometryParams) -> float:
    l, w, r = geom.l, geom.w, geom.r
    return float(K(2 * r / l) + K(2 * w / l) - K(2 * (w + r) / l))


def mutual_capacitance(geom: GeometryParams) -> float:
    """Coupling capacitance ``2 pi r eps_r eps0 w / xi`` (farads)."""
    xi = geometry_factor(geom)
    if xi <= 0:
        raise CircuitError(f"degenerate geometry, xi = {xi:.3e}")
    return 2 * np.pi * geom.r * geom.epsilon_r * EPS0 * geom.w / xi


def charging_energies(c: CircuitParams) -> tuple[float, float, float]:
    """Return ``(E_C1, E_C2, E_m)`` in joules.

    Each box's charging energy involves the *other* box's total capacitance,
    ``E_Cj = (2e)^2 C_sum_other / (2 xi)`` and ``E_m = (2e)^2 C_m / (2 xi)``.
    """
    xi = c.xi
    if xi <= 0:
        raise CircuitError("C_sum1 * C_sum2 - C_m**2 must be positive")
    q2 = (2 * E_CHARGE) ** 2
    c1, c2 = c.C_sum
    return q2 * c2 / (2 * xi), q2 * c1 / (2 * xi), q2 * c.C_m / (2 * xi)


def josephson_from_flux(calE_J: float, Phi: float, Phi_0: float = PHI0) -> float:
    """Flux-tuned Josephson energy ``2 calE_J cos(pi Phi / Phi_0)``; sign is kept."""
    return 2 * calE_J * np.cos(np.pi * Phi / Phi_0)


def two_box_frequencies(c: CircuitParams) -> dict:
    """Frequencies entering the two-box Hamiltonian, derived from circuit values."""
    ec1, ec2, em = charging_energies(c)
    wz = ((ec1 + em / 2) / HBAR, (ec2 + em / 2) / HBAR)
    ej = [josephson_from_flux(e, p, c.Phi_0) for e, p in zip(c.calE_J, c.Phi)]
    wx = tuple(e / (2 * HBAR) for e in ej)
    dg = c.gate_offsets
    return {
        "omega_z": wz,
        "omega_z_bar": (wz[0] * dg[0], wz[1] * dg[1]),
        "omega_x": wx,
        "J": em / (4 * HBAR),
    }


def _pair(v):
    if np.ndim(v) == 0:
        return (float(v), float(v))
    v = tuple(float(x) for x in v)
    if len(v) != 2:
        raise ValueError("expected a scalar or a pair")
    return v


def molecule_hamiltonian(omega_z_bar=0.0, omega_x=0.0, J: float = 0.0) -> np.ndarray:
    """``sum_j wz_j Z_j - sum_j wx_j X_j + J Z_1 Z_2`` in the basis uu, ud, du, dd.

    Scalars are broadcast to both boxes. With zero ``omega_z_bar`` this is the
    symmetric co-resonance Hamiltonian.
    """
    wz1, wz2 = _pair(omega_z_bar)
    wx1, wx2 = _pair(omega_x)
    Z1, Z2 = np.kron(PAULI_Z, ID2), np.kron(ID2, PAULI_Z)
    X1, X2 = np.kron(PAULI_X, ID2), np.kron(ID2, PAULI_X)
    return wz1 * Z1 + wz2 * Z2 - wx1 * X1 - wx2 * X2 + J * Z1 @ Z2


def coresonance_energies(omega_x: float, J: float) -> np.ndarray:
    """Closed-form ``(E1, E3, E2, E4) = J (-eps, -1, 1, eps)`` for the symmetric case."""
    eps = np.sqrt(1 + 4 * omega_x ** 2 / J ** 2)
    return J * np.array([-eps, -1.0, 1.0, eps])


@dataclass(frozen=True)
class MoleculeSpectrum:
    """Labelled levels of the CPB molecule.

    ``energies`` and ``states`` are indexed by level label minus one, so
    ``energies[0]`` is E1 and ``energies[2]`` is E2.
    """

    energies: np.ndarray
    states: np.ndarray = field(repr=False)

    def omega(self, i: int, j: int) -> float:
        """Transition frequency ``E_i - E_j``."""
        return float(self.energies[i - 1] - self.energies[j - 1])

    @property
    def epsilon(self) -> float:
        # E4 - E1 = 2 J eps and E2 - E3 = 2 J at co-resonance
        gap = self.omega(2, 3)
        return float(self.omega(4, 1) / gap) if gap != 0 else float("nan")

    @property
    def R(self) -> float:
        """Ratio of the two cavity-coupled gaps, ``w43 / w21``; 1 at co-resonance."""
        return self.omega(4, 3) / self.omega(2, 1)

    @property
    def R_bar(self) -> float:
        """Gap difference ``w43 - w21`` (rad/s)."""
        return self.omega(4, 3) - self.omega(2, 1)

    @property
    def degenerate_pairs(self) -> list[tuple[int, int]]:
        e = self.energies
        tol = 1e-12 * max(1.0, float(np.max(np.abs(e))))
        labels = range(1, 5)
        return [(i, j) for i in labels for j in labels if i < j and abs(e[i - 1] - e[j - 1]) <= tol]

    def omega_table(self) -> np.ndarray:
        """``table[i-1, j-1] = E_i - E_j``."""
        return self.energies[:, None] - self.energies[None, :]


def spectrum(H4: np.ndarray) -> MoleculeSpectrum:
    H4 = np.asarray(H4)
    if H4.shape != (4, 4):
        raise CircuitError("molecule Hamiltonian must be 4x4")
    scale = max(1.0, float(np.max(np.abs(H4))))
    if np.max(np.abs(H4 - H4.conj().T)) > 1e-12 * scale:
        raise CircuitError("molecule Hamiltonian is not Hermitian")
    vals, vecs = np.linalg.eigh(H4)
    vecs = _order_degenerate(vals, vecs, 1e-12 * scale)
    energies = np.empty(4)
    states = np.empty((4, 4), dtype=vecs.dtype)
    for k, level in enumerate(_SORTED_TO_LEVEL):
        energies[level - 1] = vals[k]
        states[:, level - 1] = vecs[:, k]
    return MoleculeSpectrum(energies=energies, states=states)


def _order_degenerate(vals, vecs, tol):
    # within a degenerate cluster, rotate to basis-aligned vectors ordered by basis index
    vecs = vecs.copy()
    k = 0
    while k < len(vals):
        m = k + 1
        while m < len(vals) and vals[m] - vals[k] <= tol:
            m += 1
        if m - k > 1:
            block = vecs[:, k:m]
            proj = block @ block.conj().T
            cols = np.argsort(-np.real(np.diag(proj)), kind="stable")[: m - k]
            cols = np.sort(cols)
            basis = proj[:, cols]
            q, _ = np.linalg.qr(basis)
            for c in range(q.shape[1]):
                piv = np.argmax(np.abs(q[:, c]))
                q[:, c] *= np.abs(q[piv, c]) / q[piv, c]
            vecs[:, k:m] = q
        k = m
    return vecs


def detunings(spec: MoleculeSpectrum, omega_a: float, omega_c: float) -> tuple[float, float, float]:
    """Return ``(Delta, delta, delta_c)``: each gap minus its field frequency.

    ``Delta = w43 - omega_a``, ``delta = w21 - omega_a``, ``delta_c = w23 - omega_c``.
    """
    return spec.omega(4, 3) - omega_a, spec.omega(2, 1) - omega_a, spec.omega(2, 3) - omega_c
