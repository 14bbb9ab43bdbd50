"""Photon statistics of a cavity coupled to a four-level charge-qubit molecule."""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0.0.0"

from .circuit import MoleculeSpectrum, molecule_hamiltonian, spectrum
from .kerr import KerrParams, eta_fit, kerr_g2_zero
from .model import NSystemParams, liouvillian
from .observables import g2_map, g2_tau, g2_zero, solve_nsystem, squeezing_spectrum
from .solvers import steady_state, two_time

__all__ = [
    "KerrParams", "MoleculeSpectrum", "NSystemParams", "eta_fit", "g2_map", "g2_tau", "g2_zero",
    "kerr_g2_zero", "liouvillian", "molecule_hamiltonian", "solve_nsystem", "spectrum",
    "squeezing_spectrum", "steady_state", "two_time",
]
