"""Operator kernel for the atom (4 levels) x cavity (Fock) composite space.

Operators are plain complex ``numpy`` arrays. Superoperators act on
column-stacked density matrices, so that ``vec(A @ rho @ B) = kron(B.T, A) @ vec(rho)``.
The atom factor is always the leftmost tensor factor.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

ATOM_DIM = 4


class DimensionError(ValueError):
    """Operator shapes do not match the declared space."""


class SingularSystemError(RuntimeError):
    """A linear solve hit a (numerically) singular matrix."""


@dataclass(frozen=True)
class HilbertSpace:
    fock_dim: int
    atom_dim: int = ATOM_DIM

    def __post_init__(self):
        if self.atom_dim != ATOM_DIM:
            raise ValueError("atom_dim is fixed to 4")
        if int(self.fock_dim) != self.fock_dim or self.fock_dim < 2:
            raise ValueError(f"fock_dim must be an integer >= 2, got {self.fock_dim}")

    @property
    def total_dim(self) -> int:
        return self.atom_dim * self.fock_dim

    def identity(self) -> np.ndarray:
        return np.eye(self.total_dim, dtype=complex)

    def check(self, op: np.ndarray) -> np.ndarray:
        op = np.asarray(op)
        if op.shape != (self.total_dim, self.total_dim):
            raise DimensionError(f"operator shape {op.shape} does not match dim {self.total_dim}")
        return op


def destroy(n: int) -> np.ndarray:
    """Truncated annihilation operator on an ``n``-level Fock space."""
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1).astype(complex)


def dag(op):
    return op.conj().T


def tensor(a: np.ndarray, b: np.ndarray, space: HilbertSpace | None = None) -> np.ndarray:
    """Kronecker product with ``a`` as the leftmost (atom) factor."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[0] != a.shape[1] or b.shape[0] != b.shape[1]:
        raise DimensionError("tensor factors must be square matrices")
    if space is not None and a.shape[0] * b.shape[0] != space.total_dim:
        raise DimensionError(
            f"factor dims {a.shape[0]}x{b.shape[0]} do not multiply to {space.total_dim}")
    return np.kron(a, b)


def fock_annihilation(space: HilbertSpace) -> np.ndarray:
    return tensor(np.eye(space.atom_dim), destroy(space.fock_dim))


def atomic_sigma(space: HilbertSpace, i: int, j: int) -> np.ndarray:
    """``|i><j|`` on the atom (levels numbered 1..4), identity on the cavity."""
    for k in (i, j):
        if not 1 <= k <= space.atom_dim:
            raise IndexError(f"level index {k} outside 1..{space.atom_dim}")
    proj = np.zeros((space.atom_dim, space.atom_dim), dtype=complex)
    proj[i - 1, j - 1] = 1.0
    return tensor(proj, np.eye(space.fock_dim))


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int | None = None) -> np.ndarray:
    v = np.asarray(v)
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    return v.reshape(dim, dim, order="F")


def trace_row(dim: int) -> np.ndarray:
    """Row vector ``t`` with ``t @ vec(X) == trace(X)``."""
    return vec(np.eye(dim))


def liouvillian_matrix(H: np.ndarray, collapse_ops: Iterable[tuple[float, np.ndarray]],
                       sparse: bool = False):
    """Superoperator of ``-i[H, rho] + sum_k rate_k (2 A rho A^+ - {A^+ A, rho})``.

    The dissipator carries no 1/2, so a channel ``(kappa, a)`` damps the field
    amplitude at rate ``kappa`` and the photon number at ``2 kappa``.
    Returns a dense array, or CSC sparse matrix if ``sparse`` is set.
    """
    H = np.asarray(H)
    d = H.shape[0]
    if H.shape != (d, d):
        raise DimensionError("Hamiltonian must be square")
    kron = sp.kron if sparse else np.kron
    Id = sp.identity(d, dtype=complex, format="csr") if sparse else np.eye(d, dtype=complex)
    if sparse:
        Hs = sp.csr_matrix(H)
        L = -1j * (kron(Id, Hs) - kron(Hs.T, Id))
    else:
        L = -1j * (kron(Id, H) - kron(H.T, Id))
    for rate, A in collapse_ops:
        if rate < 0:
            raise ValueError(f"negative decay rate {rate}")
        if rate == 0:
            continue
        A = np.asarray(A)
        if A.shape != (d, d):
            raise DimensionError(f"collapse operator shape {A.shape} != {(d, d)}")
        AdA = dag(A) @ A
        if sparse:
            As, AdAs = sp.csr_matrix(A), sp.csr_matrix(AdA)
            L = L + rate * (2 * kron(As.conj(), As) - kron(Id, AdAs) - kron(AdAs.T, Id))
        else:
            L = L + rate * (2 * kron(A.conj(), A) - kron(Id, AdA) - kron(AdA.T, Id))
    return sp.csc_matrix(L) if sparse else L


def apply_dissipator(A: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Direct evaluation of ``2 A rho A^+ - {A^+ A, rho}``."""
    AdA = dag(A) @ A
    return 2 * A @ rho @ dag(A) - AdA @ rho - rho @ AdA


def solve_linear(M, b: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    """Solve ``M x = b`` for dense or sparse ``M`` and verify the residual.

    Raises :class:`SingularSystemError` when the matrix is singular to working
    precision or the residual exceeds ``rtol * |b|``.
    """
    b = np.asarray(b, dtype=complex)
    if M.shape[0] != M.shape[1] or M.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot solve {M.shape} system with rhs of length {b.shape[0]}")
    try:
        if sp.issparse(M):
            M = sp.csc_matrix(M, dtype=complex)
            with warnings.catch_warnings():
                warnings.simplefilter("error", spla.MatrixRankWarning)
                x = spla.splu(M).solve(b)
        else:
            with warnings.catch_warnings():
                warnings.simplefilter("error", sla.LinAlgWarning)
                x = sla.solve(M, b)
    except (RuntimeError, sla.LinAlgError, sla.LinAlgWarning, spla.MatrixRankWarning) as exc:
        raise SingularSystemError(f"singular linear system: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("linear solve produced non-finite values")
    resid = np.linalg.norm(M @ x - b)
    scale = np.linalg.norm(b)
    if resid > rtol * max(scale, np.finfo(float).tiny):
        raise SingularSystemError(f"residual {resid:.3e} exceeds rtol*|b| = {rtol * scale:.3e}")
    return x


def random_density_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = X @ dag(X)
    return rho / np.trace(rho)


def expectation(op: np.ndarray, rho: np.ndarray) -> complex:
    return complex(np.trace(op @ rho))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a

