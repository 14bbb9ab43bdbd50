"""Steady states, time propagation and two-time correlations of a Liouvillian.

Liouvillians are column-stacked superoperators (see :mod:`giantkerr.operators`),
dense or scipy-sparse. Steady states and frequency-domain solves use sparse LU;
time propagation uses dense matrix exponentials on a fixed grid.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .operators import SingularSystemError, solve_linear, trace_row, unvec, vec

log = logging.getLogger(__name__)

POSITIVITY_TOL = 1e-8
TOP_FOCK_TOL = 1e-8
RESOLVE_RTOL = 1e-4
RESIDUAL_TOL = 1e-10


class SteadyStateError(RuntimeError):
    pass


class PositivityError(SteadyStateError):
    pass


@dataclass
class SteadyState:
    rho: np.ndarray
    residual: float
    top_fock_population: float
    converged: bool
    fock_dim: int | None = None
    min_eigenvalue: float = 0.0

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    def number_operator(self) -> np.ndarray:
        return np.diag(_photon_numbers(self.dim, self.fock_dim)).astype(complex)

    @property
    def n_bar(self) -> float:
        return float(np.real(np.diag(self.rho)) @ _photon_numbers(self.dim, self.fock_dim))


@dataclass
class CorrelationSeries:
    grid: np.ndarray
    values: np.ndarray
    tag: str = ""

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values)
        if self.grid.shape != self.values.shape:
            raise ValueError("grid and values must have equal length")


def _photon_numbers(dim: int, fock_dim: int | None) -> np.ndarray:
    if fock_dim is None:
        fock_dim = dim
    return np.tile(np.arange(fock_dim, dtype=float), dim // fock_dim)


def _fock_populations(rho: np.ndarray, fock_dim: int) -> np.ndarray:
    p = np.real(np.diag(rho)).reshape(-1, fock_dim)
    return p.sum(axis=0)


def _dim_of(L) -> int:
    d = int(round(np.sqrt(L.shape[0])))
    if d * d != L.shape[0] or L.shape[0] != L.shape[1]:
        raise ValueError(f"not a superoperator shape: {L.shape}")
    return d


def _with_trace_row(M):
    """Replace row 0 of ``M`` by the trace functional (returns CSC)."""
    d = _dim_of(M)
    M = sp.csr_matrix(M, dtype=complex, copy=True)
    t = sp.csr_matrix(trace_row(d)[None, :].astype(complex))
    rest = M[1:, :]
    return sp.vstack([t, rest], format="csc")


def steady_state(L, fock_dim: int | None = None, check_positivity: bool = True) -> SteadyState:
    """Unique trace-one null vector of ``L``.

    Row 0 of ``L`` is replaced by the trace constraint; the residual is
    measured against the unmodified (max-norm scaled) ``L``. The ``converged``
    flag reports the residual and, when ``fock_dim`` is given, that the top
    two Fock levels hold less than ``TOP_FOCK_TOL`` population.
    """
    d = _dim_of(L)
    scale = abs(L).max()
    if scale == 0:
        raise SteadyStateError("zero Liouvillian has no unique steady state")
    Ls = L / scale
    b = np.zeros(d * d, dtype=complex)
    b[0] = 1.0
    try:
        x = solve_linear(_with_trace_row(Ls), b)
    except SingularSystemError as exc:
        raise SteadyStateError(f"steady state is not unique: {exc}") from exc
    rho = unvec(x, d)
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    residual = float(np.linalg.norm(Ls @ vec(rho)))
    evals = np.linalg.eigvalsh(rho)
    min_ev = float(evals[0])
    if check_positivity and min_ev < -POSITIVITY_TOL:
        raise PositivityError(
            f"steady state has eigenvalue {min_ev:.3e} < -{POSITIVITY_TOL:g}; "
            f"residual {residual:.2e}, trace {np.trace(rho).real:.12f}; "
            "increase the Fock truncation rather than clipping")
    top = float("nan")
    converged = residual <= RESIDUAL_TOL
    if fock_dim is not None:
        top = float(_fock_populations(rho, fock_dim)[-2:].sum())
        converged = converged and top < TOP_FOCK_TOL
    return SteadyState(rho=rho, residual=residual, top_fock_population=top,
                       converged=converged, fock_dim=fock_dim, min_eigenvalue=min_ev)


def converged_steady_state(build: Callable[[int], object], n_max: int = 8, n_limit: int = 20,
                           step: int = 2, verify: bool = True) -> SteadyState:
    """Steady state with automatic Fock-truncation escalation.

    ``build(n)`` returns the Liouvillian at Fock dimension ``n``. The truncation
    grows by ``step`` until the top-level population test passes, then (if
    ``verify``) a re-solve at ``n + 3`` must reproduce the mean photon number
    to ``RESOLVE_RTOL``. If ``n_limit`` is reached the last state is returned
    with ``converged=False``.
    """
    n = n_max
    while True:
        ss = steady_state(build(n), fock_dim=n)
        if ss.converged and verify:
            check = steady_state(build(n + 3), fock_dim=n + 3)
            nb, nb3 = ss.n_bar, check.n_bar
            ok = abs(nb - nb3) <= RESOLVE_RTOL * max(abs(nb3), 1e-300)
            ss.converged = ok
            if ok:
                return ss
        elif ss.converged:
            return ss
        if n >= n_limit:
            log.warning("Fock truncation not converged at N_max=%d (top population %.2e)",
                        n, ss.top_fock_population)
            ss.converged = False
            return ss
        n = min(n + step, n_limit)


def _dense(L) -> np.ndarray:
    return L.toarray() if sp.issparse(L) else np.asarray(L)


def _uniform_step(tau: np.ndarray) -> float | None:
    if len(tau) < 2:
        return None
    steps = np.diff(tau)
    dt = (tau[-1] - tau[0]) / (len(tau) - 1)
    if np.allclose(steps, dt, rtol=1e-9, atol=0):
        return float(dt)
    return None


def _check_grid(tau) -> np.ndarray:
    tau = np.asarray(tau, dtype=float)
    if tau.ndim != 1 or len(tau) == 0:
        raise ValueError("tau grid must be a non-empty 1-d sequence")
    if tau[0] < 0 or np.any(np.diff(tau) <= 0):
        raise ValueError("tau grid must start at >= 0 and be strictly increasing")
    return tau


def _expm(M: np.ndarray) -> np.ndarray:
    P = sla.expm(M)
    if not np.all(np.isfinite(P)):
        raise FloatingPointError("matrix exponential overflowed; reduce the time step")
    return P


def evolve(L, X0: np.ndarray, tau_grid: Sequence[float]) -> np.ndarray:
    """``exp(L tau) X0`` for each tau; rows of the returned array follow the grid."""
    tau = _check_grid(tau_grid)
    Ld = _dense(L)
    X0 = np.asarray(X0, dtype=complex)
    out = np.empty((len(tau), X0.size), dtype=complex)
    x = X0 if tau[0] == 0 else _expm(Ld * tau[0]) @ X0
    out[0] = x
    dt = _uniform_step(tau)
    P = _expm(Ld * dt) if dt is not None else None
    cache: dict[float, np.ndarray] = {}
    for k in range(1, len(tau)):
        if P is None:
            h = float(tau[k] - tau[k - 1])
            key = round(h, 15)
            if key not in cache:
                cache[key] = _expm(Ld * h)
            x = cache[key] @ x
        else:
            x = P @ x
        out[k] = x
    return out


def trace_series(L, rows: np.ndarray, X0: np.ndarray, tau_grid: Sequence[float],
                 block: int = 512) -> np.ndarray:
    """``rows[r] @ exp(L tau_k) X0`` for every functional row and grid point.

    On a uniform grid starting at zero this avoids storing the trajectory:
    with ``P = exp(L dt)`` and ``Q = P^block``, the value at step
    ``j * block + k`` is ``(rows P^k) (Q^j X0)``.
    """
    tau = _check_grid(tau_grid)
    rows = np.atleast_2d(np.asarray(rows, dtype=complex))
    X0 = np.asarray(X0, dtype=complex)
    dt = _uniform_step(tau)
    if dt is None or tau[0] != 0 or len(tau) <= block:
        return rows @ evolve(L, X0, tau).T
    Ld = _dense(L)
    n = len(tau)
    m = block
    J = -(-n // m)
    P = _expm(Ld * dt)
    Q = _expm(Ld * (dt * m))
    W = np.empty((m, rows.shape[0], X0.size), dtype=complex)
    w = rows.copy()
    for k in range(m):
        W[k] = w
        w = w @ P
    X = np.empty((X0.size, J), dtype=complex)
    x = X0.copy()
    for j in range(J):
        X[:, j] = x
        x = Q @ x
    r = rows.shape[0]
    vals = (W.reshape(m * r, -1) @ X).reshape(m, r, J).transpose(1, 2, 0).reshape(r, J * m)
    return vals[:, :n]


def two_time(L, A: np.ndarray, B: np.ndarray, C: np.ndarray, rho_ss: np.ndarray,
             tau_grid: Sequence[float], tag: str = "") -> CorrelationSeries:
    """``<B(t) A(t + tau) C(t)>`` in the steady state via the regression theorem.

    Evaluated as ``Tr[A exp(L tau)(C rho B)]``.
    """
    tau = _check_grid(tau_grid)
    A = np.asarray(A)
    X0 = vec(C @ rho_ss @ B)
    row = vec(A.T)  # Tr[A X] = sum_ij A_ji X_ij
    vals = trace_series(L, row, X0, tau)[0]
    if tau[0] == 0:
        vals[0] = np.trace(A @ C @ rho_ss @ B)
    return CorrelationSeries(tau, vals, tag)


def spectral_solve(L, A: np.ndarray, B: np.ndarray, rho_ss: np.ndarray,
                   omega_grid: Sequence[float], tag: str = "") -> CorrelationSeries:
    """One-sided transform ``int_0^inf exp(i w tau) <dA(tau) dB(0)> dtau``.

    Here ``dX = X - <X>``. Each frequency is one sparse solve of
    ``(L + i w) Y = dB rho`` restricted to traceless ``Y``; the constraint
    replaces one redundant row, so ``w = 0`` is handled as well.
    """
    d = _dim_of(L)
    I = np.eye(d)
    dA = A - np.trace(A @ rho_ss) * I
    dB = B - np.trace(B @ rho_ss) * I
    x = vec(dB @ rho_ss)
    row = vec(dA.T)
    b = x.copy()
    b[0] = 0.0
    Ls = sp.csc_matrix(L, dtype=complex)
    ident = sp.identity(d * d, dtype=complex, format="csc")
    omega = np.asarray(omega_grid, dtype=float)
    vals = np.empty(len(omega), dtype=complex)
    for k, w in enumerate(omega):
        M = _with_trace_row(Ls + 1j * w * ident)
        try:
            y = solve_linear(M, b, rtol=1e-9)
        except SingularSystemError as exc:
            raise SteadyStateError(f"spectral solve failed at omega={w:g}: {exc}") from exc
        vals[k] = -(row @ y)
    return CorrelationSeries(omega, vals, tag)


def fourier_one_sided(values: np.ndarray, dt: float, omega_grid: Sequence[float]) -> np.ndarray:
    """Composite-Simpson estimate of ``int_0^T exp(i w tau) f(tau) dtau``.

    ``values`` are samples of ``f`` on ``0, dt, ..., T`` (odd count).
    """
    values = np.asarray(values)
    n = len(values)
    if n % 2 == 0:
        raise ValueError("Simpson quadrature needs an odd number of samples")
    wts = np.ones(n)
    wts[1:-1:2] = 4.0
    wts[2:-1:2] = 2.0
    wts *= dt / 3.0
    tau = dt * np.arange(n)
    omega = np.asarray(omega_grid, dtype=float)
    return np.array([np.sum(wts * np.exp(1j * w * tau) * values) for w in omega])
