import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from giantkerr.operators import (DimensionError, HilbertSpace, SingularSystemError, apply_dissipator,
                                 atomic_sigma, dag, destroy, fock_annihilation, liouvillian_matrix,
                                 random_density_matrix, solve_linear, tensor, trace_row, unvec, vec)


def test_space_dims():
    s = HilbertSpace(5)
    assert s.total_dim == 20
    assert s.identity().shape == (20, 20)
    with pytest.raises(ValueError):
        HilbertSpace(1)
    with pytest.raises(ValueError):
        HilbertSpace(4, atom_dim=3)
    with pytest.raises(DimensionError):
        s.check(np.eye(19))


def test_destroy_commutator_below_cutoff():
    n = 6
    a = destroy(n)
    c = a @ dag(a) - dag(a) @ a
    # exact except in the top Fock level
    assert np.allclose(c[:-1, :-1], np.eye(n - 1))
    assert np.isclose(c[-1, -1], -(n - 1))


def test_sigma_algebra():
    s = HilbertSpace(3)
    for i in range(1, 5):
        for j in range(1, 5):
            for k in range(1, 5):
                lhs = atomic_sigma(s, i, j) @ atomic_sigma(s, j, k)
                assert np.allclose(lhs, atomic_sigma(s, i, k))
    total = sum(atomic_sigma(s, k, k) for k in range(1, 5))
    assert np.allclose(total, s.identity())
    with pytest.raises(IndexError):
        atomic_sigma(s, 0, 1)


def test_atom_factor_is_leftmost():
    s = HilbertSpace(3)
    a = fock_annihilation(s)
    assert np.allclose(a[:3, :3], destroy(3))
    assert np.allclose(a @ atomic_sigma(s, 2, 1), atomic_sigma(s, 2, 1) @ a)
    with pytest.raises(DimensionError):
        tensor(np.eye(4), np.eye(2), s)


def test_vec_roundtrip(rng):
    X = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    assert np.array_equal(unvec(vec(X)), X)
    assert np.isclose(trace_row(5) @ vec(X), np.trace(X))


def _random_system(rng, d, n_ops=2):
    H = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    H = H + dag(H)
    ops = [(float(rng.uniform(0.1, 2)), rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
           for _ in range(n_ops)]
    return H, ops


def test_liouvillian_matches_direct_action(rng):
    d = 5
    H, ops = _random_system(rng, d)
    rho = random_density_matrix(d, rng)
    L = liouvillian_matrix(H, ops)
    direct = -1j * (H @ rho - rho @ H) + sum(r * apply_dissipator(A, rho) for r, A in ops)
    assert np.allclose(unvec(L @ vec(rho)), direct, atol=1e-12)


def test_sparse_and_dense_agree(rng):
    H, ops = _random_system(rng, 4)
    Ld = liouvillian_matrix(H, ops)
    Ls = liouvillian_matrix(H, ops, sparse=True)
    assert sp.issparse(Ls)
    assert np.allclose(Ls.toarray(), Ld, atol=1e-14)


def test_liouvillian_rejects_negative_rate():
    with pytest.raises(ValueError):
        liouvillian_matrix(np.eye(2), [(-1.0, destroy(2))])
    with pytest.raises(DimensionError):
        liouvillian_matrix(np.eye(2), [(1.0, destroy(3))])


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_trace_preservation(d, seed):
    rng = np.random.default_rng(seed)
    H, ops = _random_system(rng, d)
    L = liouvillian_matrix(H, ops)
    scale = max(1.0, np.abs(L).max())
    assert np.max(np.abs(trace_row(d) @ L)) <= 1e-12 * scale


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_spectrum_is_stable(d, seed):
    rng = np.random.default_rng(seed)
    H, ops = _random_system(rng, d)
    ev = np.linalg.eigvals(liouvillian_matrix(H, ops))
    assert np.max(ev.real) <= 1e-10 * max(1.0, np.abs(ev).max())


def test_solve_linear_dense_and_sparse(rng):
    n = 30
    M = rng.normal(size=(n, n)) + n * np.eye(n)
    b = rng.normal(size=n)
    for A in (M, sp.csc_matrix(M)):
        x = solve_linear(A, b)
        assert np.linalg.norm(A @ x - b) <= 1e-10 * np.linalg.norm(b)


def test_solve_linear_singular():
    M = np.ones((3, 3))
    with pytest.raises(SingularSystemError):
        solve_linear(M, np.array([1.0, 2.0, 3.0]))
    with pytest.raises(SingularSystemError):
        solve_linear(sp.csc_matrix(np.diag([1.0, 0.0, 1.0])), np.ones(3))
    with pytest.raises(DimensionError):
        solve_linear(np.eye(3), np.ones(4))
