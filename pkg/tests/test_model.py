import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from giantkerr import model as nsys
from giantkerr.operators import HilbertSpace, atomic_sigma, trace_row


def test_detuning_map():
    assert nsys.detuning_map(5.0, 2.0, 0.5) == (2.0, 1.5, 6.5)


def test_hamiltonian_is_hermitian():
    p = nsys.NSystemParams(g1=1.0, g2=2.0, Omega_c=0.3 + 0.4j, E_p=0.2, Delta21=0.5, Delta31=-0.1,
                           Delta41=1.0, N_max=4)
    H = nsys.system_hamiltonian(p)
    assert np.allclose(H, H.conj().T)
    assert H.shape == (16, 16)


def test_excitation_number_conserved_without_drive():
    p = nsys.NSystemParams(g1=1.0, g2=2.0, Omega_c=0.7, N_max=5)
    s = p.space()
    H = nsys.system_hamiltonian(p)
    # the classical control field is not counted, so 2 and 3 weigh one and 4 weighs two
    Nexc = (np.diag(np.tile(np.arange(5), 4)) + atomic_sigma(s, 2, 2) + atomic_sigma(s, 3, 3)
            + 2 * atomic_sigma(s, 4, 4))
    assert np.allclose(H @ Nexc, Nexc @ H)


def test_collapse_channels_listing():
    p = nsys.NSystemParams(kappa=1.0, gamma=nsys.fig_rates(), gamma_ph=0.25, N_max=3)
    ch = nsys.collapse_channels(p)
    assert len(ch) == 1 + 6 + 4
    s = HilbertSpace(3)
    assert ch[1][0] == 0.1 and np.allclose(ch[1][1], atomic_sigma(s, 1, 2))
    assert ch[2][0] == 0.01 and np.allclose(ch[2][1], atomic_sigma(s, 3, 2))
    assert np.allclose(ch[-1][1], atomic_sigma(s, 4, 4))


def test_literal_rates_leave_42_dark():
    g = nsys.fig_rates(gamma42=False)
    assert g[3, 1] == 0 and g[1, 0] == 0.1


@pytest.mark.parametrize("kw", [
    {"kappa": -1.0}, {"gamma": {"12": 0.1}}, {"gamma": {"11": 0.1}}, {"gamma_ph": -0.1}, {"N_max": 1},
])
def test_param_validation(kw):
    with pytest.raises(ValueError):
        nsys.NSystemParams(**kw)


def test_scaling_divides_every_rate():
    p = nsys.NSystemParams(g1=2.0, g2=4.0, Omega_c=6.0, E_p=8.0, Delta21=2.0, kappa=2.0,
                           gamma={"21": 0.2}, gamma_ph=0.4)
    q = p.scaled(2.0)
    assert (q.g1, q.g2, q.Omega_c, q.E_p, q.Delta21, q.kappa) == (1.0, 2.0, 3.0, 4.0, 1.0, 1.0)
    assert q.gamma[1, 0] == pytest.approx(0.1)
    assert np.allclose(q.gamma_ph, 0.2)


@settings(max_examples=20, deadline=None)
@given(st.floats(0, 500), st.floats(0, 1000), st.floats(0, 2), st.floats(-10, 10), st.floats(-10, 10),
       st.floats(0, 1))
def test_generated_liouvillian_preserves_trace(g, Oc, Ep, D, d, gph):
    p = nsys.NSystemParams.from_detunings(D, d, g1=g, g2=g, Omega_c=Oc, E_p=Ep,
                                          gamma=nsys.fig_rates(), gamma_ph=gph, N_max=3)
    L = nsys.liouvillian(p)
    t = trace_row(12)
    assert np.max(np.abs(t @ L)) <= 1e-12 * max(1.0, abs(L).max())


def test_small_liouvillian_spectrum_is_stable():
    p = nsys.NSystemParams.from_detunings(0.5, 0.5, g1=3.0, g2=3.0, Omega_c=7.0, E_p=0.5,
                                          gamma=nsys.fig_rates(), N_max=4)
    ev = np.linalg.eigvals(nsys.liouvillian(p, sparse=False))
    assert ev.real.max() <= 1e-10


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-15, 1e-3), st.floats(1e3, 1e9), st.floats(1e9, 1e11))
def test_drive_power_roundtrip(P, kappa, wa):
    E = nsys.drive_from_power(P, kappa, wa)
    assert nsys.power_from_drive(E, kappa, wa) == pytest.approx(P, rel=1e-12)


def test_drive_power_rejects_negative():
    with pytest.raises(ValueError):
        nsys.drive_from_power(-1.0, 1.0, 1.0)
