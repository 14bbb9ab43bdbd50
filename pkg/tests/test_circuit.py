import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from giantkerr import circuit as cpb

# 50-digit arbitrary-precision evaluations of the same formulas
K_ONE = 1.76274717403908605
XI_REF = 0.0796150874764177
CM_REF = 3.14445754455679e-20
CM_2W_REF = 5.48132312342910e-20
EC_16AF = 3.20872485138444e-21
EM_16AF = 6.30606191708918e-24
EPS_PROTO = 26.0192236625154


def test_kernel_value():
    assert cpb.K(1.0) == pytest.approx(K_ONE, rel=1e-15)


def test_geometry_factor_and_capacitance():
    g = cpb.GeometryParams(50e-6, 10e-6, 0.5e-6)
    assert cpb.geometry_factor(g) == pytest.approx(XI_REF, rel=1e-12)
    assert cpb.mutual_capacitance(g) == pytest.approx(CM_REF, rel=1e-12)
    g2 = cpb.GeometryParams(50e-6, 20e-6, 0.5e-6)
    assert cpb.mutual_capacitance(g2) == pytest.approx(CM_2W_REF, rel=1e-12)


@pytest.mark.parametrize("args", [(1e-6, 1e-6, 1e-6), (-1, 1, 0.1), (10, 1, 1, 0.5)])
def test_geometry_validation(args):
    with pytest.raises(cpb.CircuitError):
        cpb.GeometryParams(*args)


def _symmetric(C_sum=16e-18, C_m=3.1e-20, calE_J=1e-24):
    C_g = 1e-18
    return cpb.CircuitParams(C_j=(C_sum - C_g - C_m,) * 2, C_g=(C_g,) * 2, C_m=C_m, calE_J=(calE_J,) * 2)


def test_charging_energies_reference():
    E1, E2, Em = cpb.charging_energies(_symmetric(C_m=CM_REF))
    assert E1 == pytest.approx(EC_16AF, rel=1e-10)
    assert E2 == pytest.approx(EC_16AF, rel=1e-10)
    assert Em == pytest.approx(EM_16AF, rel=1e-10)
    f = cpb.two_box_frequencies(_symmetric(C_m=CM_REF))
    assert f["J"] / (2 * np.pi) == pytest.approx(2.37926e9, rel=1e-5)


def test_circuit_validation():
    with pytest.raises(cpb.CircuitError):
        _symmetric(C_m=-1e-20)
    with pytest.raises(cpb.CircuitError):
        cpb.CircuitParams(C_j=(0.0, 1e-18), C_g=(1e-18,) * 2, C_m=1e-20, calE_J=(1,) * 2)


def test_box_swap_exchanges_energies():
    c = cpb.CircuitParams(C_j=(10e-18, 12e-18), C_g=(1e-18, 2e-18), C_m=3e-20, calE_J=(1e-24, 2e-24))
    E1, E2, Em = cpb.charging_energies(c)
    F1, F2, Fm = cpb.charging_energies(c.swapped())
    assert (F1, F2) == pytest.approx((E2, E1), rel=1e-14)
    assert Fm == pytest.approx(Em, rel=1e-14)


def test_flux_tuning():
    assert cpb.josephson_from_flux(2.0, 0.0) == pytest.approx(4.0)
    assert cpb.josephson_from_flux(2.0, cpb.PHI0 / 2) == pytest.approx(0.0, abs=1e-15)


def test_prototype_spectrum():
    w = 2 * np.pi
    spec = cpb.spectrum(cpb.molecule_hamiltonian(0.0, w * 2.6e9, w * 0.2e9))
    assert spec.epsilon == pytest.approx(EPS_PROTO, rel=1e-12)
    assert spec.omega(2, 3) == pytest.approx(2 * w * 0.2e9, rel=1e-12)
    assert spec.R == pytest.approx(1.0, rel=1e-12)
    assert spec.omega(2, 1) == pytest.approx(spec.omega(4, 3), rel=1e-12)


def test_offset_scenario_gap_difference():
    w = 2 * np.pi
    H = cpb.molecule_hamiltonian(w * 16e9 * 2.8e-3, w * 4e9, w * 0.2e9)
    spec = cpb.spectrum(H)
    assert spec.R_bar / (w * 1e5) == pytest.approx(1.00339, rel=1e-5)


def test_level_ordering_e1_e3_e2_e4():
    spec = cpb.spectrum(cpb.molecule_hamiltonian(0.0, 1.3, 0.7))
    e = spec.energies
    assert e[0] < e[2] < e[1] < e[3]


def test_degenerate_levels_reported():
    spec = cpb.spectrum(cpb.molecule_hamiltonian(0.0, 0.0, 1.0))
    assert spec.degenerate_pairs
    with pytest.raises(cpb.CircuitError):
        cpb.spectrum(np.triu(np.ones((4, 4))))


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_closed_form_matches_diagonalization(wx, J):
    spec = cpb.spectrum(cpb.molecule_hamiltonian(0.0, wx, J))
    closed = cpb.coresonance_energies(wx, J)
    numeric = spec.energies[[0, 2, 1, 3]]
    assert np.max(np.abs(numeric - closed)) <= 1e-12 * np.max(np.abs(closed))
    assert spec.energies[0] == pytest.approx(-spec.energies[3], rel=1e-12)
    assert spec.epsilon >= 1


@settings(max_examples=100, deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(0.1, 10), st.floats(0.1, 10))
def test_spectrum_invariant_under_x_sign(wz1, wz2, wx, J):
    a = np.linalg.eigvalsh(cpb.molecule_hamiltonian((wz1, wz2), wx, J))
    b = np.linalg.eigvalsh(cpb.molecule_hamiltonian((wz1, wz2), -wx, J))
    assert np.allclose(a, b, atol=1e-12 * max(1, np.abs(a).max()))


def test_detunings():
    spec = cpb.spectrum(cpb.molecule_hamiltonian(0.0, 2.0, 1.0))
    D, d, dc = cpb.detunings(spec, spec.omega(2, 1) - 0.3, spec.omega(2, 3))
    assert (D, d, dc) == pytest.approx((0.3, 0.3, 0.0), abs=1e-12)
