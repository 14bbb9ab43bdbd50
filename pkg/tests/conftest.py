import numpy as np
import pytest

from giantkerr.model import NSystemParams, fig_rates


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def blockade_params(**kw) -> NSystemParams:
    base = dict(g1=300.0, g2=300.0, Omega_c=731.3, E_p=0.05, kappa=1.0, gamma=fig_rates(), N_max=8)
    base.update(kw)
    return NSystemParams.from_detunings(0.5, 0.5, **base)


def squeeze_params(Omega_c: float, **kw) -> NSystemParams:
    base = dict(g1=300.0, g2=300.0, Omega_c=Omega_c, E_p=0.14, kappa=1.0, gamma=fig_rates(), N_max=8)
    base.update(kw)
    return NSystemParams.from_detunings(5.13, -4.89, **base)


_CRITERIA: list[str] = []


@pytest.fixture
def criterion():
    """Record a one-line PASS/FAIL verdict for the acceptance summary."""

    def record(name: str, ok: bool, detail: str = "") -> bool:
        line = f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  [{detail}]" if detail else "")
        _CRITERIA.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
