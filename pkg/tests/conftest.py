import warnings

import pytest

from barrierprod.models import SabrParams, SlnParams

# Published calibration tables: (days, q, sigma_bar) for SLN and (days, sigma1?, rho, nu) for SABR beta=1
SP500_SLN = [
    (32, -11.01, 0.0508),
    (67, -7.7, 0.0744),
    (102, -6.07, 0.0943),
    (148, -4.7, 0.11),
    (228, -3.16, 0.1464),
    (319, -2.7, 0.1698),
    (347, -2.57, 0.1768),
    (501, -1.82, 0.2169),
    (683, -1.08, 0.2642),
    (1047, -0.5, 0.3399),
]
SP500_SABR_RHO = [-0.85, -0.84, -0.88, -0.9, -0.99, -0.99, -0.99, -0.99, -0.99, -0.99]
SP500_SABR_NU = [2.37, 1.8, 1.15, 0.91, 0.58, 0.49, 0.46, 0.33, 0.21, 0.1]

EUROSTOXX_DAYS = [49, 84, 112, 203, 294, 385, 749]
EUROSTOXX_SLN = [
    (d, q, s)
    for d, q, s in zip(
        EUROSTOXX_DAYS,
        [-4.23, -2.92, -2.78, -1.73, -1.1, -0.73, -0.0001],
        [0.0573, 0.0804, 0.0952, 0.1312, 0.1619, 0.1885, 0.274],
    )
]
EUROSTOXX_SABR_RHO = [-0.53, -0.61, -0.65, -0.7, -0.66, -0.56, -0.54]
EUROSTOXX_SABR_NU = [2.51, 1.58, 1.24, 0.87, 0.52, 0.46, 0.41]

DELTA_DYNAMIC = [0.17, 0.17, 0.19, 0.20, 0.24, 0.31]
DELTA_STATIC = [0.22, 0.23, 0.23, 0.23, 0.26, 0.34]
MC_LEVELS = (0.60, 0.65, 0.70, 0.75, 0.80, 0.90)


def sln(days_row):
    _, q, s = days_row
    return SlnParams(s, q)


def sabr1(sigma1, rho, nu):
    return SabrParams(sigma1, rho, nu, 1.0)


@pytest.fixture(autouse=True)
def _quiet_runtime_warnings():
    with warnings.catch_warnings():
        warnings.simplefilter("default")
        yield


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
