"""Shared fixtures and slow-but-obvious reference implementations."""
import math

import numpy as np
import pytest

from lpbk import GridSpec, sample_preset


def direct_dft(values: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Symmetric-convention coefficients by explicit summation over grid points."""
    coeffs = np.zeros(grid.shape, dtype=complex)
    xs = grid.coordinates
    for k in np.ndindex(*grid.shape):
        phase = sum(w[k] * x for w, x in zip(grid.wavenumbers, xs))
        coeffs[k] = np.sum(values * np.exp(-1j * phase))
    return (2 * math.pi) ** (-grid.dim / 2) * grid.cell_volume * coeffs


def naive_maximal(values: np.ndarray, n: int) -> np.ndarray:
    """1D centred maximal function by explicit window averages of every radius."""
    a = np.abs(values)
    out = np.zeros(n)
    for x in range(n):
        best = a[x]
        for r in range(1, n // 2 + 1):
            idx = {(x + d) % n for d in range(-r, r + 1)}
            best = max(best, sum(a[i] for i in idx) / len(idx))
        out[x] = best
    return out


@pytest.fixture(scope="session")
def grid1d():
    return GridSpec(1, 256)


@pytest.fixture(scope="session")
def grid2d():
    return GridSpec(2, 32)


@pytest.fixture
def random_field():
    def make(grid, seed=0, band=(2, 16), real=True):
        return sample_preset("random_bandlimited", {"seed": seed, "band": list(band), "real": real}, grid)

    return make


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS, summary_line
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(summary_line(number))
