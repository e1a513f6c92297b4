import csv
import io
import math

import numpy as np
import pytest

from lpbk import GridSpec, InvalidParams, alternative_cutoff, build_cutoff, build_partition, validate_partition
from lpbk.partition import BandRange, partition_csv


def psi_reference(r: float) -> float:
    """Scalar cutoff from the textbook formula with exp(-1/t)."""
    h = lambda t: math.exp(-1.0 / t) if t > 0 else 0.0
    return h(2 - r) / (h(2 - r) + h(r - 1))


@pytest.fixture(scope="module")
def part():
    return build_partition(GridSpec(1, 256))


def test_cutoff_values():
    psi = build_cutoff()
    assert psi(0.9) == 1.0
    assert psi(0.0) == 1.0
    assert psi(2.1) == 0.0
    assert psi(1.5) == 0.5
    for r in np.linspace(0, 3, 61):
        assert psi(r) == pytest.approx(psi_reference(r), abs=1e-15)
    vals = psi(np.linspace(0, 3, 301))
    assert np.all(np.diff(vals) <= 0)


def test_default_band_range(part):
    assert (part.j_min, part.j_max) == (-1, 8)
    assert BandRange.for_grid(GridSpec(1, 1024)) == BandRange(-1, 10)


def test_partition_of_unity_on_lattice(part):
    total = sum(part.bands[j] for j in part.band_range)
    nonzero = ~part.grid.zero_mask
    assert np.abs(total[nonzero] - 1).max() <= 1e-14
    assert total[part.grid.zero_mask][0] == 0


@pytest.mark.parametrize("j0", range(0, 8))
def test_dyadic_harmonic_sits_in_one_band(part, j0):
    k = 2**j0
    values = {j: part.bands[j][k] for j in part.band_range}
    assert values[j0] == 1.0
    assert all(v == 0.0 for j, v in values.items() if j != j0)


def test_support_and_dilation_on_lattice(part):
    r = part.grid.radius
    for j in part.band_range:
        b = part.bands[j]
        assert np.all(b[(r <= 2.0 ** (j - 1)) | (r >= 2.0 ** (j + 1))] == 0)
        assert np.all((b >= 0) & (b <= 1))
    n = part.grid.n
    for j in range(part.j_min, part.j_max):
        k = np.arange(0, n // 4)
        assert np.array_equal(part.bands[j + 1][2 * k], part.bands[j][k])


def test_validate_default_and_alternative():
    for g in (GridSpec(1, 256), GridSpec(2, 64)):
        assert validate_partition(build_partition(g)).passed
        assert validate_partition(build_partition(g, alternative_cutoff())).passed


def test_zeroed_band_is_reported(part):
    broken = part.with_band(3, 0.0)
    rep = validate_partition(broken)
    assert not rep.passed
    assert rep.telescoping_violation == pytest.approx(1.0)
    assert 4 < abs(rep.worst_frequency[0]) < 16


def test_overlap_violation_detected(part):
    bad = part.with_band(3, part.bands[3] + part.bands[5])
    rep = validate_partition(bad)
    assert rep.overlap_violation >= 1 or rep.support_violation > 0


def test_empty_band_range_rejected():
    with pytest.raises(InvalidParams):
        BandRange(3, 1)


def test_csv_dump(part):
    rows = list(csv.reader(io.StringIO(partition_csv(part))))
    assert rows[0] == ["j", "k1", "phi"]
    by_band = {}
    for j, k, v in rows[1:]:
        by_band.setdefault(int(j), {})[int(k)] = float(v)
    assert by_band[2][4] == 1.0
    assert set(by_band) <= set(part.band_range)


def test_2d_partition_unity():
    p = build_partition(GridSpec(2, 128))
    total = sum(p.bands[j] for j in p.band_range)
    assert np.abs(total[~p.grid.zero_mask] - 1).max() <= 1e-12
