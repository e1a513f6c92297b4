import math

import numpy as np
import pytest

from lpbk import (
    GridSpec,
    InvalidParams,
    SampledField,
    SpaceParams,
    alternating_sum_identity,
    band_project,
    build_partition,
    decompose,
    difference,
    high_low_split,
    hz_seminorm,
    lp_norm,
    sample_preset,
    space_norm,
)
from lpbk.spaces import KINDS, default_shift_set, difference_recursive, lq_aggregate

INF = math.inf


@pytest.fixture(scope="module")
def part():
    return build_partition(GridSpec(1, 256))


@pytest.fixture(scope="module")
def part2d():
    return build_partition(GridSpec(2, 64))


def test_space_params_validation():
    sp = SpaceParams(0.5, "inf", "inf")
    assert sp.p == INF and sp.q == INF
    assert sp.to_dict() == {"s": 0.5, "p": "inf", "q": "inf", "kind": "besov_homog"}
    for bad in [dict(s=0, p=0, q=1), dict(s=0, p=1, q=-1), dict(s=0, p=2, q=2, kind="sobolev"),
                dict(s=0, p=INF, q=2, kind="tl_homog"), dict(s=INF, p=2, q=2)]:
        with pytest.raises(InvalidParams):
            SpaceParams(**bad)


def test_lq_aggregate():
    assert lq_aggregate([3, 4], 2) == pytest.approx(5)
    assert lq_aggregate([3, -4, 1], INF) == 4
    assert lq_aggregate([], 1) == 0.0
    assert lq_aggregate([1, 1, 1, 1], 0.5) == pytest.approx(16)


@pytest.mark.parametrize("j0", [0, 2, 5])
@pytest.mark.parametrize("s,p,q", [(0.5, 2, 2), (1.0, 1, INF), (-0.7, 4, 1), (0.3, INF, 3)])
def test_single_harmonic_closed_form(part, j0, s, p, q):
    f = sample_preset("harmonic", {"k": 2**j0}, part.grid)
    expected = 2 ** (j0 * s) * part.grid.period ** (0 if p == INF else 1 / p)
    kinds = ["besov_homog", "besov_nonhomog"] + ([] if p == INF else ["tl_homog", "tl_nonhomog"])
    for kind in kinds:
        if kind.endswith("nonhomog") and j0 == 0:
            continue  # frequency 1 lies in the low block
        rep = space_norm(f, SpaceParams(s, p, q, kind), part)
        assert rep.aggregate == pytest.approx(expected, rel=1e-10), kind


def test_constant_and_quotient(part, random_field):
    c = SampledField(part.grid, np.full(part.grid.shape, 2.5))
    f = random_field(part.grid, seed=3)
    for kind in ("besov_homog", "tl_homog"):
        sp = SpaceParams(0.5, 2, 2, kind)
        assert space_norm(c, sp, part).aggregate == 0
        assert space_norm(f + 7.0, sp, part).aggregate == pytest.approx(space_norm(f, sp, part).aggregate, rel=1e-12)
    # nonhomogeneous norms see the constant through the low block
    low = space_norm(c, SpaceParams(0.5, 2, 2, "besov_nonhomog"), part)
    assert low.low_block_term == pytest.approx(2.5 * math.sqrt(2 * math.pi), rel=1e-12)


def test_weierstrass_besov_infinity_norm(part):
    for s in (0.3, 0.5, 0.7):
        w = sample_preset("weierstrass", {"s": s, "j_max": 6}, part.grid)
        rep = space_norm(w, SpaceParams(s, INF, INF), part)
        assert rep.aggregate == pytest.approx(1.0, rel=0.05)
        for j, term in rep.per_band:
            assert term == pytest.approx(1.0 if 0 <= j <= 6 else 0.0, abs=1e-12)


def test_weierstrass_bands_are_single_cosines(part):
    w = sample_preset("weierstrass", {"s": 0.5, "j_max": 6}, part.grid)
    x = part.grid.coordinates[0]
    dec = decompose(w, part)
    for j, band in dec.entries.items():
        ref = 2 ** (-j / 2) * np.cos(2**j * x) if 0 <= j <= 6 else 0 * x
        assert np.abs(band.values - ref).max() < 1e-13


@pytest.mark.parametrize("kind", KINDS)
def test_decomposition_reconstructs(part, part2d, random_field, kind):
    for p, seed in ((part, 1), (part2d, 2)):
        f = random_field(p.grid, seed=seed, band=(0, p.grid.n // 2))
        dec = decompose(f, p, kind)
        assert np.abs(dec.reconstruct().values - f.values).max() <= 1e-12 * np.abs(f.values).max()


def test_band_spectra_disjoint_beyond_neighbours(part, random_field):
    f = random_field(part.grid, seed=5, band=(0, 128))
    scale = np.abs(np.fft.fft(f.values)).max()
    r = part.grid.radius
    for j, band in decompose(f, part).entries.items():
        outside = (r <= 2.0 ** (j - 1)) | (r >= 2.0 ** (j + 1))
        # annuli of bands two or more apart do not meet, so these supports are disjoint
        assert np.abs(np.fft.fft(band.values)[outside]).max(initial=0) <= 1e-13 * scale


def test_band_project_examples(part):
    h = sample_preset("harmonic", {"k": 8}, part.grid)
    assert np.abs(band_project(h, part, 3).values - h.values).max() < 1e-14
    assert np.abs(band_project(h, part, 5).values).max() < 1e-14
    c = SampledField(part.grid, np.ones(part.grid.shape))
    assert np.abs(band_project(c, part, 0).values).max() < 1e-15
    with pytest.raises(InvalidParams):
        band_project(h, part, 40)


def test_lq_monotone_and_besov_tl_agree_at_p_equals_q(part, random_field):
    f = random_field(part.grid, seed=8, band=(1, 100))
    norms = [space_norm(f, SpaceParams(0.5, 2, q), part).aggregate for q in (0.5, 1, 2, 4, INF)]
    assert all(a + 1e-12 >= b for a, b in zip(norms, norms[1:]))
    for p in (1, 2, 3):
        b = space_norm(f, SpaceParams(0.4, p, p, "besov_homog"), part).aggregate
        t = space_norm(f, SpaceParams(0.4, p, p, "tl_homog"), part).aggregate
        assert t == pytest.approx(b, rel=1e-12)


def _dilate(f: SampledField) -> SampledField:
    """Field whose coefficient at 2k is the coefficient of ``f`` at k."""
    n = f.grid.n
    spec = np.fft.fft(f.values)
    out = np.zeros(n, dtype=complex)
    k = np.fft.fftfreq(n, 1 / n).astype(int)
    keep = np.abs(k) < n // 4
    out[(2 * k[keep]) % n] = spec[keep]
    return SampledField(f.grid, np.fft.ifft(out))


@pytest.mark.parametrize("p", [2, 4])
def test_dyadic_dilation_covariance(part, random_field, p):
    # for even p and this band limit the Riemann sums of |band|^p are exact on
    # the grid and on its even points, so the covariance holds to rounding
    f = random_field(part.grid, seed=12, band=(1, 30))
    g = _dilate(f)
    s = 0.6
    terms_f = dict(space_norm(f, SpaceParams(s, p, 2), part).per_band)
    terms_g = dict(space_norm(g, SpaceParams(s, p, 2), part).per_band)
    for j in range(part.j_min, part.j_max):
        assert terms_g[j + 1] == pytest.approx(2**s * terms_f[j], rel=1e-10, abs=1e-13)
    nf = space_norm(f, SpaceParams(s, p, 2), part).aggregate
    ng = space_norm(g, SpaceParams(s, p, 2), part).aggregate
    assert ng == pytest.approx(2**s * nf, rel=1e-10)


def test_l2_corridor(part, random_field):
    for seed in range(5):
        f = random_field(part.grid, seed=seed, band=(1, 128))
        r = space_norm(f, SpaceParams(0, 2, 2), part).aggregate / lp_norm(f, 2)
        assert 2**-0.5 - 1e-6 <= r <= 1 + 1e-6


# --- differences -------------------------------------------------------------


def test_difference_kills_constants():
    g = GridSpec(2, 16)
    c = SampledField(g, np.full(g.shape, 4.0))
    for y, m in (((1, 0), 1), ((2, -3), 2), ((0, 5), 4)):
        assert np.abs(difference(c, y, m).values).max() == 0


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_binomial_matches_recursion(random_field, m):
    for g, y in ((GridSpec(1, 64), (3,)), (GridSpec(2, 32), (1, -2))):
        f = random_field(g, seed=m)
        assert np.abs(difference(f, y, m).values - difference_recursive(f, y, m).values).max() < 1e-12


def test_first_difference_of_cosine():
    g = GridSpec(1, 128)
    x = [i * g.spacing for i in range(g.n)]
    for k in (1, 3, 10):
        f = sample_preset("cosine", {"k": k}, g)
        for cells in (1, 5, 17):
            y = cells * g.spacing
            # sum-to-product: cos(k(x+y)) - cos(kx) = -2 sin(k y / 2) sin(k(x + y / 2))
            grid_sup = max(abs(math.sin(k * (xi + y / 2))) for xi in x)
            expected = 2 * abs(math.sin(k * y / 2)) * grid_sup
            assert lp_norm(difference(f, (cells,), 1), INF) == pytest.approx(expected, rel=1e-12)


def test_difference_rejects_bad_input():
    f = sample_preset("cosine", {"k": 1}, GridSpec(1, 16))
    with pytest.raises(InvalidParams):
        difference(f, (0.5,), 1)
    with pytest.raises(InvalidParams):
        difference(f, (1,), 0)
    with pytest.raises(InvalidParams):
        difference(f, (1, 1), 1)


def test_alternating_sum_identity():
    assert alternating_sum_identity(1) == (-1, -1)
    assert alternating_sum_identity(3) == (-6, -6)
    assert alternating_sum_identity(10) == (3628800, 3628800)
    for m in range(1, 26):
        lhs, rhs = alternating_sum_identity(m)
        assert lhs == rhs and isinstance(lhs, int)
    with pytest.raises(OverflowError):
        alternating_sum_identity(15, limit=2**31 - 1)
    with pytest.raises(InvalidParams):
        alternating_sum_identity(0)


def test_hz_seminorm_of_constant_and_cosine():
    g = GridSpec(1, 256)
    assert hz_seminorm(SampledField(g, np.ones(g.shape)), 0.5) == 0
    x = [i * g.spacing for i in range(g.n)]
    for k in (1, 4):
        best = 0.0
        for cells in range(1, g.n // 4 + 1):
            y = cells * g.spacing
            sup = 2 * abs(math.sin(k * y / 2)) * max(abs(math.sin(k * (xi + y / 2))) for xi in x)
            best = max(best, sup / math.sqrt(y))
        f = sample_preset("cosine", {"k": k}, g)
        assert hz_seminorm(f, 0.5) == pytest.approx(best, rel=1e-12)


def test_default_shift_set():
    g = GridSpec(1, 64)
    shifts = default_shift_set(g)
    assert len(shifts) == 2 * 16 and (0,) not in shifts
    assert len(default_shift_set(GridSpec(2, 16))) > 0


def test_high_low_split(part, random_field):
    high_only = random_field(part.grid, seed=1, band=(9, 40))
    low, high = high_low_split(high_only, part, 2)
    assert np.abs(low.values).max() < 1e-13
    h = sample_preset("harmonic", {"k": 2}, part.grid)
    low, high = high_low_split(h, part, 3)
    assert np.abs(high.values).max() < 1e-14
    f = random_field(part.grid, seed=2, band=(0, 100)) + 3.0
    low, high = high_low_split(f, part, 1)
    assert np.abs((low + high).values + f.mean() - f.values).max() < 1e-12
