"""Band projections, the four norm scales and Hölder-Zygmund seminorms.

Homogeneous kinds work modulo constants (the only polynomials on the
torus): the zero frequency never enters a band, so adding a constant to a
field leaves every homogeneous norm unchanged.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidParams
from .partition import DyadicPartition
from .spectral import GridSpec, SampledField, _lp, as_extended, translate

__all__ = [
    "KINDS",
    "SpaceParams",
    "BandDecomposition",
    "NormReport",
    "band_project",
    "decompose",
    "space_norm",
    "lq_aggregate",
    "difference",
    "difference_recursive",
    "lattice_shift",
    "alternating_sum_identity",
    "default_shift_set",
    "hz_seminorm",
    "high_low_split",
]

KINDS = ("besov_homog", "besov_nonhomog", "tl_homog", "tl_nonhomog")


def _fmt_ext(x: float):
    return "inf" if math.isinf(x) else x


@dataclass(frozen=True)
class SpaceParams:
    s: float
    p: float
    q: float
    kind: str = "besov_homog"

    def __post_init__(self):
        p, q = as_extended(self.p), as_extended(self.q)
        if not p > 0 or not q > 0:
            raise InvalidParams(f"p and q must be positive or inf, got p={self.p}, q={self.q}")
        if self.kind not in KINDS:
            raise InvalidParams(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.kind.startswith("tl") and math.isinf(p):
            raise InvalidParams("Triebel-Lizorkin kinds require p < inf")
        if not math.isfinite(float(self.s)):
            raise InvalidParams("s must be finite")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "s", float(self.s))

    @property
    def homogeneous(self) -> bool:
        return self.kind.endswith("_homog")

    @property
    def triebel(self) -> bool:
        return self.kind.startswith("tl")

    def to_dict(self) -> dict:
        return {"s": self.s, "p": _fmt_ext(self.p), "q": _fmt_ext(self.q), "kind": self.kind}


@dataclass(frozen=True, eq=False)
class BandDecomposition:
    grid: GridSpec
    partition: DyadicPartition
    entries: dict = field(repr=False)  # j -> SampledField, ascending j
    low_block: SampledField | None = field(default=None, repr=False)
    dc: SampledField | None = field(default=None, repr=False)
    j_split: int | None = None

    def reconstruct(self) -> SampledField:
        total = np.zeros(self.grid.shape, dtype=complex)
        for band in self.entries.values():
            total += band.values
        base = self.low_block if self.low_block is not None else self.dc
        if base is not None:
            total += base.values
        return SampledField(self.grid, total)

    def energies(self, p=2) -> list:
        return [(j, _lp(b.values, as_extended(p), self.grid.cell_volume)) for j, b in self.entries.items()]


@dataclass(frozen=True, eq=False)
class NormReport:
    params: SpaceParams
    per_band: list
    aggregate: float
    low_block_term: float | None = None
    inner: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        out = {
            "params": self.params.to_dict(),
            "per_band": [[j, t] for j, t in self.per_band],
            "aggregate": self.aggregate,
        }
        if self.low_block_term is not None:
            out["low_block_term"] = self.low_block_term
        return out


def lq_aggregate(terms: Iterable[float], q: float) -> float:
    """``(sum t^q)^(1/q)``, or the max when ``q`` is infinite; fixed summation order."""
    terms = [abs(float(t)) for t in terms]
    if not terms:
        return 0.0
    if math.isinf(q):
        return max(terms)
    return math.fsum(t**q for t in terms) ** (1.0 / q)


def _check_partition(f: SampledField, partition: DyadicPartition):
    if partition.grid != f.grid:
        raise InvalidParams("partition was built for a different grid")


def band_project(f: SampledField, partition: DyadicPartition, j: int) -> SampledField:
    """``F^{-1}[phi_j F f]``."""
    _check_partition(f, partition)
    if j not in partition.band_range:
        raise InvalidParams(f"band {j} outside [{partition.j_min}, {partition.j_max}]")
    return SampledField(f.grid, np.fft.ifftn(partition.bands[j] * np.fft.fftn(f.values)))


def _dc_field(f: SampledField) -> SampledField:
    return SampledField(f.grid, np.full(f.grid.shape, f.values.mean()))


def decompose(
    f: SampledField, partition: DyadicPartition, kind: str = "besov_homog", j_split: int = 0
) -> BandDecomposition:
    """All band projections; nonhomogeneous kinds also carry the low block ``psi(2^-j_split D) f``."""
    _check_partition(f, partition)
    if kind not in KINDS:
        raise InvalidParams(f"unknown kind {kind!r}")
    spec = np.fft.fftn(f.values)
    homog = kind.endswith("_homog")
    if int(j_split) != j_split:
        raise InvalidParams(f"j_split must be an integer, got {j_split}")
    # any integer split is exact: the low block and the bands above it
    # telescope to psi(2^-j_max xi), which is 1 on the whole lattice
    entries = {}
    for j in partition.band_range:
        if homog or j > j_split:
            entries[j] = SampledField(f.grid, np.fft.ifftn(partition.bands[j] * spec))
    if homog:
        return BandDecomposition(f.grid, partition, entries, dc=_dc_field(f))
    low = SampledField(f.grid, np.fft.ifftn(partition.low_symbol(j_split) * spec))
    return BandDecomposition(f.grid, partition, entries, low_block=low, j_split=j_split)


def space_norm(
    f: SampledField, params: SpaceParams, partition: DyadicPartition, j_split: int = 0
) -> NormReport:
    """Besov or Triebel-Lizorkin quasi-norm of ``f`` with the given partition."""
    dec = decompose(f, partition, params.kind, j_split)
    h_n = f.grid.cell_volume
    s, p, q = params.s, params.p, params.q
    per_band = [(j, 2.0 ** (j * s) * _lp(b.values, p, h_n)) for j, b in dec.entries.items()]
    low_term = None if dec.low_block is None else _lp(dec.low_block.values, p, h_n)
    inner = None
    if params.triebel:
        weighted = [2.0 ** (j * s) * np.abs(b.values) for j, b in dec.entries.items()]
        if not weighted:
            inner = np.zeros(f.grid.shape)
        elif math.isinf(q):
            inner = np.maximum.reduce(weighted)
        else:
            acc = np.zeros(f.grid.shape)
            for w in weighted:
                acc += w**q
            inner = acc ** (1.0 / q)
        aggregate = _lp(inner, p, h_n)
    else:
        aggregate = lq_aggregate((t for _, t in per_band), q)
    if low_term is not None:
        aggregate += low_term
    return NormReport(params, per_band, float(aggregate), low_term, inner)


# --- differences ------------------------------------------------------------


def lattice_shift(grid: GridSpec, y: Sequence[float], atol: float = 1e-9) -> tuple:
    """Convert a physical shift to integer cell offsets; reject off-lattice shifts."""
    y = (y,) if np.isscalar(y) else tuple(y)
    if len(y) != grid.dim:
        raise InvalidParams(f"shift needs {grid.dim} components")
    cells = []
    for c in y:
        k = c / grid.spacing
        if abs(k - round(k)) > atol:
            raise InvalidParams(f"shift {c} is not a multiple of the grid spacing {grid.spacing}")
        cells.append(int(round(k)))
    return tuple(cells)


def _as_offset(grid: GridSpec, y) -> tuple:
    y = (y,) if np.isscalar(y) else tuple(y)
    if len(y) != grid.dim:
        raise InvalidParams(f"shift needs {grid.dim} components")
    if any(float(c) != int(c) for c in y):
        raise InvalidParams(f"shift {y} is not a lattice offset (integer cells)")
    return tuple(int(c) for c in y)


def difference(f: SampledField, y, m: int = 1) -> SampledField:
    """``Δ^m_y f = Σ_l (-1)^(m-l) C(m, l) f(. + l y)`` for an integer cell offset ``y``."""
    if int(m) != m or m < 1:
        raise InvalidParams(f"difference order must be a positive integer, got {m}")
    y = _as_offset(f.grid, y)
    axes = tuple(range(f.grid.dim))
    out = np.zeros(f.grid.shape, dtype=complex)
    for l in range(m + 1):
        shifted = np.roll(f.values, tuple(-l * c for c in y), axis=axes)
        out += (-1) ** (m - l) * math.comb(m, l) * shifted
    return SampledField(f.grid, out)


def difference_recursive(f: SampledField, y, m: int = 1) -> SampledField:
    """``Δ^1_y f = f(. + y) - f`` and ``Δ^(m+1)_y f = Δ^m_y(Δ^1_y f)``."""
    if int(m) != m or m < 1:
        raise InvalidParams(f"difference order must be a positive integer, got {m}")
    y = _as_offset(f.grid, y)
    g = f
    for _ in range(m):
        g = translate(g, y) - g
    return g


def alternating_sum_identity(m: int, limit: int | None = None) -> tuple:
    """Exact ``(Σ_{l=1}^m (-1)^l l^m C(m,l), (-1)^m m!)``.

    Python integers are exact; pass ``limit`` to emulate a fixed-width
    integer range, in which case any intermediate magnitude above it
    raises ``OverflowError``.
    """
    if int(m) != m or m < 1:
        raise InvalidParams(f"m must be a positive integer, got {m}")
    m = int(m)
    lhs = 0
    for l in range(1, m + 1):
        term = (-1) ** l * l**m * math.comb(m, l)
        lhs += term
        if limit is not None and (abs(term) > limit or abs(lhs) > limit):
            raise OverflowError(f"alternating sum for m={m} leaves the range ±{limit}")
    rhs = (-1) ** m * math.factorial(m)
    if limit is not None and abs(rhs) > limit:
        raise OverflowError(f"(-1)^m m! for m={m} leaves the range ±{limit}")
    return lhs, rhs


def default_shift_set(grid: GridSpec, max_length: float | None = None) -> list:
    """All nonzero lattice offsets with ``|y| <= max_length`` (default ``L/4``)."""
    max_length = grid.period / 4 if max_length is None else max_length
    rmax = int(max_length / grid.spacing + 1e-9)
    shifts = []
    for off in product(range(-rmax, rmax + 1), repeat=grid.dim):
        if any(off) and grid.spacing * math.sqrt(sum(c * c for c in off)) <= max_length + 1e-12:
            shifts.append(off)
    return shifts


def hz_seminorm(f: SampledField, s: float, shift_set: Sequence | None = None) -> float:
    """``max_y ||Δ^m_y f||_inf / |y|^s`` over ``shift_set`` with ``m = floor(s) + 1``."""
    if not s > 0:
        raise InvalidParams("s must be positive")
    shifts = default_shift_set(f.grid) if shift_set is None else list(shift_set)
    if not shifts:
        raise InvalidParams("shift set is empty")
    m = math.floor(s) + 1
    best = 0.0
    for y in shifts:
        y = _as_offset(f.grid, y)
        if not any(y):
            raise InvalidParams("shift set contains the zero shift")
        length = f.grid.spacing * math.sqrt(sum(c * c for c in y))
        val = float(np.abs(difference(f, y, m).values).max()) / length**s
        best = max(best, val)
    return best


def high_low_split(f: SampledField, partition: DyadicPartition, j_split: int = 0) -> tuple:
    """``(low, high)`` with ``high = Σ_{j > j_split} Δ_j f`` and ``low = f - high - mean``."""
    _check_partition(f, partition)
    if int(j_split) != j_split:
        raise InvalidParams(f"j_split must be an integer, got {j_split}")
    spec = np.fft.fftn(f.values)
    sym = np.zeros(f.grid.shape)
    for j in partition.band_range:
        if j > j_split:
            sym = sym + partition.bands[j]
    high = SampledField(f.grid, np.fft.ifftn(sym * spec))
    low = SampledField(f.grid, f.values - high.values - f.values.mean())
    return low, high
