"""Smooth radial cutoff and the dyadic band family built from it.

The cutoff ``psi`` equals 1 on ``B(1)`` and vanishes outside ``B(2)``; the
bands are ``phi_j = psi(2^-j .) - psi(2^(-j+1) .)``, supported in the
annulus ``2^(j-1) < |xi| < 2^(j+1)``.  Their telescoped sum over a finite
range is exactly 1 on the nonzero lattice once the range brackets every
lattice radius.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidParams
from .spectral import GridSpec

__all__ = [
    "CutoffProfile",
    "build_cutoff",
    "alternative_cutoff",
    "CUTOFFS",
    "BandRange",
    "DyadicPartition",
    "build_partition",
    "PartitionReport",
    "validate_partition",
    "partition_csv",
]


def _exp_transition(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t, dtype=float)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def _exp_sq_transition(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t, dtype=float)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos] ** 2)
    return out


@dataclass(frozen=True)
class CutoffProfile:
    """Radial profile ``psi(r) = h(2 - r) / (h(2 - r) + h(r - 1))``.

    ``h`` is any smooth function vanishing on ``t <= 0`` and positive on
    ``t > 0``; the resulting ``psi`` is 1 for ``r <= 1`` and 0 for ``r >= 2``.
    """

    name: str
    transition: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    inner_radius: float = 1.0
    outer_radius: float = 2.0

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        a = self.transition(2.0 - r)
        b = self.transition(r - 1.0)
        denom = a + b
        # denom > 0 everywhere: at least one of 2-r, r-1 is positive
        return a / denom


def build_cutoff() -> CutoffProfile:
    return CutoffProfile("exp", _exp_transition)


def alternative_cutoff() -> CutoffProfile:
    """Second admissible profile, transition ``exp(-1/t^2)``."""
    return CutoffProfile("exp_sq", _exp_sq_transition)


CUTOFFS = {"exp": build_cutoff, "exp_sq": alternative_cutoff}


@dataclass(frozen=True)
class BandRange:
    j_min: int
    j_max: int

    def __post_init__(self):
        if self.j_min > self.j_max:
            raise InvalidParams(f"empty band range [{self.j_min}, {self.j_max}]")

    def __iter__(self):
        return iter(range(self.j_min, self.j_max + 1))

    def __contains__(self, j) -> bool:
        return self.j_min <= j <= self.j_max

    def __len__(self) -> int:
        return self.j_max - self.j_min + 1

    @classmethod
    def for_grid(cls, grid: GridSpec) -> "BandRange":
        """One spare band on each side of the lattice's dyadic span."""
        r = grid.radius[~grid.zero_mask]
        return cls(math.floor(math.log2(r.min())) - 1, math.ceil(math.log2(r.max())) + 1)


@dataclass(frozen=True, eq=False)
class DyadicPartition:
    """Tabulated band multipliers ``phi_j`` on the lattice of ``grid``.

    ``bands`` maps ``j`` to a read-only array in FFT ordering.  Bands are
    normally produced by :func:`build_partition`, but any table can be
    wrapped (e.g. a deliberately broken one) and checked with
    :func:`validate_partition`.
    """

    grid: GridSpec
    cutoff: CutoffProfile
    band_range: BandRange
    bands: dict = field(repr=False)

    @property
    def j_min(self) -> int:
        return self.band_range.j_min

    @property
    def j_max(self) -> int:
        return self.band_range.j_max

    def band(self, j: int) -> np.ndarray:
        if j in self.band_range:
            return self.bands[j]
        # outside the tabulated range the formula still applies (used by
        # neighbour sums phi_{j-1} + phi_j + phi_{j+1} at the range edges)
        return band_symbol(self.cutoff, self.grid, j)

    def neighbourhood(self, j: int) -> np.ndarray:
        """``phi_{j-1} + phi_j + phi_{j+1}``, which equals 1 on the support of ``phi_j``."""
        return self.band(j - 1) + self.band(j) + self.band(j + 1)

    def low_symbol(self, j_split: int) -> np.ndarray:
        """``psi(2^-j_split xi)``: the multiplier of the low-frequency block."""
        return self.cutoff(self.grid.radius * 2.0 ** (-j_split))

    def with_band(self, j: int, values) -> "DyadicPartition":
        """Copy with band ``j`` replaced (test fixtures for failure paths)."""
        bands = dict(self.bands)
        arr = np.array(np.broadcast_to(values, self.grid.shape), dtype=float)
        arr.setflags(write=False)
        bands[j] = arr
        return DyadicPartition(self.grid, self.cutoff, self.band_range, bands)


def band_symbol(cutoff: CutoffProfile, grid: GridSpec, j: int) -> np.ndarray:
    r = grid.radius
    return cutoff(r * 2.0 ** (-j)) - cutoff(r * 2.0 ** (1 - j))


def build_partition(grid: GridSpec, cutoff: CutoffProfile | None = None) -> DyadicPartition:
    cutoff = build_cutoff() if cutoff is None else cutoff
    band_range = BandRange.for_grid(grid)
    bands = {}
    for j in band_range:
        arr = band_symbol(cutoff, grid, j)
        arr.setflags(write=False)
        bands[j] = arr
    live = sum(1 for b in bands.values() if np.any(b != 0))
    if live < 3:
        raise InvalidParams(f"grid hosts only {live} nonzero bands; need at least 3")
    return DyadicPartition(grid, cutoff, band_range, bands)


@dataclass(frozen=True)
class PartitionReport:
    support_violation: float
    range_violation: float
    overlap_violation: int
    telescoping_violation: float
    dilation_violation: float
    worst_frequency: tuple | None
    tolerance: float = 1e-12

    @property
    def passed(self) -> bool:
        return (
            self.support_violation <= self.tolerance
            and self.range_violation <= self.tolerance
            and self.overlap_violation == 0
            and self.telescoping_violation <= self.tolerance
            and self.dilation_violation <= self.tolerance
        )

    def to_dict(self) -> dict:
        return {
            "support_violation": self.support_violation,
            "range_violation": self.range_violation,
            "overlap_violation": self.overlap_violation,
            "telescoping_violation": self.telescoping_violation,
            "dilation_violation": self.dilation_violation,
            "worst_frequency": list(self.worst_frequency) if self.worst_frequency else None,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


def validate_partition(p: DyadicPartition, tolerance: float = 1e-12) -> PartitionReport:
    """Measure how far a partition is from the support, range and telescoping constraints."""
    g = p.grid
    r = g.radius
    nonzero = ~g.zero_mask
    support = 0.0
    range_v = 0.0
    alive = np.zeros(g.shape, dtype=int)
    total = np.zeros(g.shape)
    for j in p.band_range:
        b = np.asarray(p.bands[j], dtype=float)
        outside = (r <= 2.0 ** (j - 1)) | (r >= 2.0 ** (j + 1))
        if outside.any():
            support = max(support, float(np.abs(b[outside]).max()))
        range_v = max(range_v, float(np.maximum(-b, b - 1.0).max()))
        alive += b != 0
        total += b
    err = np.where(nonzero, np.abs(total - 1.0), 0.0)
    worst = None
    if err.max() > tolerance:
        idx = np.unravel_index(int(np.argmax(err)), g.shape)
        worst = tuple(int(k[idx]) for k in g.lattice_indices)
    # phi_{j+1}(2 xi) = phi_j(xi), evaluated from the profile on doubled radii
    dilation = 0.0
    for j in p.band_range:
        lhs = p.cutoff(2 * r * 2.0 ** (-(j + 1))) - p.cutoff(2 * r * 2.0 ** (-j))
        dilation = max(dilation, float(np.abs(lhs - band_symbol(p.cutoff, g, j)).max()))
    return PartitionReport(
        support_violation=support,
        range_violation=max(range_v, 0.0),
        overlap_violation=int(max(int(alive.max()) - 2, 0)),
        telescoping_violation=float(err.max()),
        dilation_violation=dilation,
        worst_frequency=worst,
        tolerance=tolerance,
    )


def partition_csv(p: DyadicPartition, include_zeros: bool = False) -> str:
    """Per-band dump: rows of ``(j, lattice index..., phi_j value)``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    axes = [f"k{i + 1}" for i in range(p.grid.dim)]
    w.writerow(["j", *axes, "phi"])
    flat_k = [k.ravel() for k in p.grid.lattice_indices]
    order = np.lexsort(tuple(reversed(flat_k)))
    for j in p.band_range:
        vals = np.asarray(p.bands[j]).ravel()
        for i in order:
            if include_zeros or vals[i] != 0:
                w.writerow([j, *(int(k[i]) for k in flat_k), format(float(vals[i]), ".17g")])
    return buf.getvalue()
