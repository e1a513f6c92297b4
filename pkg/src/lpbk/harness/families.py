"""Reproducible test-function families."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from ..errors import InvalidParams
from ..spectral import GridSpec, SampledField, sample_preset

__all__ = ["FunctionFamily", "GENERATORS", "default_family"]


def _random(grid: GridSpec, seed: int, count: int, band=None, real=True):
    band = band or _default_band(grid)
    return [
        sample_preset("random_bandlimited", {"seed": [seed, i], "band": band, "real": real}, grid)
        for i in range(count)
    ]


def _default_band(grid: GridSpec) -> list:
    return [2, grid.n // 8]


def _weierstrass(grid: GridSpec, seed: int, count: int, s_values=(0.3, 0.5, 0.7), j_max=None):
    j_max = int(math.log2(grid.n // 2)) if j_max is None else j_max
    return [sample_preset("weierstrass", {"s": s, "j_max": j_max}, grid) for s in s_values]


def _harmonics(grid: GridSpec, seed: int, count: int, ks=None):
    ks = [2**i for i in range(int(math.log2(grid.n // 2)))] if ks is None else ks
    return [sample_preset("cosine", {"k": k}, grid) for k in ks]


def _default(grid: GridSpec, seed: int, count: int, **params):
    return _random(grid, seed, count) + _weierstrass(grid, seed, 1) + _harmonics(grid, seed, 1)


def _nonneg_spectrum(grid: GridSpec, seed: int, count: int, band=None):
    """Fields whose Fourier coefficients are real, nonnegative and zero at the origin."""
    lo, hi = band or _default_band(grid)
    kr = np.sqrt(sum(k.astype(float) ** 2 for k in grid.lattice_indices))
    mask = (kr >= max(lo, 1)) & (kr <= hi)
    out = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        coeffs = rng.random(grid.shape) * mask
        out.append(SampledField(grid, np.fft.ifftn(coeffs) * grid.n**grid.dim))
    return out


def _random_families(grid: GridSpec, seed: int, count: int, size=3, band=None):
    """``count`` families of ``size`` fields each, bands varying across members."""
    out = []
    for i in range(count):
        rng = np.random.default_rng([seed, i, 7])
        fam = []
        for k in range(size):
            hi = int(rng.integers(2, grid.n // 4))
            lo = int(rng.integers(0, hi))
            b = band or [lo, hi]
            fam.append(
                sample_preset("random_bandlimited", {"seed": [seed, i, k], "band": b}, grid)
            )
        out.append(fam)
    return out


GENERATORS = {
    "random_bandlimited": _random,
    "weierstrass": _weierstrass,
    "harmonics": _harmonics,
    "default": _default,
    "nonneg_spectrum": _nonneg_spectrum,
    "random_families": _random_families,
}


@dataclass(frozen=True)
class FunctionFamily:
    """Generator id plus everything needed to reproduce its members."""

    generator: str = "default"
    seed: int = 0
    count: int = 20
    grid: GridSpec = field(default_factory=GridSpec)
    params: Mapping[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise InvalidParams(f"unknown family generator {self.generator!r}")
        if int(self.count) != self.count or self.count < 1:
            raise InvalidParams("family count must be a positive integer")

    def members(self) -> list:
        return GENERATORS[self.generator](self.grid, self.seed, self.count, **dict(self.params))

    def with_seed(self, seed: int) -> "FunctionFamily":
        return FunctionFamily(self.generator, seed, self.count, self.grid, dict(self.params))

    def to_dict(self) -> dict:
        return {
            "generator": self.generator,
            "seed": self.seed,
            "count": self.count,
            "grid": self.grid.to_dict(),
            "params": dict(self.params),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "FunctionFamily":
        grid = GridSpec(**d.get("grid", {}))
        return cls(d.get("generator", "default"), int(d.get("seed", 0)), int(d.get("count", 20)),
                   grid, dict(d.get("params", {})))


def default_family(grid: GridSpec | None = None, seed: int = 0) -> FunctionFamily:
    return FunctionFamily("default", seed, 20, grid or GridSpec())
