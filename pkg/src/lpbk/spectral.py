"""Periodic grids, the symmetric Fourier convention and multiplier application.

The unbounded domain is modelled by a torus of period ``L`` sampled on
``N`` points per axis.  Transforms use the symmetric convention

    F f(xi) = (2 pi)^(-n/2) * sum_x f(x) exp(-i x.xi) * h^n

evaluated on the frequency lattice ``xi_k = 2 pi k / L`` with
``-N/2 <= k_i < N/2``.  Coefficient arrays are stored in numpy's FFT
ordering throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from .errors import GridMismatch, InvalidParams

__all__ = [
    "GridSpec",
    "SampledField",
    "SpectralField",
    "forward_transform",
    "inverse_transform",
    "lp_norm",
    "apply_multiplier",
    "multiplier_kernel",
    "kernel_l1_norm",
    "translate",
    "sample_preset",
    "PRESETS",
    "as_extended",
]

Multiplier = Union[np.ndarray, Callable[..., np.ndarray]]


def as_extended(p) -> float:
    """Coerce ``p`` to a float, accepting ``"inf"``/``"∞"`` for infinity."""
    if isinstance(p, str):
        token = p.strip().lower()
        if token in ("inf", "infinity", "∞", "+inf"):
            return math.inf
        return float(token)
    return float(p)


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid with ``n`` points per axis and period ``period``."""

    dim: int = 1
    n: int = 256
    period: float = 2 * math.pi

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise InvalidParams(f"dim must be 1 or 2, got {self.dim}")
        n = int(self.n)
        if n != self.n or n < 16 or n & (n - 1):
            raise InvalidParams(f"points per axis must be a power of two >= 16, got {self.n}")
        if not (self.period > 0 and math.isfinite(self.period)):
            raise InvalidParams(f"period must be positive and finite, got {self.period}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "period", float(self.period))

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.dim

    @property
    def spacing(self) -> float:
        return self.period / self.n

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.dim

    @property
    def base_frequency(self) -> float:
        return 2 * math.pi / self.period

    @property
    def forward_scale(self) -> float:
        return (2 * math.pi) ** (-self.dim / 2) * self.cell_volume

    @property
    def inverse_scale(self) -> float:
        return (2 * math.pi) ** (-self.dim / 2) * self.base_frequency ** self.dim

    @cached_property
    def lattice_indices(self) -> tuple:
        """Integer frequency indices per axis, broadcast to the full grid."""
        k = np.fft.fftfreq(self.n, d=1.0 / self.n).astype(np.int64)
        return tuple(np.meshgrid(*([k] * self.dim), indexing="ij"))

    @cached_property
    def wavenumbers(self) -> tuple:
        return tuple(self.base_frequency * k for k in self.lattice_indices)

    @cached_property
    def radius(self) -> np.ndarray:
        """``|xi|`` on the lattice."""
        return np.sqrt(sum(w**2 for w in self.wavenumbers))

    @cached_property
    def coordinates(self) -> tuple:
        x = self.spacing * np.arange(self.n)
        return tuple(np.meshgrid(*([x] * self.dim), indexing="ij"))

    @cached_property
    def zero_mask(self) -> np.ndarray:
        return self.radius == 0

    def to_dict(self) -> dict:
        return {"dim": self.dim, "n": self.n, "period": self.period}


def _frozen_array(values, dtype=np.complex128) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SampledField:
    """Complex samples of a function on ``grid`` (physical space)."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.size != self.grid.n**self.grid.dim:
            raise InvalidParams(
                f"expected {self.grid.n ** self.grid.dim} samples, got {values.size}"
            )
        values = _frozen_array(values.reshape(self.grid.shape))
        if not np.all(np.isfinite(values)):
            raise InvalidParams("field values must be finite")
        object.__setattr__(self, "values", values)

    def _other(self, other) -> np.ndarray:
        if isinstance(other, SampledField):
            if other.grid != self.grid:
                raise GridMismatch("fields live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return SampledField(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return SampledField(self.grid, self.values - self._other(other))

    def __mul__(self, other):
        return SampledField(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __neg__(self):
        return SampledField(self.grid, -self.values)

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    def mean(self) -> complex:
        return complex(self.values.mean())

    def without_mean(self) -> "SampledField":
        return SampledField(self.grid, self.values - self.values.mean())


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients on the frequency lattice, FFT ordering."""

    grid: GridSpec
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients)
        if coeffs.size != self.grid.n**self.grid.dim:
            raise InvalidParams(
                f"expected {self.grid.n ** self.grid.dim} coefficients, got {coeffs.size}"
            )
        object.__setattr__(self, "coefficients", _frozen_array(coeffs.reshape(self.grid.shape)))

    def at(self, k: Sequence[int]) -> complex:
        """Coefficient at integer lattice index ``k`` (negative indices allowed)."""
        k = (k,) if np.isscalar(k) else tuple(k)
        return complex(self.coefficients[tuple(int(i) % self.grid.n for i in k)])


def forward_transform(f: SampledField) -> SpectralField:
    return SpectralField(f.grid, f.grid.forward_scale * np.fft.fftn(f.values))


def inverse_transform(F: SpectralField) -> SampledField:
    g = F.grid
    scale = g.inverse_scale * g.n**g.dim
    return SampledField(g, scale * np.fft.ifftn(F.coefficients))


def _lp(values: np.ndarray, p: float, cell_volume: float) -> float:
    a = np.abs(values)
    if math.isinf(p):
        return float(a.max()) if a.size else 0.0
    if p == 2:
        return math.sqrt(cell_volume * float(np.sum(a * a)))
    return float((cell_volume * np.sum(a**p)) ** (1.0 / p))


def lp_norm(f: SampledField, p) -> float:
    """Riemann-sum ``L^p`` quasi-norm; ``p = inf`` gives the sup over grid points."""
    p = as_extended(p)
    if not (p > 0):
        raise InvalidParams(f"p must be positive or inf, got {p}")
    return _lp(f.values, p, f.grid.cell_volume)


def _symbol(grid: GridSpec, m: Multiplier) -> np.ndarray:
    if callable(m):
        m = m(*grid.wavenumbers)
    m = np.broadcast_to(np.asarray(m, dtype=np.complex128), grid.shape)
    if not np.all(np.isfinite(m)):
        raise InvalidParams("multiplier is not finite on the lattice")
    return m


def apply_multiplier(f: SampledField, m: Multiplier) -> SampledField:
    """Return ``F^{-1}[m * F f]``.

    ``m`` is either an array on the lattice (FFT ordering) or a callable
    taking the wavenumber component arrays ``xi_1, ..., xi_dim``.
    """
    sym = _symbol(f.grid, m)
    # forward and inverse scales cancel exactly, so skip them
    return SampledField(f.grid, np.fft.ifftn(sym * np.fft.fftn(f.values)))


def multiplier_kernel(grid: GridSpec, m: Multiplier) -> SampledField:
    """Convolution kernel ``k`` with ``apply_multiplier(f, m)(x) = ∫ k(y) f(x - y) dy``.

    In the symmetric convention this is ``(2 pi)^(-n/2) F^{-1} m``.
    """
    sym = _symbol(grid, m)
    return SampledField(grid, np.fft.ifftn(sym) / grid.cell_volume)


def kernel_l1_norm(grid: GridSpec, m: Multiplier, p=1) -> float:
    """``L^p`` norm of the convolution kernel of ``m`` (the Young/Hölder constant)."""
    return lp_norm(multiplier_kernel(grid, m), p)


def translate(f: SampledField, offset: Sequence[int]) -> SampledField:
    """Return ``f(. + offset * h)`` for an integer cell offset (exact periodic shift)."""
    offset = (offset,) if np.isscalar(offset) else tuple(offset)
    if len(offset) != f.grid.dim:
        raise InvalidParams(f"offset needs {f.grid.dim} components, got {len(offset)}")
    return SampledField(
        f.grid, np.roll(f.values, tuple(-int(o) for o in offset), axis=tuple(range(f.grid.dim)))
    )


# --- preset catalog -------------------------------------------------------


def _axis_vector(value, dim: int, name: str) -> tuple:
    if np.isscalar(value):
        vec = (value,) + (0,) * (dim - 1)
    else:
        vec = tuple(value)
    if len(vec) != dim:
        raise InvalidParams(f"{name} must have {dim} components")
    return vec


def _harmonic(grid: GridSpec, k=1, amplitude=1.0):
    k = _axis_vector(k, grid.dim, "k")
    if any(int(c) != c for c in k):
        raise InvalidParams("harmonic index must be integer")
    phase = sum(grid.base_frequency * int(c) * x for c, x in zip(k, grid.coordinates))
    return amplitude * np.exp(1j * phase)


def _cosine(grid: GridSpec, k=1, amplitude=1.0):
    return _harmonic(grid, k, amplitude).real


def _sine(grid: GridSpec, k=1, amplitude=1.0):
    return _harmonic(grid, k, amplitude).imag


def _weierstrass(grid: GridSpec, s=0.5, j_max=6, direction=1):
    direction = _axis_vector(direction, grid.dim, "direction")
    if int(j_max) != j_max or j_max < 0:
        raise InvalidParams("j_max must be a nonnegative integer")
    top = 2 ** int(j_max) * max(abs(int(c)) for c in direction)
    if top > grid.n // 2:
        raise InvalidParams(f"frequency 2^{j_max} exceeds the Nyquist index {grid.n // 2}")
    x = sum(grid.base_frequency * int(c) * xc for c, xc in zip(direction, grid.coordinates))
    out = np.zeros(grid.shape)
    for j in range(int(j_max) + 1):
        out += 2.0 ** (-j * s) * np.cos(2**j * x)
    return out


def _gaussian(grid: GridSpec, sigma=0.5, center=None, images=3):
    if not sigma > 0:
        raise InvalidParams("sigma must be positive")
    c = (grid.period / 2,) * grid.dim if center is None else _axis_vector(center, grid.dim, "center")
    out = np.zeros(grid.shape)
    shifts = range(-int(images), int(images) + 1)
    for offs in np.ndindex(*([len(shifts)] * grid.dim)):
        r2 = sum(
            (x - ci + shifts[o] * grid.period) ** 2
            for x, ci, o in zip(grid.coordinates, c, offs)
        )
        out += np.exp(-r2 / (2 * sigma**2))
    return out


def _random_bandlimited(grid: GridSpec, seed=0, band=(2, 32), real=True, normalize=True):
    lo, hi = band
    if not 0 <= lo <= hi:
        raise InvalidParams("band must satisfy 0 <= lo <= hi")
    rng = np.random.default_rng(seed)
    kr = np.sqrt(sum(k.astype(float) ** 2 for k in grid.lattice_indices))
    mask = (kr >= lo) & (kr <= hi)
    if not mask.any():
        raise InvalidParams(f"band {band} holds no lattice frequency")
    coeffs = (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)) * mask
    values = np.fft.ifftn(coeffs)
    if real:
        values = values.real
    if normalize:
        values = values / np.abs(values).max()
    return values


def _sign(grid: GridSpec, axis=0):
    x = grid.coordinates[int(axis)]
    return np.where(x < grid.period / 2, 1.0, -1.0)


def _indicator(grid: GridSpec, index=0):
    out = np.zeros(grid.shape)
    out[tuple(int(i) for i in _axis_vector(index, grid.dim, "index"))] = 1.0
    return out


PRESETS: Mapping[str, Callable] = {
    "harmonic": _harmonic,
    "cosine": _cosine,
    "sine": _sine,
    "weierstrass": _weierstrass,
    "gaussian": _gaussian,
    "random_bandlimited": _random_bandlimited,
    "sign": _sign,
    "indicator": _indicator,
}


def sample_preset(name: str, params: Mapping | None = None, grid: GridSpec | None = None) -> SampledField:
    """Synthesize a field from the preset catalog.

    >>> f = sample_preset("weierstrass", {"s": 0.5, "j_max": 6}, GridSpec(n=256))
    """
    grid = GridSpec() if grid is None else grid
    try:
        maker = PRESETS[name]
    except KeyError:
        raise InvalidParams(f"unknown preset {name!r}; known: {sorted(PRESETS)}") from None
    try:
        values = maker(grid, **dict(params or {}))
    except TypeError as exc:
        raise InvalidParams(f"invalid parameters for preset {name!r}: {exc}") from None
    return SampledField(grid, values)
