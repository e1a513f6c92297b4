"""Fourier-multiplier operators and real-space maximal/oscillation functionals."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement, product
from typing import Mapping, Sequence

import numpy as np

from .errors import GridMismatch, InconsistentPartials, InvalidParams
from .spectral import GridSpec, SampledField, _lp, apply_multiplier, as_extended

__all__ = [
    "MultiplierSpec",
    "lift",
    "riesz",
    "heat",
    "default_t_grid",
    "hardy_norm",
    "bmo_norm",
    "maximal_op",
    "FSReport",
    "fs_vector_check",
    "PartialDerivativeSet",
    "multi_indices",
    "spectral_derivative",
    "partials_of",
    "check_consistency",
    "poincare_reconstruct",
]


@dataclass(frozen=True)
class MultiplierSpec:
    """Named multiplier: ``lift`` (alpha), ``riesz`` (axis, 1-based) or ``heat`` (t)."""

    name: str
    param: float

    def __post_init__(self):
        if self.name not in ("lift", "riesz", "heat"):
            raise InvalidParams(f"unknown multiplier {self.name!r}")
        if self.name == "heat" and not self.param > 0:
            raise InvalidParams(f"heat time must be positive, got {self.param}")

    def symbol(self, grid: GridSpec) -> np.ndarray:
        r = grid.radius
        origin = grid.zero_mask
        safe = np.where(origin, 1.0, r)
        if self.name == "lift":
            return np.where(origin, 0.0, safe ** float(self.param))
        if self.name == "heat":
            return np.exp(-float(self.param) * r**2)
        k = int(self.param)
        if not 1 <= k <= grid.dim:
            raise InvalidParams(f"Riesz axis must be in 1..{grid.dim}, got {self.param}")
        sym = np.where(origin, 0.0, -1j * grid.wavenumbers[k - 1] / safe)
        # the Nyquist row along axis k has no mirror partner on the lattice;
        # an odd symbol there would break realness, so it is dropped
        return np.where(grid.lattice_indices[k - 1] == -grid.n // 2, 0.0, sym)


def lift(f: SampledField, alpha: float) -> SampledField:
    """``(-Δ)^(alpha/2) f``: spectrum times ``|xi|^alpha``, mean removed."""
    return apply_multiplier(f, MultiplierSpec("lift", alpha).symbol(f.grid))


def riesz(f: SampledField, k: int) -> SampledField:
    """Riesz transform along axis ``k`` (1-based): symbol ``-i xi_k / |xi|``."""
    return apply_multiplier(f, MultiplierSpec("riesz", k).symbol(f.grid))


def heat(f: SampledField, t: float) -> SampledField:
    """``e^{t Δ} f``."""
    return apply_multiplier(f, MultiplierSpec("heat", t).symbol(f.grid))


def default_t_grid(grid: GridSpec, count: int = 32, t_max: float = 4.0) -> np.ndarray:
    return np.geomspace(grid.spacing**2, t_max, count)


def hardy_norm(f: SampledField, p: float, t_grid: Sequence[float] | None = None, local: bool = False) -> float:
    """``|| max_t |e^{tΔ} f| ||_p`` over a finite time grid (``t < 1`` when ``local``)."""
    p = as_extended(p)
    if not (0 < p < math.inf):
        raise InvalidParams("hardy_norm needs 0 < p < inf")
    ts = default_t_grid(f.grid) if t_grid is None else np.asarray(t_grid, dtype=float)
    if local:
        ts = ts[ts < 1]
    if ts.size == 0:
        raise InvalidParams("time grid is empty")
    if np.any(ts <= 0):
        raise InvalidParams("heat times must be positive")
    spec = np.fft.fftn(f.values)
    r2 = f.grid.radius**2
    env = np.zeros(f.grid.shape)
    for t in ts:
        env = np.maximum(env, np.abs(np.fft.ifftn(np.exp(-t * r2) * spec)))
    return _lp(env, p, f.grid.cell_volume)


# --- discrete balls -----------------------------------------------------------


def _offset_radius(grid: GridSpec) -> np.ndarray:
    """Periodic cell distance of each offset from the origin (FFT-ordered offsets)."""
    return np.sqrt(sum(k.astype(float) ** 2 for k in grid.lattice_indices))


def _ball_offsets(dim: int, r: int) -> np.ndarray:
    rng = range(-r, r + 1)
    offs = [o for o in product(rng, repeat=dim) if sum(c * c for c in o) <= r * r]
    return np.array(offs, dtype=int)


def _ball_sum(values: np.ndarray, offsets: np.ndarray, dim: int) -> np.ndarray:
    axes = tuple(range(dim))
    acc = np.zeros(values.shape, dtype=values.dtype)
    for o in offsets:
        acc += np.roll(values, tuple(-int(c) for c in o), axis=axes)
    return acc


def maximal_op(f: SampledField, eta: float = 1.0, method: str = "fft") -> SampledField:
    """Powered maximal function ``sup_R (avg_{B(x,R)} |f|^eta)^(1/eta)``.

    Balls are centred at grid points with radii ``r h`` for every integer
    ``r`` from 0 (the point itself) to ``N/2``; the supremum is exact over
    that family.  ``method="direct"`` sums ball offsets explicitly and is
    meant for small grids and cross-checks.
    """
    if not eta > 0:
        raise InvalidParams("eta must be positive")
    g = f.grid
    a = np.abs(f.values) ** eta
    best = a.copy()
    if method == "fft":
        dist = _offset_radius(g)
        fa = np.fft.fftn(a)
        for r in range(1, g.n // 2 + 1):
            ball = dist <= r + 1e-9
            avg = np.fft.ifftn(fa * np.fft.fftn(ball)).real / ball.sum()
            np.maximum(best, avg, out=best)
    elif method == "direct":
        for r in range(1, g.n // 2 + 1):
            offs = _ball_offsets(g.dim, r)
            # keep one representative per torus point once the ball wraps
            keys = {tuple(int(c) % g.n for c in o): o for o in offs}
            offs = np.array(list(keys.values()))
            np.maximum(best, _ball_sum(a, offs, g.dim) / len(offs), out=best)
    else:
        raise InvalidParams(f"unknown method {method!r}")
    return SampledField(g, np.clip(best, 0.0, None) ** (1.0 / eta))


def _mean_oscillation(values: np.ndarray, offsets: np.ndarray, dim: int) -> np.ndarray:
    count = len(offsets)
    mean = _ball_sum(values, offsets, dim) / count
    axes = tuple(range(dim))
    acc = np.zeros(values.shape)
    for o in offsets:
        acc += np.abs(np.roll(values, tuple(-int(c) for c in o), axis=axes) - mean)
    return acc / count


def bmo_norm(f: SampledField, local: bool = False, max_radius: float | None = None) -> float:
    """Mean-oscillation norm over grid-centred discrete balls of radius ``<= L/4``.

    The local variant adds ``sup_{|B|=1} ∫_B |f|`` (realized by the ball
    whose discrete volume is closest to 1) and restricts the oscillation
    term to balls of volume at most 1.
    """
    g = f.grid
    max_radius = g.period / 4 if max_radius is None else max_radius
    rmax = int(max_radius / g.spacing + 1e-9)
    vals = f.values
    osc = 0.0
    for r in range(1, rmax + 1):
        offs = _ball_offsets(g.dim, r)
        if local and len(offs) * g.cell_volume > 1.0:
            break
        osc = max(osc, float(_mean_oscillation(vals, offs, g.dim).max()))
    if not local:
        return osc
    best_r, best_gap = 0, math.inf
    for r in range(0, g.n // 2):
        gap = abs(len(_ball_offsets(g.dim, r)) * g.cell_volume - 1.0)
        if gap < best_gap:
            best_r, best_gap = r, gap
    offs = _ball_offsets(g.dim, best_r)
    mass = float(_ball_sum(np.abs(vals), offs, g.dim).max()) * g.cell_volume
    return mass + osc


@dataclass(frozen=True)
class FSReport:
    lhs: float
    rhs: float
    ratio: float

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "ratio": self.ratio}


def _lq_pointwise(arrays: Sequence[np.ndarray], q: float) -> np.ndarray:
    if math.isinf(q):
        return np.maximum.reduce(list(arrays))
    acc = np.zeros(arrays[0].shape)
    for a in arrays:
        acc += a**q
    return acc ** (1.0 / q)


def fs_vector_check(fields: Sequence[SampledField], p, q, eta: float = 1.0) -> FSReport:
    """Both sides of the vector-valued maximal inequality for one family."""
    p, q = as_extended(p), as_extended(q)
    if not (1 < p < math.inf and 1 < q):
        raise InvalidParams("fs_vector_check is defined for 1 < p < inf and 1 < q <= inf")
    if not fields:
        raise InvalidParams("need at least one field")
    grid = fields[0].grid
    if any(f.grid != grid for f in fields):
        raise GridMismatch("all fields must share one grid")
    lhs = _lp(_lq_pointwise([maximal_op(f, eta).values.real for f in fields], q), p, grid.cell_volume)
    rhs = _lp(_lq_pointwise([np.abs(f.values) for f in fields], q), p, grid.cell_volume)
    ratio = lhs / rhs if rhs > 0 else (1.0 if lhs == 0 else math.inf)
    return FSReport(lhs, rhs, ratio)


# --- Poincaré reconstruction ----------------------------------------------------


def multi_indices(dim: int, order: int) -> list:
    """All multi-indices of length ``dim`` and total order ``order``, sorted."""
    out = set()
    for combo in combinations_with_replacement(range(dim), order):
        alpha = [0] * dim
        for axis in combo:
            alpha[axis] += 1
        out.add(tuple(alpha))
    return sorted(out, reverse=True)


def _ixi_power(grid: GridSpec, alpha: Sequence[int]) -> np.ndarray:
    out = np.ones(grid.shape, dtype=complex)
    for w, a in zip(grid.wavenumbers, alpha):
        if a:
            out = out * (1j * w) ** a
    return out


def spectral_derivative(f: SampledField, alpha: Sequence[int]) -> SampledField:
    return apply_multiplier(f, _ixi_power(f.grid, alpha))


@dataclass(frozen=True, eq=False)
class PartialDerivativeSet:
    """Candidate partial derivatives ``f_alpha`` for every ``|alpha| = order``."""

    order: int
    entries: Mapping[tuple, SampledField] = field(repr=False)

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 1:
            raise InvalidParams("order must be a positive integer")
        if not self.entries:
            raise InvalidParams("empty partial-derivative set")
        entries = {tuple(int(a) for a in k): v for k, v in self.entries.items()}
        grid = next(iter(entries.values())).grid
        if any(v.grid != grid for v in entries.values()):
            raise GridMismatch("all partials must share one grid")
        expected = set(multi_indices(grid.dim, self.order))
        if set(entries) != expected:
            raise InvalidParams(f"need exactly the multi-indices {sorted(expected)}")
        object.__setattr__(self, "entries", entries)

    @property
    def grid(self) -> GridSpec:
        return next(iter(self.entries.values())).grid


def partials_of(f: SampledField, order: int) -> PartialDerivativeSet:
    return PartialDerivativeSet(
        order, {a: spectral_derivative(f, a) for a in multi_indices(f.grid.dim, order)}
    )


def _scaled_gap(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(1.0, float(np.abs(a).max()), float(np.abs(b).max()))
    return float(np.abs(a - b).max()) / scale


def check_consistency(partials: PartialDerivativeSet) -> float:
    """Largest relative mismatch of ``∂^β f_α = ∂^β' f_α'`` over ``α + β = α' + β'``.

    It suffices to test the minimal pair ``β = max(α, α') - α``; any larger
    common multi-index differentiates both sides further.
    """
    g = partials.grid
    specs = {a: np.fft.fftn(v.values) for a, v in partials.entries.items()}
    worst = 0.0
    keys = sorted(specs)
    for i, a in enumerate(keys):
        for b in keys[i + 1:]:
            gamma = tuple(max(x, y) for x, y in zip(a, b))
            lhs = np.fft.ifftn(_ixi_power(g, [c - x for c, x in zip(gamma, a)]) * specs[a])
            rhs = np.fft.ifftn(_ixi_power(g, [c - y for c, y in zip(gamma, b)]) * specs[b])
            worst = max(worst, _scaled_gap(lhs, rhs))
    return worst


def poincare_reconstruct(partials: PartialDerivativeSet, tol: float = 1e-8) -> SampledField:
    """Mean-zero ``f`` with ``∂^α f = f_α`` for every supplied ``α``.

    The spectrum of ``f`` is the least-squares combination of
    ``F f_α / (i xi)^α`` over all ``α``, which is a weighted average of the
    admissible divisions at each nonzero frequency.
    """
    g = partials.grid
    for a, v in partials.entries.items():
        if abs(v.values.mean()) > tol * max(1.0, float(np.abs(v.values).max())):
            raise InconsistentPartials(f"partial {a} has a nonzero mean")
    gap = check_consistency(partials)
    if gap > tol:
        raise InconsistentPartials(f"cross-derivative mismatch {gap:.3e} exceeds {tol:.1e}")
    num = np.zeros(g.shape, dtype=complex)
    den = np.zeros(g.shape)
    for a, v in partials.entries.items():
        w = _ixi_power(g, a)
        num += np.conj(w) * np.fft.fftn(v.values)
        den += np.abs(w) ** 2
    spec = np.where(g.zero_mask, 0.0, num / np.where(g.zero_mask, 1.0, den))
    out = SampledField(g, np.fft.ifftn(spec))
    for a, v in partials.entries.items():
        miss = _scaled_gap(spectral_derivative(out, a).values, v.values)
        if miss > tol:
            raise InconsistentPartials(f"reconstruction misses partial {a} by {miss:.3e}")
    return out
