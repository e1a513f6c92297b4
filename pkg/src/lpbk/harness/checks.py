"""Catalog of executable inequality and identity checks.

Every check maps a :class:`FunctionFamily` to per-instance ``(lhs, rhs,
ratio)`` triples and a pass flag.  Constants come in three flavours:

* exact - the inequality holds with constant 1 (slack only for roundoff);
* derived - the constant is computed from grid quantities following the
  Young/Hölder argument (multiplier-kernel norms);
* fitted - the inequality only holds up to an unquantified constant, which
  is fitted on a calibration family and frozen (see :mod:`.fitting`).
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from ..errors import InvalidParams
from ..operators import MultiplierSpec, fs_vector_check, lift, riesz
from ..partition import CUTOFFS, DyadicPartition, build_partition, validate_partition
from ..spaces import SpaceParams, default_shift_set, difference, hz_seminorm, space_norm
from ..spectral import GridSpec, SampledField, _lp, as_extended, forward_transform, kernel_l1_norm
from .families import FunctionFamily

__all__ = [
    "Instance",
    "ExperimentReport",
    "CheckDef",
    "CATALOG",
    "run_check",
    "run_checks",
    "frozen_constants",
    "canonical_params",
    "partition_for",
]

INF = math.inf


@dataclass(frozen=True)
class Instance:
    lhs: float
    rhs: float
    ratio: float
    passed: bool | None = None
    label: str = ""

    def to_dict(self) -> dict:
        out = {"lhs": self.lhs, "rhs": self.rhs, "ratio": self.ratio}
        if self.label:
            out["label"] = self.label
        return out


@dataclass(frozen=True)
class ExperimentReport:
    check: str
    params: dict
    instances: tuple
    constant: Any = None
    tolerance: float | None = None
    family: dict | None = None

    @property
    def passed(self) -> bool:
        return all(bool(i.passed) for i in self.instances)

    @property
    def ratios(self) -> np.ndarray:
        return np.array([i.ratio for i in self.instances], dtype=float)

    @property
    def summary(self) -> dict:
        r = self.ratios
        finite = r[np.isfinite(r)]
        if finite.size == 0:
            return {"count": len(r), "min_ratio": None, "max_ratio": None, "mean_ratio": None}
        return {
            "count": len(r),
            "min_ratio": float(finite.min()),
            "max_ratio": float(finite.max()),
            "mean_ratio": float(finite.mean()),
            "failures": int(sum(1 for i in self.instances if i.passed is False)),
        }

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "params": self.params,
            "instances": [i.to_dict() for i in self.instances],
            "summary": self.summary,
            "constant": self.constant,
            "tolerance": self.tolerance,
            "family": self.family,
            "pass": self.passed,
        }


@dataclass
class Context:
    grid: GridSpec
    partition: DyadicPartition
    params: dict
    constant: Any = None


@dataclass(frozen=True)
class CheckDef:
    name: str
    fn: Callable[[list, Context], tuple]
    defaults: Mapping[str, Any]
    tier: str  # exact | derived | fitted
    family: str = "default"
    tolerance: float | None = None
    fit_rule: str | None = None  # upper | symmetric | interval
    extended: tuple = ()  # param names holding extended reals


CATALOG: dict = {}


def _register(name, tier, defaults, family="default", tolerance=None, fit_rule=None, extended=("p", "q")):
    def wrap(fn):
        CATALOG[name] = CheckDef(name, fn, dict(defaults), tier, family, tolerance, fit_rule, tuple(extended))
        return fn

    return wrap


@lru_cache(maxsize=32)
def partition_for(grid: GridSpec, cutoff: str = "exp") -> DyadicPartition:
    try:
        profile = CUTOFFS[cutoff]()
    except KeyError:
        raise InvalidParams(f"unknown cutoff {cutoff!r}") from None
    return build_partition(grid, profile)


def _norm(f, s, p, q, part, kind="besov_homog") -> float:
    return space_norm(f, SpaceParams(s, p, q, kind), part).aggregate


def _leq(lhs, rhs, slack) -> bool:
    return lhs <= rhs + slack * max(1.0, abs(rhs))


def _ratio(lhs, rhs) -> float:
    if rhs == 0:
        return 0.0 if lhs == 0 else INF
    return lhs / rhs


def _conjugate(p: float) -> float:
    if p == 1:
        return INF
    if math.isinf(p):
        return 1.0
    return p / (p - 1)


# --- exact (constant one) ---------------------------------------------------------


@_register("partition_validity", "exact", {}, family="harmonics", tolerance=1e-12)
def _partition_validity(members, ctx):
    rep = validate_partition(ctx.partition)
    rows = [
        ("support", rep.support_violation),
        ("range", rep.range_violation),
        ("overlap", float(rep.overlap_violation)),
        ("telescoping", rep.telescoping_violation),
        ("dilation", rep.dilation_violation),
    ]
    return [Instance(v, rep.tolerance, v / rep.tolerance, v <= rep.tolerance, name) for name, v in rows], None


@_register("lq_monotone", "exact", {"s": 0.5, "p": 2.0, "qs": [1.0, 2.0, INF]}, tolerance=1e-12,
           extended=("p", "qs"))
def _lq_monotone(members, ctx):
    s, p = ctx.params["s"], ctx.params["p"]
    qs = sorted(ctx.params["qs"])
    out = []
    for i, f in enumerate(members):
        norms = [_norm(f, s, p, q, ctx.partition) for q in qs]
        for (q, nq), (r, nr) in zip(zip(qs, norms), zip(qs[1:], norms[1:])):
            out.append(Instance(nr, nq, _ratio(nr, nq), _leq(nr, nq, 1e-12), f"member {i}: q={q} -> r={r}"))
    return out, None


def _fourier_side(f: SampledField) -> SampledField:
    """``F f`` viewed as a field on the dual torus (spacing ``2 pi / L``)."""
    g = f.grid
    dual = GridSpec(g.dim, g.n, g.n * g.base_frequency)
    return SampledField(dual, forward_transform(f).coefficients)


@_register("fourier_refinement", "exact", {}, family="nonneg_spectrum", tolerance=1e-10)
def _fourier_refinement(members, ctx):
    out = []
    for i, f in enumerate(members):
        F = _fourier_side(f)
        lhs = _norm(F, 0.0, INF, 1.0, partition_for(F.grid))
        rhs = _lp(f.values, 1.0, f.grid.cell_volume)
        out.append(Instance(lhs, rhs, _ratio(lhs, rhs), _leq(lhs, rhs, 1e-10), f"member {i}"))
    return out, 1.0


@_register("bc_embedding", "exact", {}, tolerance=1e-10)
def _bc_embedding(members, ctx):
    out = []
    for i, f in enumerate(members):
        lhs = float(np.abs(f.values).max())
        rhs = _norm(f, 0.0, INF, 1.0, ctx.partition) + abs(f.mean())
        out.append(Instance(lhs, rhs, _ratio(lhs, rhs), _leq(lhs, rhs, 1e-10), f"member {i}"))
    return out, 1.0


@_register("bf_sandwich", "exact", {"s": 0.5, "pq": [[2.0, 1.0], [2.0, INF], [4.0, 2.0]],
                                    "homogeneous": False}, tolerance=1e-10, extended=("pq",))
def _bf_sandwich(members, ctx):
    s = ctx.params["s"]
    suffix = "_homog" if ctx.params["homogeneous"] else "_nonhomog"
    out = []
    for i, f in enumerate(members):
        for p, q in ctx.params["pq"]:
            b_big = _norm(f, s, p, max(p, q), ctx.partition, "besov" + suffix)
            fnorm = _norm(f, s, p, q, ctx.partition, "tl" + suffix)
            b_small = _norm(f, s, p, min(p, q), ctx.partition, "besov" + suffix)
            out.append(Instance(b_big, fnorm, _ratio(b_big, fnorm), _leq(b_big, fnorm, 1e-10),
                                f"member {i}: B_p,max <= F (p={p}, q={q})"))
            out.append(Instance(fnorm, b_small, _ratio(fnorm, b_small), _leq(fnorm, b_small, 1e-10),
                                f"member {i}: F <= B_p,min (p={p}, q={q})"))
    return out, 1.0


@_register("l2_corridor", "exact", {}, tolerance=1e-6)
def _l2_corridor(members, ctx):
    lo, hi = 2**-0.5 - 1e-6, 1 + 1e-6
    out = []
    for i, f in enumerate(members):
        f0 = f.without_mean()
        lhs = _norm(f0, 0.0, 2.0, 2.0, ctx.partition)
        rhs = _lp(f0.values, 2.0, f.grid.cell_volume)
        r = _ratio(lhs, rhs)
        out.append(Instance(lhs, rhs, r, lo <= r <= hi, f"member {i}"))
    return out, [lo, hi]


@_register("realization", "exact", {"s": 0.5, "j_split": 0}, tolerance=1e-10)
def _realization(members, ctx):
    s, j_split = ctx.params["s"], int(ctx.params["j_split"])
    if not s > 0:
        raise InvalidParams("realization check needs s > 0")
    part = ctx.partition
    out = []
    for i, f in enumerate(members):
        bnorm = _norm(f, s, INF, INF, part)
        spec = np.fft.fftn(f.values)
        bands = {j: np.fft.ifftn(part.bands[j] * spec) for j in part.band_range if j > j_split}
        js = sorted(bands)
        # tails T_J = sum_{j > J} Δ_j f, accumulated from the top
        tail = np.zeros(f.grid.shape, dtype=complex)
        for J in reversed([j_split] + js[:-1]):
            tail = tail + bands[J + 1]
            lhs = float(np.abs(tail).max())
            rhs = math.fsum(2.0 ** (-j * s) for j in js if j > J) * bnorm
            out.append(Instance(lhs, rhs, _ratio(lhs, rhs), _leq(lhs, rhs, 1e-10), f"member {i}: J={J}"))
    return out, 1.0


def _lattice_psi(grid: GridSpec, j: int, radius: int):
    """Discrete ``Ψ`` on the coarse lattice ``2^j h Z^n`` (so every shift below is exact).

    Returns coarse integer points and weights ``Ψ(y) * (2^j h)^n``; the bump is
    deliberately off-centre so that sign errors in the identity show up.
    """
    pts = [np.array(o) for o in np.ndindex(*([2 * radius + 1] * grid.dim))]
    pts = [o - radius for o in pts]
    w = (2.0**j * grid.spacing) ** grid.dim
    vals = [math.exp(-float(np.sum((o - 0.7) ** 2)) / radius) * (1 + 0.3 * o[0] / radius) for o in pts]
    return pts, [w * v for v in vals]


def diff_convolution_sides(f: SampledField, m: int, j: int, radius: int = 3):
    """Both sides of the convolution-difference identity, evaluated independently.

    Left: ``2^{jn} Φ(2^j .) * f - m! (∫Ψ) f`` with ``Φ`` assembled from dilates
    of ``Ψ`` and the convolution done by FFT.  Right: ``Σ_r (-1)^{r+1} C(m,r) r^m
    ∫ Ψ(y) Δ^m_{-2^{-j} r y} f dy`` from explicit lattice shifts.
    """
    g = f.grid
    pts, wts = _lattice_psi(g, j, radius)
    # the shift 2^{-j} r l y equals r l o cells for coarse point o
    kernel = np.zeros(g.shape)
    for r in range(1, m + 1):
        for l in range(1, m + 1):
            c = r**m * math.comb(m, r) * math.comb(m, l) * (-1) ** (r + l + m + 1)
            for o, w in zip(pts, wts):
                kernel[tuple(int(r * l * x) % g.n for x in o)] += c * w / g.cell_volume
    conv = np.fft.ifftn(np.fft.fftn(kernel) * np.fft.fftn(f.values)) * g.cell_volume
    lhs = conv - math.factorial(m) * math.fsum(wts) * f.values
    rhs = np.zeros(g.shape, dtype=complex)
    for r in range(1, m + 1):
        coef = (-1) ** (r + 1) * math.comb(m, r) * r**m
        for o, w in zip(pts, wts):
            rhs += coef * w * difference(f, tuple(-int(r * x) for x in o), m).values
    return lhs, rhs


@_register("diff_convolution", "exact", {"ms": [1, 2], "js": [0, 1, 2], "radius": 3},
           family="random_bandlimited", tolerance=1e-8, extended=())
def _diff_convolution(members, ctx):
    out = []
    for i, f in enumerate(members):
        for m in ctx.params["ms"]:
            for j in ctx.params["js"]:
                lhs, rhs = diff_convolution_sides(f, int(m), int(j), int(ctx.params["radius"]))
                gap = float(np.abs(lhs - rhs).max())
                scale = max(1.0, float(np.abs(rhs).max()))
                out.append(Instance(float(np.abs(lhs).max()), float(np.abs(rhs).max()), gap / scale,
                                    gap / scale <= 1e-8, f"member {i}: m={m}, j={j}"))
    return out, None


# --- derived constants --------------------------------------------------------------


def sobolev_constant(part: DyadicPartition, p: float) -> float:
    g = part.grid
    pc = _conjugate(p)
    return max(2.0 ** (-j * g.dim / p) * kernel_l1_norm(g, part.neighbourhood(j), pc) for j in part.band_range)


def lift_constant(part: DyadicPartition, alpha: float) -> float:
    g = part.grid
    r_alpha = MultiplierSpec("lift", alpha).symbol(g).real
    return max(kernel_l1_norm(g, part.neighbourhood(j) * r_alpha * 2.0 ** (-j * alpha)) for j in part.band_range)


def riesz_constant(part: DyadicPartition, axis: int) -> float:
    g = part.grid
    sym = MultiplierSpec("riesz", axis).symbol(g)
    return max(kernel_l1_norm(g, part.neighbourhood(j) * sym) for j in part.band_range)


@_register("sobolev_embedding", "derived", {"s": 0.5, "p": 2.0, "q": 2.0}, tolerance=1e-10)
def _sobolev(members, ctx):
    s, p, q = ctx.params["s"], ctx.params["p"], ctx.params["q"]
    n = ctx.grid.dim
    C = sobolev_constant(ctx.partition, p)
    out = []
    for i, f in enumerate(members):
        lhs = _norm(f, s - n / p, INF, q, ctx.partition)
        base = _norm(f, s, p, q, ctx.partition)
        out.append(Instance(lhs, base, _ratio(lhs, base), _leq(lhs, C * base, 1e-10), f"member {i}"))
    return out, C


@_register("lift_isomorphism", "derived", {"s": 0.5, "p": 2.0, "q": 2.0, "alpha": 1.0}, tolerance=1e-10)
def _lift_iso(members, ctx):
    s, p, q, a = (ctx.params[k] for k in ("s", "p", "q", "alpha"))
    C = 3 * max(lift_constant(ctx.partition, a), lift_constant(ctx.partition, -a))
    out = []
    for i, f in enumerate(members):
        lhs = _norm(lift(f, a), s - a, p, q, ctx.partition)
        rhs = _norm(f, s, p, q, ctx.partition)
        r = _ratio(lhs, rhs)
        ok = (lhs == rhs == 0) or (1 / C <= r <= C)
        out.append(Instance(lhs, rhs, r, ok, f"member {i}"))
    return out, C


@_register("riesz_bounded", "derived", {"s": 0.5, "p": 2.0, "q": 2.0, "axes": None}, tolerance=1e-10)
def _riesz_bounded(members, ctx):
    s, p, q = ctx.params["s"], ctx.params["p"], ctx.params["q"]
    axes = ctx.params["axes"] or list(range(1, ctx.grid.dim + 1))
    consts = {k: riesz_constant(ctx.partition, k) for k in axes}
    out = []
    for i, f in enumerate(members):
        base = _norm(f, s, p, q, ctx.partition)
        for k in axes:
            lhs = _norm(riesz(f, k), s, p, q, ctx.partition)
            out.append(Instance(lhs, base, _ratio(lhs, base), _leq(lhs, consts[k] * base, 1e-10),
                                f"member {i}: axis {k}"))
    return out, max(consts.values())


# --- fitted constants -------------------------------------------------------------------


@_register("phi_independence", "fitted", {"s": 0.5, "p": 2.0, "q": 2.0, "cutoffs": ["exp", "exp_sq"]},
           fit_rule="symmetric")
def _phi_independence(members, ctx):
    s, p, q = ctx.params["s"], ctx.params["p"], ctx.params["q"]
    a, b = ctx.params["cutoffs"]
    pa, pb = partition_for(ctx.grid, a), partition_for(ctx.grid, b)
    out = []
    for i, f in enumerate(members):
        na, nb = _norm(f, s, p, q, pa), _norm(f, s, p, q, pb)
        out.append(Instance(na, nb, _ratio(na, nb), None, f"member {i}"))
    return out, None


@_register("holder_equiv", "fitted", {"s": 0.5, "max_shift": None}, fit_rule="interval")
def _holder_equiv(members, ctx):
    s = ctx.params["s"]
    shifts = default_shift_set(ctx.grid, ctx.params["max_shift"])
    out = []
    for i, f in enumerate(members):
        hz = hz_seminorm(f, s, shifts)
        b = _norm(f, s, INF, INF, ctx.partition)
        out.append(Instance(hz, b, _ratio(hz, b), None, f"member {i}"))
    return out, None


@_register("fs_maximal", "fitted", {"p": 2.0, "q": 2.0, "eta": 1.0}, family="random_families",
           fit_rule="upper")
def _fs_maximal(members, ctx):
    out = []
    for i, fam in enumerate(members):
        rep = fs_vector_check(fam, ctx.params["p"], ctx.params["q"], ctx.params["eta"])
        out.append(Instance(rep.lhs, rep.rhs, rep.ratio, None, f"family {i}"))
    return out, None


# --- running ------------------------------------------------------------------------------


def _ext(v):
    if isinstance(v, (list, tuple)):
        return [_ext(x) for x in v]
    return as_extended(v)


def canonical_params(check: str, params: Mapping | None) -> dict:
    """Defaults merged with ``params``; extended reals coerced to floats."""
    try:
        cdef = CATALOG[check]
    except KeyError:
        raise InvalidParams(f"unknown check {check!r}; known: {sorted(CATALOG)}") from None
    params = dict(params or {})
    params.pop("constant", None)
    unknown = set(params) - set(cdef.defaults)
    if unknown:
        raise InvalidParams(f"unknown parameters for {check}: {sorted(unknown)}")
    merged = {**cdef.defaults, **params}
    for k in cdef.extended:
        if merged.get(k) is not None:
            merged[k] = _ext(merged[k])
    for k in ("s", "alpha"):
        if k in merged and merged[k] is not None:
            merged[k] = float(merged[k])
    return merged


def _jsonable(params: Mapping) -> dict:
    def conv(v):
        if isinstance(v, float) and math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if isinstance(v, (list, tuple)):
            return [conv(x) for x in v]
        return v

    return {k: conv(v) for k, v in sorted(params.items())}


def frozen_constants() -> dict:
    path = resources.files("lpbk.harness").joinpath("frozen_constants.json")
    if not path.is_file():
        return {}
    return json.loads(path.read_text())


def _predicate(rule: str, constant):
    if rule == "upper":
        return lambda r: r <= constant
    if rule == "symmetric":
        return lambda r: 1 / constant <= r <= constant
    if rule == "interval":
        lo, hi = constant
        return lambda r: lo <= r <= hi
    raise InvalidParams(f"unknown fit rule {rule!r}")


def _resolve_constant(cdef: CheckDef, params: dict, constant):
    if constant is not None:
        return constant
    entry = frozen_constants().get(cdef.name)
    if entry is None:
        raise InvalidParams(f"no frozen constant for {cdef.name}; pass constant=...")
    if entry["params"] != _jsonable(params):
        raise InvalidParams(
            f"frozen constant for {cdef.name} was fitted for {entry['params']}; "
            f"pass constant=... for {_jsonable(params)}"
        )
    return entry["constant"]


def run_check(
    check_id: str,
    family: FunctionFamily | None = None,
    params: Mapping | None = None,
    *,
    partition: DyadicPartition | None = None,
    constant=None,
    fit: bool = False,
) -> ExperimentReport:
    """Run one catalog check over every member of ``family``.

    ``partition`` overrides the default partition of the family grid.  For
    fitted checks the constant is, in order: ``constant``, ``params["constant"]``,
    or the frozen value.  ``fit=True`` skips the predicate and leaves every
    instance unjudged (used while calibrating).
    """
    params = dict(params or {})
    constant = params.pop("constant", constant)
    canon = canonical_params(check_id, params)
    cdef = CATALOG[check_id]
    family = family or FunctionFamily(cdef.family)
    if partition is not None and partition.grid != family.grid:
        raise InvalidParams("partition grid differs from the family grid")
    part = partition if partition is not None else partition_for(family.grid)
    ctx = Context(family.grid, part, canon)
    instances, derived_constant = cdef.fn(family.members(), ctx)
    tol = cdef.tolerance
    if cdef.tier == "fitted":
        if fit:
            instances = [Instance(i.lhs, i.rhs, i.ratio, None, i.label) for i in instances]
            derived_constant = None
        else:
            derived_constant = _resolve_constant(cdef, canon, constant)
            ok = _predicate(cdef.fit_rule, derived_constant)
            instances = [Instance(i.lhs, i.rhs, i.ratio, bool(ok(i.ratio)), i.label) for i in instances]
    return ExperimentReport(
        check=check_id,
        params=_jsonable(canon),
        instances=tuple(instances),
        constant=derived_constant,
        tolerance=tol,
        family=family.to_dict(),
    )


def run_checks(jobs: Sequence[tuple], threads: int = 1) -> list:
    """Run ``(check_id, family, params)`` jobs, optionally on a thread pool; order is preserved."""
    if threads <= 1:
        return [run_check(c, fam, p) for c, fam, p in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda job: run_check(*job), jobs))
