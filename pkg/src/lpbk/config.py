"""Job configuration documents: schema validation and defaults."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import jsonschema

from .errors import ConfigError, InvalidParams
from .harness.checks import CATALOG, canonical_params
from .spaces import SpaceParams
from .spectral import PRESETS, GridSpec, as_extended

__all__ = ["JobConfig", "CheckSpec", "parse_config", "load_schema"]


@lru_cache(maxsize=1)
def load_schema() -> dict:
    return json.loads(resources.files("lpbk.schema").joinpath("job.schema.json").read_text())


@dataclass(frozen=True)
class CheckSpec:
    id: str
    params: dict = field(default_factory=dict)
    family: dict | None = None


@dataclass(frozen=True)
class JobConfig:
    command: str
    grid: GridSpec = field(default_factory=GridSpec)
    preset: str | None = None
    preset_params: dict = field(default_factory=dict)
    sample_path: str | None = None
    spaces: tuple = ()
    checks: tuple = ()
    bands_s: float | None = None
    bands_p: float = 2.0
    dump_partition: bool = False
    op: str | None = None
    op_params: dict = field(default_factory=dict)
    cutoff: str = "exp"
    zero_bands: tuple = ()
    output_path: str | None = None
    output_format: str | None = None
    seed: int | None = None

    @property
    def has_source(self) -> bool:
        return self.preset is not None or self.sample_path is not None


def _join(parts) -> str:
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out


def _path(err: jsonschema.ValidationError) -> str:
    """Dotted path of the offending field, including a missing or unexpected key."""
    parts = list(err.absolute_path)
    if err.validator == "required" and isinstance(err.instance, dict):
        missing = [k for k in err.validator_value if k not in err.instance]
        parts += missing[:1]
    elif err.validator == "additionalProperties" and isinstance(err.instance, dict):
        known = set(err.schema.get("properties", {}))
        extra = sorted(k for k in err.instance if k not in known)
        parts += extra[:1]
    return _join(parts) or "<root>"


def _best_error(errors) -> jsonschema.ValidationError:
    return jsonschema.exceptions.best_match(errors)


def parse_config(text: str) -> JobConfig:
    """Validate a JSON job document and fill defaults (grid N=256, L=2 pi, dim 1)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"<root>: not valid JSON ({exc})") from None
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = list(validator.iter_errors(doc))
    if errors:
        err = _best_error(errors)
        raise ConfigError(f"{_path(err)}: {err.message}")

    try:
        grid = GridSpec(**doc.get("grid", {}))
    except InvalidParams as exc:
        raise ConfigError(f"grid: {exc}") from None

    preset = doc.get("preset")
    if preset is not None and preset not in PRESETS:
        raise ConfigError(f"preset: unknown preset {preset!r}; known: {sorted(PRESETS)}")
    sample = doc.get("sample", {}).get("path")
    command = doc["command"]
    if command in ("norm", "bands", "op"):
        if (preset is None) == (sample is None):
            raise ConfigError(f"preset/sample: command {command!r} needs exactly one function source")
    elif preset is not None and sample is not None:
        raise ConfigError("preset/sample: give at most one function source")
    if "params" in doc and preset is None:
        raise ConfigError("params: preset parameters given without a preset")

    spaces = []
    for i, sp in enumerate(doc.get("spaces", [])):
        try:
            spaces.append((SpaceParams(sp["s"], sp["p"], sp["q"], sp["kind"]), int(sp.get("j_split", 0))))
        except InvalidParams as exc:
            raise ConfigError(f"spaces[{i}]: {exc}") from None
    if command == "norm" and not spaces:
        raise ConfigError("spaces: norm command needs at least one space")

    checks = []
    for i, c in enumerate(doc.get("checks", [])):
        spec = CheckSpec(c) if isinstance(c, str) else CheckSpec(c["id"], dict(c.get("params", {})), c.get("family"))
        if spec.id not in CATALOG:
            raise ConfigError(f"checks[{i}]: unknown check {spec.id!r}; known: {sorted(CATALOG)}")
        try:
            canonical_params(spec.id, spec.params)
        except InvalidParams as exc:
            raise ConfigError(f"checks[{i}].params: {exc}") from None
        checks.append(spec)
    if command == "verify" and not checks:
        raise ConfigError("checks: verify needs at least one check id")

    op = doc.get("op", {})
    if command == "op" and not op:
        raise ConfigError("op: op command needs an operator")
    bands = doc.get("bands", {})
    part = doc.get("partition", {})
    out = doc.get("output", {})
    fmt = out.get("format")
    if fmt == "bin" and command != "op":
        raise ConfigError("output.format: 'bin' is only available for op jobs")
    return JobConfig(
        command=command,
        grid=grid,
        preset=preset,
        preset_params=dict(doc.get("params", {})),
        sample_path=sample,
        spaces=tuple(spaces),
        checks=tuple(checks),
        bands_s=bands.get("s"),
        bands_p=as_extended(bands.get("p", 2.0)),
        dump_partition=bool(bands.get("dump_partition", False)),
        op=op.get("name"),
        op_params=dict(op.get("params", {})),
        cutoff=part.get("cutoff", "exp"),
        zero_bands=tuple(part.get("zero_bands", ())),
        output_path=out.get("path"),
        output_format=fmt,
        seed=doc.get("seed"),
    )
