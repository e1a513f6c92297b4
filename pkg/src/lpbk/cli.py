"""Batch front end: ``lpbk --config job.json --out DIR``.

Exit status is 0 on success, 1 when a verification check fails and 2 for
configuration or I/O errors.  Every output file is written atomically and
JSON output is canonical, so repeated runs of one config are byte-identical.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .config import JobConfig, parse_config
from .errors import ConfigError, LPBKError
from .harness.checks import CATALOG, partition_for, run_check, run_checks
from .harness.families import FunctionFamily
from .io import atomic_write, dumps_canonical, field_to_csv, read_field, write_field_binary
from .operators import heat, lift, maximal_op, riesz
from .partition import DyadicPartition, partition_csv
from .spaces import band_project, difference, high_low_split, space_norm
from .spectral import SampledField, lp_norm, sample_preset

__all__ = ["run_job", "main", "JobResult"]

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG = 0, 1, 2


@dataclass
class JobResult:
    status: int
    files: list = field(default_factory=list)
    message: str = ""


def _partition(cfg: JobConfig) -> DyadicPartition:
    part = partition_for(cfg.grid, cfg.cutoff)
    for j in cfg.zero_bands:
        if j not in part.band_range:
            raise ConfigError(f"partition.zero_bands: band {j} outside [{part.j_min}, {part.j_max}]")
        part = part.with_band(j, 0.0)
    return part


def _source(cfg: JobConfig, base: Path) -> SampledField:
    if cfg.preset is not None:
        params = dict(cfg.preset_params)
        if cfg.seed is not None and cfg.preset == "random_bandlimited":
            params.setdefault("seed", cfg.seed)
        try:
            return sample_preset(cfg.preset, params, cfg.grid)
        except (LPBKError, TypeError) as exc:
            raise ConfigError(f"params: {exc}") from None
    path = Path(cfg.sample_path)
    if not path.is_absolute():
        path = base / path
    try:
        return read_field(path, cfg.grid)
    except OSError as exc:
        raise ConfigError(f"sample.path: cannot read {path}: {exc.strerror}") from None
    except LPBKError as exc:
        raise ConfigError(f"sample.path: {exc}") from None


def _norm_doc(cfg: JobConfig, f: SampledField, part: DyadicPartition) -> list:
    return [
        {**space_norm(f, sp, part, j_split).to_dict(), "j_split": j_split}
        for sp, j_split in cfg.spaces
    ]


def _band_rows(cfg: JobConfig, f: SampledField, part: DyadicPartition) -> list:
    s = 0.0 if cfg.bands_s is None else float(cfg.bands_s)
    rows = []
    for j in part.band_range:
        term = 2.0 ** (j * s) * lp_norm(band_project(f, part, j), cfg.bands_p)
        rows.append((j, term))
    return rows


def _bands_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["j", "weighted_energy"])
    for j, t in rows:
        w.writerow([j, format(float(t), ".17g")])
    return buf.getvalue()


def _apply_op(cfg: JobConfig, f: SampledField, part: DyadicPartition) -> SampledField:
    p = cfg.op_params
    name = cfg.op
    try:
        if name == "lift":
            return lift(f, float(p.get("alpha", 1.0)))
        if name == "riesz":
            return riesz(f, int(p.get("axis", 1)))
        if name == "heat":
            return heat(f, float(p.get("t", 1.0)))
        if name == "maximal":
            return maximal_op(f, float(p.get("eta", 1.0)))
        if name == "band_project":
            return band_project(f, part, int(p["j"]))
        if name in ("high_part", "low_part"):
            low, high = high_low_split(f, part, int(p.get("j_split", 0)))
            return high if name == "high_part" else low
        if name == "difference":
            y = p.get("y", [1] * cfg.grid.dim)
            return difference(f, y, int(p.get("m", 1)))
    except KeyError as exc:
        raise ConfigError(f"op.params: missing {exc.args[0]!r}") from None
    except LPBKError as exc:
        raise ConfigError(f"op.params: {exc}") from None
    raise ConfigError(f"op.name: unknown operator {name!r}")


def _field_doc(f: SampledField) -> dict:
    return {
        "grid": f.grid.to_dict(),
        "re": np.asarray(f.values.real).tolist(),
        "im": np.asarray(f.values.imag).tolist(),
    }


def _check_jobs(cfg: JobConfig) -> list:
    jobs = []
    for i, spec in enumerate(cfg.checks):
        cdef = CATALOG[spec.id]
        fam = dict(spec.family or {})
        try:
            family = FunctionFamily(
                fam.get("generator", cdef.family),
                int(fam.get("seed", cfg.seed if cfg.seed is not None else 0)),
                int(fam.get("count", 20)),
                cfg.grid,
                dict(fam.get("params", {})),
            )
        except LPBKError as exc:
            raise ConfigError(f"checks[{i}].family: {exc}") from None
        jobs.append((spec.id, family, spec.params))
    return jobs


def _run_checks(cfg: JobConfig, part: DyadicPartition, threads: int) -> list:
    jobs = _check_jobs(cfg)
    if cfg.zero_bands or cfg.cutoff != "exp":
        # a custom partition cannot go through the cached default
        return [run_check(c, fam, p, partition=part) for c, fam, p in jobs]
    return run_checks(jobs, threads)


def run_job(cfg: JobConfig, out_dir=".", threads: int = 1, base_dir=".") -> JobResult:
    """Execute a parsed job and write its report files under ``out_dir``.

    Raises :class:`ConfigError` for problems detected while running (bad
    operator parameters, unreadable sample file); :func:`main` maps that
    to exit status 2.
    """
    out_dir = Path(out_dir)
    base = Path(base_dir)
    part = _partition(cfg)
    files: list = []

    def emit(default_name: str, text_or_bytes) -> None:
        name = cfg.output_path or default_name
        files.append(atomic_write(out_dir / name, text_or_bytes))

    cmd = cfg.command
    if cmd == "norm":
        f = _source(cfg, base)
        emit("norm.json", dumps_canonical({"command": "norm", "grid": cfg.grid.to_dict(),
                                           "reports": _norm_doc(cfg, f, part)}) + "\n")
        return JobResult(EXIT_OK, files)

    if cmd == "bands":
        f = _source(cfg, base)
        rows = _band_rows(cfg, f, part)
        if cfg.output_format == "json":
            emit("bands.json", dumps_canonical({"command": "bands", "rows": [list(r) for r in rows]}) + "\n")
        else:
            emit("bands.csv", _bands_csv(rows))
        if cfg.dump_partition:
            files.append(atomic_write(out_dir / "partition.csv", partition_csv(part)))
        return JobResult(EXIT_OK, files)

    if cmd == "op":
        g = _apply_op(cfg, _source(cfg, base), part)
        fmt = cfg.output_format or "json"
        if fmt == "bin":
            emit("op.bin", write_field_binary(g))
        elif fmt == "csv":
            emit("op.csv", field_to_csv(g))
        else:
            emit("op.json", dumps_canonical({"command": "op", "op": cfg.op, "params": cfg.op_params,
                                             "field": _field_doc(g)}) + "\n")
        return JobResult(EXIT_OK, files)

    if cmd == "verify":
        reports = _run_checks(cfg, part, threads)
        for i, rep in enumerate(reports):
            name = f"verify_{rep.check}.json"
            if sum(1 for r in reports if r.check == rep.check) > 1:
                name = f"verify_{rep.check}_{i}.json"
            files.append(atomic_write(out_dir / name, dumps_canonical(rep.to_dict()) + "\n"))
        failed = [r.check for r in reports if not r.passed]
        status = EXIT_CHECK_FAILED if failed else EXIT_OK
        return JobResult(status, files, f"failed: {', '.join(failed)}" if failed else "")

    # report: everything the config asks for, in one document
    doc: dict = {"command": "report", "grid": cfg.grid.to_dict()}
    if cfg.has_source:
        f = _source(cfg, base)
        doc["source"] = {"preset": cfg.preset, "params": cfg.preset_params, "sample": cfg.sample_path}
        if cfg.spaces:
            doc["norms"] = _norm_doc(cfg, f, part)
        doc["bands"] = [list(r) for r in _band_rows(cfg, f, part)]
    failed = []
    if cfg.checks:
        reports = _run_checks(cfg, part, threads)
        doc["checks"] = [r.to_dict() for r in reports]
        failed = [r.check for r in reports if not r.passed]
    doc["pass"] = not failed
    emit("report.json", dumps_canonical(doc) + "\n")
    return JobResult(EXIT_CHECK_FAILED if failed else EXIT_OK, files,
                     f"failed: {', '.join(failed)}" if failed else "")


def _threads(arg: int | None) -> int:
    if arg is not None:
        return arg
    env = os.environ.get("LPBK_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"LPBK_THREADS: expected an integer, got {env!r}") from None
    return 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lpbk", description="Littlewood-Paley norms, operators and checks.")
    ap.add_argument("--config", required=True, type=Path, help="JSON job file")
    ap.add_argument("--out", type=Path, default=Path("."), help="output directory (default: .)")
    ap.add_argument("--seed", type=int, help="override the job seed")
    ap.add_argument("--threads", type=int, help="worker threads for the check catalog (env: LPBK_THREADS)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"--config: cannot read {args.config}: {exc.strerror}") from None
        cfg = parse_config(text)
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        result = run_job(cfg, args.out, _threads(args.threads), base_dir=args.config.parent)
    except ConfigError as exc:
        print(f"lpbk: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"lpbk: write failed: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for path in result.files:
        print(path)
    if result.message:
        print(f"lpbk: {result.message}", file=sys.stderr)
    return result.status


if __name__ == "__main__":
    raise SystemExit(main())
