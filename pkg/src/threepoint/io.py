"""Reading and writing configurations, kernels, reports and run manifests.

JSON is the canonical format: sorted keys, doubles written in their shortest
round-trip form, so a configuration read back is bit-identical. CSV is
export-only and written with polars.
"""

from __future__ import annotations

import hashlib
import json
import logging
import shlex
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

import numpy as np
import polars as pl

from src.threepoint.certify import CertReport, PackingReport
from src.threepoint.data import MC_GENERATOR
from src.threepoint.energy import EnergyReport, McEstimate
from src.threepoint.errors import ConfigError, KernelError, OutputError
from src.threepoint.geometry import WeightedConfig, validate_config
from src.threepoint.kernels import KernelSpec
from src.threepoint.optimize import OptimizerResult, PackingSearchResult

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
Report = Union[
    EnergyReport, CertReport, PackingReport, McEstimate, OptimizerResult, PackingSearchResult
]


# =============================================================================
# JSON
# =============================================================================

def _to_jsonable(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"{type(obj).__name__} is not JSON serializable")


def canonical_json(obj: Any) -> str:
    """Sorted keys, two-space indent, numpy values converted."""
    return json.dumps(obj, sort_keys=True, indent=2, default=_to_jsonable) + "\n"


def _write_text(path: PathLike, text: str) -> Path:
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write {target}: {exc}") from exc
    logger.info("wrote %s", target)
    return target


def read_json(path: PathLike) -> Any:
    """Parse a JSON file.

    Raises:
        ConfigError: missing file or invalid JSON
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError as exc:
        raise ConfigError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def read_config(path: PathLike) -> WeightedConfig:
    """Load and validate {"dim", "points", "weights"?} from a JSON file."""
    return validate_config(read_json(path))


def write_config(cfg: WeightedConfig, path: PathLike) -> Path:
    return _write_text(path, canonical_json(cfg.to_dict()))


def load_kernel(arg: str, dim: int) -> KernelSpec:
    """Kernel from a JSON file path or an inline JSON object.

    Example:
        >>> load_kernel('{"kind": "pframe", "p": 1}', 4).describe()
        '|uvt|^1 (d=4)'
    """
    text = arg.strip()
    if text.startswith("{"):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise KernelError(f"inline kernel is not valid JSON: {exc}") from exc
    else:
        raw = read_json(text)
    if not isinstance(raw, Mapping):
        raise KernelError("kernel must be a JSON object")
    return KernelSpec.from_dict(raw, dim)


# =============================================================================
# REPORTS
# =============================================================================

def report_frame(report: Union[Report, Sequence[CertReport]]) -> pl.DataFrame:
    """Flat table for CSV export.

    Optimizer results flatten to their energy trace (iter, epsilon, energy);
    check batches to one row per check.
    """
    if isinstance(report, OptimizerResult):
        return pl.DataFrame(
            {
                "iter": [e.iteration for e in report.energy_trace],
                "epsilon": [e.epsilon for e in report.energy_trace],
                "energy": [e.energy for e in report.energy_trace],
            },
            schema={"iter": pl.Int64, "epsilon": pl.Float64, "energy": pl.Float64},
        )
    if isinstance(report, (list, tuple)):
        return pl.DataFrame(
            {
                "name": [r.name for r in report],
                "passed": [r.passed for r in report],
                "max_residual": [r.max_residual for r in report],
                "tolerance": [r.tolerance for r in report],
                "note": [r.note or "" for r in report],
            },
            schema={
                "name": pl.Utf8,
                "passed": pl.Boolean,
                "max_residual": pl.Float64,
                "tolerance": pl.Float64,
                "note": pl.Utf8,
            },
        )
    flat = {k: v for k, v in report.to_dict().items() if not isinstance(v, (dict, list))}
    return pl.DataFrame([flat])


def export_report(
    report: Union[Report, Sequence[CertReport]], fmt: str, path: PathLike
) -> Path:
    """Write a report as canonical JSON or as CSV.

    A sequence of CertReports becomes a JSON array in request order.

    Args:
        report: any report type, or a list of CertReports
        fmt: "json" or "csv"
        path: target file; parent directories are created

    Returns:
        the written path

    Raises:
        ConfigError: unknown format
        OutputError: the path cannot be written

    Example:
        >>> export_report(check_packing(gen_crosspolytope(3)), "csv", "packing.csv")
        PosixPath('packing.csv')
    """
    if fmt == "json":
        if isinstance(report, (list, tuple)):
            payload: Any = [r.to_dict() for r in report]
        else:
            payload = report.to_dict()
        return _write_text(path, canonical_json(payload))
    if fmt == "csv":
        frame = report_frame(report)
        target = Path(path)
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            frame.write_csv(target)
        except OSError as exc:
            raise OutputError(f"cannot write {target}: {exc}") from exc
        logger.info("wrote %s (%d rows)", target, frame.height)
        return target
    raise ConfigError(f"unknown report format {fmt!r}; use json or csv")


def format_report_table(reports: Sequence[CertReport]) -> str:
    """Format check results as a markdown table.

    Example:
        >>> print(format_report_table(run_checks(cfg, ["isotropic", "balanced"])))
    """
    lines = [
        "| Check | Result | Max residual | Tolerance | Note |",
        "|-------|--------|--------------|-----------|------|",
    ]
    for r in reports:
        result = "pass" if r.passed else "FAIL"
        lines.append(
            f"| {r.name} | {result} | {r.max_residual:.3e} | {r.tolerance:.1e} | {r.note or ''} |"
        )
    return "\n".join(lines)


# =============================================================================
# MANIFESTS
# =============================================================================

def file_digest(path: PathLike) -> str:
    """Content hash of a file, as "sha256:<hex>"."""
    h = hashlib.sha256()
    try:
        with open(path, "rb") as f:
            for block in iter(lambda: f.read(1 << 16), b""):
                h.update(block)
    except FileNotFoundError as exc:
        raise ConfigError(f"no such file: {path}") from exc
    return f"sha256:{h.hexdigest()}"


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    """What produced a set of outputs, enough to rerun it.

    Attributes:
        tool_version: package version
        subcommand: the parsed subcommand (gen, certify, ...)
        command: the full command line, as `threepoint <argv>`
        seeds: every seed the run consumed
        input_digests: {input path: "sha256:<hex>"}
        started_at, finished_at: ISO-8601 UTC timestamps
        output_paths: files written by the run
        generator: random bit generator behind the seeds
        threads: declared thread count
    """

    tool_version: str
    subcommand: str
    command: str
    seeds: List[int] = field(default_factory=list)
    input_digests: Dict[str, str] = field(default_factory=dict)
    started_at: str = field(default_factory=utc_now)
    finished_at: Optional[str] = None
    output_paths: List[str] = field(default_factory=list)
    generator: str = MC_GENERATOR
    threads: int = 1

    @classmethod
    def start(cls, subcommand: str, argv: Sequence[str], threads: int = 1) -> "RunManifest":
        from src.threepoint import __version__

        command = shlex.join(["threepoint", *argv])
        return cls(
            tool_version=__version__, subcommand=subcommand, command=command, threads=threads
        )

    def add_input(self, path: PathLike) -> None:
        self.input_digests[str(path)] = file_digest(path)

    def add_output(self, path: PathLike) -> None:
        self.output_paths.append(str(path))

    def to_dict(self) -> dict:
        return asdict(self)


def manifest_path(output: PathLike) -> Path:
    """Manifest written next to an output: results.json -> results.json.manifest.json."""
    out = Path(output)
    return out.with_name(out.name + ".manifest.json")


def write_manifest(manifest: RunManifest, output: PathLike) -> Path:
    """Stamp the finish time and write the manifest beside `output`."""
    manifest.finished_at = utc_now()
    return _write_text(manifest_path(output), canonical_json(manifest.to_dict()))
