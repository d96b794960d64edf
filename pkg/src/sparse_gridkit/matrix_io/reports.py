import csv
import json
import os
import sys
from typing import Any, Dict, Iterable, List, Optional, TextIO, Union

from pydantic import BaseModel

from ..schemas.bench import CSV_HEADER, BenchRecord
from ..schemas.policy import ExecPolicy
from ..schemas.report import SCHEMA_VERSION, RunManifest
from ..schemas.solver import SolverConfig

TOOL_VERSION = "0.1.0"


def ensure_parent(path: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)


def write_bench_csv(records: Iterable[BenchRecord], target: Union[str, TextIO, None] = None) -> None:
    """One row per record under the fixed CSV header (stdout when no target)"""
    rows: List[List[str]] = [record.csv_row() for record in records]
    if target is None or not isinstance(target, str):
        writer = csv.writer(target or sys.stdout, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        writer.writerows(rows)
        return
    ensure_parent(target)
    with open(target, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        writer.writerows(rows)


def to_jsonable(payload: Any) -> Any:
    if isinstance(payload, BaseModel):
        return payload.model_dump(mode="json")
    if isinstance(payload, dict):
        return {k: to_jsonable(v) for k, v in payload.items()}
    if isinstance(payload, (list, tuple)):
        return [to_jsonable(v) for v in payload]
    return payload


def json_report(payload: Any, manifest: Optional[RunManifest] = None) -> Dict[str, Any]:
    """Versioned report envelope: schema_version, manifest, result"""
    report = {"schema_version": SCHEMA_VERSION}
    if manifest is not None:
        report["manifest"] = manifest.model_dump(mode="json")
    report["result"] = to_jsonable(payload)
    return report


def write_json_report(payload: Any, path: str, manifest: Optional[RunManifest] = None) -> Dict[str, Any]:
    report = json_report(payload, manifest)
    ensure_parent(path)
    with open(path, "w") as f:
        json.dump(report, f, indent=2)
    return report


def build_manifest(
    command: str,
    argv: Optional[List[str]] = None,
    matrix_path: Optional[str] = None,
    format: Optional[str] = None,
    policy: Optional[ExecPolicy] = None,
    solver_config: Optional[SolverConfig] = None,
    seed: Optional[int] = None,
) -> RunManifest:
    return RunManifest(
        command=command,
        argv=list(argv or []),
        matrix_path=matrix_path,
        format=format,
        policy=policy.model_dump(mode="json") if policy is not None else None,
        solver_config=solver_config.model_dump(mode="json") if solver_config is not None else None,
        seed=seed,
        tool_version=TOOL_VERSION,
    )
