"""JSON artifacts and the read-only HTTP server above them.

Serialization is canonical: sorted keys, compact separators, floats fixed
to 6 significant digits, None for undefined values. Identical runs produce
identical bytes; the 6g rounding is idempotent, so write -> read -> write
is also byte-stable. The server never computes: every response body is the
exact bytes of an artifact file snapshotted at startup.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Mapping
from urllib.parse import quote, unquote

from . import SCHEMA_VERSION
from .dataset import CategoricalTable, EdaSummary, summarize
from .evaluation import (
    ConfusionMatrix,
    FamilyResult,
    IterationRecord,
    PredictionIteration,
    PredictionsTable,
    RunReport,
)


class BundleError(ValueError):
    """Malformed or incomplete artifact directory."""


# ---------------------------------------------------------------------------
# canonical JSON


def _canonical(obj):
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError(f"non-finite value in artifact: {obj!r}")
        return float(f"{obj:.6g}")
    if isinstance(obj, Mapping):
        out = {}
        for key, value in obj.items():
            if not isinstance(key, str):
                raise TypeError(f"artifact keys must be strings, got {key!r}")
            out[key] = _canonical(value)
        return out
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__} into an artifact")


def canonical_json(obj) -> bytes:
    return (
        json.dumps(_canonical(obj), sort_keys=True, separators=(",", ":")) + "\n"
    ).encode("utf-8")


def _write(path: Path, payload) -> Path:
    try:
        path.write_bytes(canonical_json(payload))
    except OSError as exc:
        raise OSError(f"failed writing artifact {path}: {exc}") from exc
    return path


# ---------------------------------------------------------------------------
# dataclass <-> dict


def _columns_to_json(columns) -> list:
    return [[name, list(vocab)] for name, vocab in columns]


def _columns_from_json(data) -> tuple:
    return tuple((name, tuple(vocab)) for name, vocab in data)


def eda_to_dict(eda: EdaSummary) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "n_rows": eda.n_rows,
        "owner_counts": dict(eda.owner_counts),
        "feature_tables": {k: dict(v) for k, v in eda.feature_tables.items()},
        "cidr16_by_cidr8": {k: dict(v) for k, v in eda.cidr16_by_cidr8.items()},
        "os_by_os_parent": {k: dict(v) for k, v in eda.os_by_os_parent.items()},
    }


def eda_from_dict(data: dict) -> EdaSummary:
    return EdaSummary(
        n_rows=int(data["n_rows"]),
        feature_tables={k: dict(v) for k, v in data["feature_tables"].items()},
        owner_counts=dict(data["owner_counts"]),
        cidr16_by_cidr8={k: dict(v) for k, v in data["cidr16_by_cidr8"].items()},
        os_by_os_parent={k: dict(v) for k, v in data["os_by_os_parent"].items()},
    )


def rows_to_dict(table: CategoricalTable) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "columns": _columns_to_json(table.columns),
        "codes": [[int(v) for v in row] for row in table.codes],
        "owners": list(table.owners),
        "os": list(table.os_display),
        "vendor": list(table.vendor_display),
    }


def rows_from_dict(data: dict) -> CategoricalTable:
    import numpy as np

    return CategoricalTable(
        columns=_columns_from_json(data["columns"]),
        codes=np.array(data["codes"], dtype=np.int32),
        owners=tuple(data["owners"]),
        os_display=tuple(data["os"]),
        vendor_display=tuple(data["vendor"]),
    )


def run_report_to_dict(report: RunReport) -> dict:
    """Everything except the predictions table, which ships in its own
    artifact cross-referenced by owner name."""
    per_family = {}
    for family, res in report.per_family.items():
        per_family[family] = {
            "per_iteration": [
                {
                    "iteration": r.iteration,
                    "chosen": dict(r.chosen),
                    "confusion": r.confusion.as_dict(),
                    "error": r.error,
                }
                for r in res.per_iteration
            ],
            "aggregated_confusion": res.aggregated_confusion.as_dict(),
            "aggregated_metrics": dict(res.aggregated_metrics),
            "mean_metrics": {k: dict(v) for k, v in res.mean_metrics.items()},
            "error_summary": dict(res.error_summary),
            "mean_importance": (
                dict(res.mean_importance) if res.mean_importance is not None else None
            ),
        }
    return {
        "schema_version": SCHEMA_VERSION,
        "owner": report.owner,
        "master_seed": report.master_seed,
        "iterations": report.iterations,
        "families": list(report.families),
        "config": report.config,
        "n_rows": report.n_rows,
        "n_positive": report.n_positive,
        "per_family": per_family,
    }


def predictions_to_dict(table: PredictionsTable) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "owner": table.owner,
        "columns": _columns_to_json(table.columns),
        "row_ids": list(table.row_ids),
        "row_codes": [list(r) for r in table.row_codes],
        "actual": list(table.actual),
        "iterations": [
            {
                "iteration": it.iteration,
                "rows": list(it.rows),
                "labels": {fam: list(v) for fam, v in it.labels.items()},
            }
            for it in table.iterations
        ],
    }


def predictions_from_dict(data: dict) -> PredictionsTable:
    return PredictionsTable(
        owner=data["owner"],
        columns=_columns_from_json(data["columns"]),
        row_ids=tuple(int(v) for v in data["row_ids"]),
        row_codes=tuple(tuple(int(v) for v in row) for row in data["row_codes"]),
        actual=tuple(int(v) for v in data["actual"]),
        iterations=tuple(
            PredictionIteration(
                iteration=int(it["iteration"]),
                rows=tuple(int(v) for v in it["rows"]),
                labels={fam: tuple(int(v) for v in vs) for fam, vs in it["labels"].items()},
            )
            for it in data["iterations"]
        ),
    )


def run_report_from_dict(data: dict, predictions: PredictionsTable) -> RunReport:
    per_family = {}
    for family, res in data["per_family"].items():
        per_family[family] = FamilyResult(
            per_iteration=tuple(
                IterationRecord(
                    iteration=int(r["iteration"]),
                    chosen=dict(r["chosen"]),
                    confusion=ConfusionMatrix(**r["confusion"]),
                    error=float(r["error"]),
                )
                for r in res["per_iteration"]
            ),
            aggregated_confusion=ConfusionMatrix(**res["aggregated_confusion"]),
            aggregated_metrics=dict(res["aggregated_metrics"]),
            mean_metrics={k: dict(v) for k, v in res["mean_metrics"].items()},
            error_summary=dict(res["error_summary"]),
            mean_importance=(
                dict(res["mean_importance"])
                if res["mean_importance"] is not None
                else None
            ),
        )
    return RunReport(
        owner=data["owner"],
        master_seed=int(data["master_seed"]),
        iterations=int(data["iterations"]),
        families=tuple(data["families"]),
        config=data["config"],
        n_rows=int(data["n_rows"]),
        n_positive=int(data["n_positive"]),
        per_family=per_family,
        predictions=predictions,
    )


# ---------------------------------------------------------------------------
# the bundle


@dataclass(eq=False)
class ArtifactBundle:
    """Everything the dashboard consumes. Files cross-reference owners by
    name only; every file carries schema_version."""

    eda: EdaSummary
    run_reports: dict = field(default_factory=dict)
    rows: CategoricalTable | None = None
    schema_version: int = SCHEMA_VERSION

    @property
    def predictions(self) -> dict:
        return {owner: report.predictions for owner, report in self.run_reports.items()}


def build_bundle(table: CategoricalTable, reports: Mapping[str, RunReport]) -> ArtifactBundle:
    return ArtifactBundle(eda=summarize(table), run_reports=dict(reports), rows=table)


def owner_slug(owner: str) -> str:
    return quote(owner, safe="")


def write_artifacts(bundle: ArtifactBundle, directory) -> list[Path]:
    """Write the bundle's files; returns the written paths sorted. Same
    bundle twice -> identical bytes."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = [
        _write(directory / "eda_summary.json", eda_to_dict(bundle.eda)),
        _write(
            directory / "owners.json",
            {
                "schema_version": SCHEMA_VERSION,
                "owners": sorted(bundle.run_reports),
            },
        ),
    ]
    if bundle.rows is not None:
        written.append(_write(directory / "feature_rows.json", rows_to_dict(bundle.rows)))
    for owner in sorted(bundle.run_reports):
        report = bundle.run_reports[owner]
        slug = owner_slug(owner)
        written.append(
            _write(directory / f"report_{slug}.json", run_report_to_dict(report))
        )
        written.append(
            _write(
                directory / f"predictions_{slug}.json",
                predictions_to_dict(report.predictions),
            )
        )
    return sorted(written)


def _load_json(path: Path) -> dict:
    if not path.is_file():
        raise BundleError(f"missing artifact file: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise BundleError(f"unparseable artifact {path}: {exc}") from exc
    if not isinstance(data, dict) or data.get("schema_version") != SCHEMA_VERSION:
        raise BundleError(
            f"artifact {path} has schema_version "
            f"{data.get('schema_version')!r}, expected {SCHEMA_VERSION}"
        )
    return data


def read_bundle(directory) -> ArtifactBundle:
    directory = Path(directory)
    eda = eda_from_dict(_load_json(directory / "eda_summary.json"))
    owners = _load_json(directory / "owners.json")["owners"]
    rows = None
    rows_path = directory / "feature_rows.json"
    if rows_path.is_file():
        rows = rows_from_dict(_load_json(rows_path))
    run_reports = {}
    for owner in owners:
        slug = owner_slug(owner)
        predictions = predictions_from_dict(
            _load_json(directory / f"predictions_{slug}.json")
        )
        report = run_report_from_dict(
            _load_json(directory / f"report_{slug}.json"), predictions
        )
        if report.owner != owner:
            raise BundleError(
                f"owner mismatch: file for {owner!r} reports {report.owner!r}"
            )
        run_reports[owner] = report
    return ArtifactBundle(eda=eda, run_reports=run_reports, rows=rows)


# ---------------------------------------------------------------------------
# the server

_CONTENT_TYPES = {
    ".json": "application/json",
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".svg": "image/svg+xml",
    ".map": "application/json",
    ".ico": "image/x-icon",
}


def _snapshot(directory: Path, static_dir: Path | None) -> dict[str, tuple[bytes, str]]:
    """Load every byte the server will ever send. Startup fails loudly on a
    malformed bundle; after this the server only routes."""
    read_bundle(directory)  # validation only; raises BundleError when broken
    routes: dict[str, tuple[bytes, str]] = {}
    routes["/api/eda"] = ((directory / "eda_summary.json").read_bytes(), "application/json")
    owners_bytes = (directory / "owners.json").read_bytes()
    routes["/api/owners"] = (owners_bytes, "application/json")
    if (directory / "feature_rows.json").is_file():
        routes["/api/rows"] = (
            (directory / "feature_rows.json").read_bytes(),
            "application/json",
        )
    owners = json.loads(owners_bytes)["owners"]
    for owner in owners:
        slug = owner_slug(owner)
        routes[f"/api/report/{slug}"] = (
            (directory / f"report_{slug}.json").read_bytes(),
            "application/json",
        )
        routes[f"/api/predictions/{slug}"] = (
            (directory / f"predictions_{slug}.json").read_bytes(),
            "application/json",
        )
    if static_dir is not None and static_dir.is_dir():
        for path in sorted(static_dir.rglob("*")):
            if not path.is_file():
                continue
            rel = path.relative_to(static_dir).as_posix()
            ctype = _CONTENT_TYPES.get(path.suffix.lower(), "application/octet-stream")
            routes[f"/{rel}"] = (path.read_bytes(), ctype)
        if "/index.html" in routes:
            routes["/"] = routes["/index.html"]
    return routes


def serve(
    directory,
    address: tuple[str, int] = ("127.0.0.1", 8765),
    *,
    static_dir=None,
) -> ThreadingHTTPServer:
    """Build the server (not yet running; call serve_forever or use it from
    a thread). GET-only; unknown paths and owners get 404; every body is an
    immutable startup snapshot."""
    directory = Path(directory)
    if static_dir is None:
        candidate = directory / "dashboard"
        static_dir = candidate if candidate.is_dir() else None
    else:
        static_dir = Path(static_dir)
    routes = _snapshot(directory, static_dir)

    class Handler(BaseHTTPRequestHandler):
        server_version = "assetowner"

        def log_message(self, *args):  # tests and CLI runs stay quiet
            pass

        def do_GET(self):  # noqa: N802 (http.server API)
            path = unquote(self.path.split("?", 1)[0])
            # owner segments arrive percent-decoded; re-encode to match keys
            if path.startswith("/api/report/") or path.startswith("/api/predictions/"):
                prefix, _, owner = path.rpartition("/")
                path = f"{prefix}/{owner_slug(owner)}"
            entry = routes.get(path)
            if entry is None:
                self.send_error(404, "no such artifact")
                return
            body, ctype = entry
            self.send_response(200)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_POST(self):  # noqa: N802
            self.send_error(405, "read-only service")

    server = ThreadingHTTPServer(address, Handler)
    server.daemon_threads = True
    return server


def serve_in_thread(server: ThreadingHTTPServer) -> threading.Thread:
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return thread
