"""CMDB export parsing and validation.

Turns a raw CSV export into clean ``AssetRecord`` objects plus a list of
``IngestIssue`` diagnostics. Rows whose network identifiers cannot be
validated are dropped (the downstream features are derived from them, so
imputation would poison the models); recoverable gaps are kept and flagged.
"""

from __future__ import annotations

import csv
import io
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

COLUMNS = (
    "asset_name",
    "netbios",
    "os",
    "class_name",
    "fqdn",
    "ip",
    "mac",
    "agent_installed",
    "location",
    "system",
    "owner",
    "tags",
)

UNLABELED = ""


class IngestError(ValueError):
    """Unrecoverable ingest failure (bad header, empty file, fail-fast row)."""


@dataclass(frozen=True)
class IngestConfig:
    """Knobs for `parse_export`.

    fail_fast: raise on the first row that would otherwise be skipped.
    """

    fail_fast: bool = False


@dataclass(frozen=True)
class AssetRecord:
    """One validated CMDB inventory row.

    ``owner == ""`` is the single representation of an unlabeled asset.
    ``mac`` keeps the notation it arrived in; it is guaranteed normalizable
    to exactly six bytes (see `normalize_mac`).
    """

    asset_name: str
    netbios: str
    os: str
    class_name: str
    fqdn: str
    ip: str
    mac: str
    agent_installed: str
    location: str
    system: str
    owner: str
    tags: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class IngestIssue:
    """Diagnostic attached to a 0-based data row of the source file."""

    row_index: int
    field: str
    reason: str
    severity: str  # "skip_row" | "default_applied"


_IP_PART = re.compile(r"0|[1-9][0-9]{0,2}")


def parse_ip(ip: str) -> tuple[int, int, int, int]:
    """Validate a dotted-quad IPv4 string and return its four octets.

    Strict form: four decimal octets 0..255, no leading zeros, no whitespace.
    Raises ValueError otherwise.
    """
    parts = ip.split(".")
    if len(parts) != 4:
        raise ValueError(f"expected 4 octets, got {len(parts)}: {ip!r}")
    octets = []
    for part in parts:
        if not _IP_PART.fullmatch(part):
            raise ValueError(f"bad octet {part!r} in {ip!r}")
        value = int(part)
        if value > 255:
            raise ValueError(f"octet {value} out of range in {ip!r}")
        octets.append(value)
    return tuple(octets)  # type: ignore[return-value]


_HEX_PAIR = re.compile(r"[0-9A-Fa-f]{2}")


def normalize_mac(mac: str) -> str:
    """Normalize a 6-byte MAC in colon / hyphen / dot-quad / bare-hex
    notation to uppercase colon form ``AA:BB:CC:DD:EE:FF``.

    Raises ValueError when the input is not exactly six bytes.
    """
    raw = mac.strip()
    if ":" in raw:
        parts = raw.split(":")
    elif "-" in raw:
        parts = raw.split("-")
    elif "." in raw:
        quads = raw.split(".")
        if not all(len(q) == 4 and re.fullmatch(r"[0-9A-Fa-f]{4}", q) for q in quads):
            raise ValueError(f"bad dot-quad MAC: {mac!r}")
        parts = [p for q in quads for p in (q[:2], q[2:])]
    else:
        if not re.fullmatch(r"[0-9A-Fa-f]*", raw):
            raise ValueError(f"bad MAC: {mac!r}")
        parts = [raw[i : i + 2] for i in range(0, len(raw), 2)]
    if len(parts) != 6 or not all(_HEX_PAIR.fullmatch(p) for p in parts):
        raise ValueError(f"MAC must be exactly 6 bytes: {mac!r}")
    return ":".join(p.upper() for p in parts)


def validate_fqdn(fqdn: str) -> str:
    """Check an FQDN has ≥1 label and no empty labels; returns it unchanged."""
    name = fqdn.strip()
    if not name or any(not label for label in name.split(".")):
        raise ValueError(f"bad fqdn: {fqdn!r}")
    return name


def parse_tags(raw: str) -> dict[str, str]:
    """Parse a tag cell: ``pair (";" pair)*`` with ``pair = key ":" value``.

    Keys are lowercased and trimmed; values trimmed (a value may contain
    ``:``, the split is on the first one). Later duplicates of a key win.
    Separator-less segments are ignored (`parse_export` counts them).
    """
    return _parse_tags_verbose(raw)[0]


def _parse_tags_verbose(raw: str) -> tuple[dict[str, str], int]:
    tags: dict[str, str] = {}
    dropped = 0
    for segment in raw.split(";"):
        if not segment.strip():
            continue
        key, sep, value = segment.partition(":")
        if not sep or not key.strip():
            dropped += 1
            continue
        tags[key.strip().lower()] = value.strip()
    return tags, dropped


def format_tags(tags: dict[str, str]) -> str:
    """Serialize a tag map to the cell grammar, keys sorted.

    Raises ValueError for values the grammar cannot represent.
    """
    parts = []
    for key in sorted(tags):
        value = tags[key]
        if ":" in key or ";" in key or not key.strip():
            raise ValueError(f"unrepresentable tag key: {key!r}")
        if ";" in value:
            raise ValueError(f"tag value for {key!r} contains ';'")
        parts.append(f"{key}:{value}")
    return ";".join(parts)


def _reader(source: str | os.PathLike | Iterable[str]) -> Iterator[list[str]]:
    if isinstance(source, os.PathLike):
        source = io.StringIO(Path(source).read_text(encoding="utf-8"))
    elif isinstance(source, str):
        source = io.StringIO(source)
    return csv.reader(source)


def parse_export(
    source: str | os.PathLike | Iterable[str], config: IngestConfig | None = None
) -> tuple[list[AssetRecord], list[IngestIssue]]:
    """Parse a CMDB CSV export into validated records plus diagnostics.

    Parameters
    ----------
    source : CSV text, a path to a CSV file, or a character stream.
    config : optional IngestConfig.

    Returns
    -------
    (records, issues) : row order preserved; every dropped row is reported
    by exactly one ``skip_row`` issue, so
    ``len(records) + #skip_row == data rows``.

    Raises
    ------
    IngestError : empty input, or header missing a mandatory column.
    """
    config = config or IngestConfig()
    rows = _reader(source)
    try:
        header = next(rows)
    except StopIteration:
        raise IngestError("empty export: no header row") from None
    header = [h.strip() for h in header]
    missing = [c for c in COLUMNS if c not in header]
    if missing:
        raise IngestError(f"header missing mandatory column(s): {', '.join(missing)}")
    col = {name: header.index(name) for name in COLUMNS}

    records: list[AssetRecord] = []
    issues: list[IngestIssue] = []

    def skip(index: int, fname: str, reason: str) -> None:
        if config.fail_fast:
            raise IngestError(f"row {index}: {fname}: {reason}")
        issues.append(IngestIssue(index, fname, reason, "skip_row"))

    for index, row in enumerate(rows):
        if len(row) < len(header):
            skip(index, "row", f"expected {len(header)} cells, got {len(row)}")
            continue
        cell = {name: row[col[name]].strip() for name in COLUMNS}

        try:
            parse_ip(cell["ip"])
        except ValueError as exc:
            skip(index, "ip", str(exc))
            continue
        try:
            normalize_mac(cell["mac"])
        except ValueError as exc:
            skip(index, "mac", str(exc))
            continue
        try:
            fqdn = validate_fqdn(cell["fqdn"])
        except ValueError as exc:
            skip(index, "fqdn", str(exc))
            continue
        agent = cell["agent_installed"].lower()
        if agent not in ("yes", "no"):
            skip(index, "agent_installed", f"expected yes/no, got {cell['agent_installed']!r}")
            continue

        if not cell["netbios"]:
            issues.append(IngestIssue(index, "netbios", "empty netbios kept", "default_applied"))
        owner = cell["owner"].lower()
        if not owner:
            issues.append(IngestIssue(index, "owner", "unlabeled row kept", "default_applied"))
        tags, dropped = _parse_tags_verbose(cell["tags"])
        if dropped:
            issues.append(
                IngestIssue(
                    index, "tags", f"{dropped} segment(s) without key:value separator", "default_applied"
                )
            )

        records.append(
            AssetRecord(
                asset_name=cell["asset_name"],
                netbios=cell["netbios"],
                os=cell["os"],
                class_name=cell["class_name"],
                fqdn=fqdn,
                ip=cell["ip"],
                mac=cell["mac"],
                agent_installed=agent,
                location=cell["location"],
                system=cell["system"],
                owner=owner,
                tags=tags,
            )
        )
    return records, issues


def serialize_records(records: Iterable[AssetRecord]) -> str:
    """Render records back to the export CSV schema (header first, ``\\n``
    endings, RFC-4180 quoting). Re-parsing the output reproduces the records
    field for field."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in records:
        writer.writerow(
            [
                r.asset_name,
                r.netbios,
                r.os,
                r.class_name,
                r.fqdn,
                r.ip,
                r.mac,
                r.agent_installed,
                r.location,
                r.system,
                r.owner,
                format_tags(r.tags),
            ]
        )
    return out.getvalue()
