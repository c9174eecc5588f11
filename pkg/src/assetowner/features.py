"""Feature engineering over network identifiers.

Derives the categorical model features from each validated record: FQDN
truncated to its top-level labels, CIDR/8/16/24 networks, the MAC's OUI with
a vendor lookup, and an OS parent family. All operations are pure.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable

from .ingest import AssetRecord, normalize_mac, parse_ip

#: Model feature columns, in canonical table order. Everything downstream
#: (encoding, split scans, serialized artifacts) uses this order.
FEATURES = (
    "class_name",
    "agent_installed",
    "location",
    "system",
    "os_parent",
    "fqdn_top",
    "cidr8",
    "cidr16",
    "cidr24",
    "oui",
)


@dataclass(frozen=True)
class FeatureRow:
    """Engineered categorical features plus the owner label for one asset.

    ``os`` and ``vendor`` are display-only sidecars (EDA breakdowns and the
    dashboard); they are not among the ten model features.
    """

    class_name: str
    agent_installed: str
    location: str
    system: str
    os_parent: str
    fqdn_top: str
    cidr8: str
    cidr16: str
    cidr24: str
    oui: str
    owner: str
    os: str = ""
    vendor: str = "unknown"

    def feature(self, name: str) -> str:
        if name not in FEATURES:
            raise KeyError(name)
        return getattr(self, name)


@dataclass(frozen=True)
class OuiDirectory:
    """Normalized OUI → vendor display name."""

    entries: dict[str, str] = field(default_factory=dict)


def truncate_fqdn(fqdn: str) -> str:
    """Keep the most top-level information of an FQDN: its last three
    dot-separated labels, lowercased (fewer than three → the whole name).

    "ab1.cd2.corp.company.com" → "corp.company.com". Idempotent.
    """
    labels = fqdn.lower().split(".")
    return ".".join(labels[-3:])


def derive_cidrs(ip: str) -> tuple[str, str, str]:
    """Canonical /8, /16, /24 network strings for a dotted-quad IPv4."""
    a, b, c, _ = parse_ip(ip)
    return (f"{a}.0.0.0/8", f"{a}.{b}.0.0/16", f"{a}.{b}.{c}.0/24")


def extract_oui(mac: str) -> str:
    """First three bytes of a 6-byte MAC, as uppercase ``XX:XX:XX``.

    Accepts colon, hyphen, dot-quad, or bare-hex notation; anything that is
    not exactly six bytes raises ValueError.
    """
    return normalize_mac(mac)[:8]


def lookup_vendor(oui: str, directory: OuiDirectory) -> str:
    """Vendor display name for a normalized OUI, or "unknown"."""
    return directory.entries.get(oui, "unknown")


_OUI_LINE = re.compile(r"^([0-9A-Fa-f]{2}:[0-9A-Fa-f]{2}:[0-9A-Fa-f]{2})\t([^\t]+)(?:\t(.*))?$")


def load_manuf(source: str | Path | Iterable[str]) -> OuiDirectory:
    """Load a Wireshark-format manuf file: ``<prefix>\\t<short>\\t<vendor>``
    lines, ``#`` comments. Only exact 3-byte prefixes are kept; longer-prefix
    entries (``/28``-style) are ignored. The short column is the display name.
    """
    if isinstance(source, (str, Path)):
        lines: Iterable[str] = Path(source).read_text(encoding="utf-8").splitlines()
    else:
        lines = source
    entries: dict[str, str] = {}
    for line in lines:
        line = line.rstrip("\n")
        if not line or line.lstrip().startswith("#"):
            continue
        match = _OUI_LINE.match(line)
        if not match:
            continue  # longer prefixes, malformed rows
        entries[match.group(1).upper()] = match.group(2).strip()
    return OuiDirectory(entries)


@lru_cache(maxsize=1)
def default_directory() -> OuiDirectory:
    """The bundled IEEE-registry snapshot."""
    ref = resources.files("assetowner").joinpath("data/manuf")
    return load_manuf(ref.read_text(encoding="utf-8").splitlines())


# Keyword table mapping OS strings to parent families. Matching is
# case-insensitive on word boundaries, so "BeOS" never matches "os"-ish
# keywords and "BIOS" never matches "ios".
_OS_PARENTS: tuple[tuple[str, tuple[str, ...]], ...] = (
    ("linux", ("linux", "ubuntu", "debian", "centos", "rhel", "red hat", "fedora", "suse")),
    ("windows", ("windows",)),
    ("esx", ("esx", "esxi", "vsphere")),
    ("bsd", ("bsd", "freebsd", "openbsd", "netbsd")),
    ("macos", ("macos", "mac os", "os x", "darwin")),
    ("network-os", ("ios", "nx-os", "junos", "fortios", "pan-os", "routeros")),
)

_OS_MATCHERS = tuple(
    (parent, re.compile(r"\b(?:" + "|".join(re.escape(k) for k in kws) + r")\b", re.IGNORECASE))
    for parent, kws in _OS_PARENTS
)


def derive_os_parent(os_name: str) -> str:
    """Group an OS string under its parent family, else "other".

    "Linux kernel 2.4" → "linux"; "BeOS R5" → "other".
    """
    for parent, matcher in _OS_MATCHERS:
        if matcher.search(os_name):
            return parent
    return "other"


def engineer(record: AssetRecord, directory: OuiDirectory) -> FeatureRow:
    """Derive the full FeatureRow for one record.

    Never inspects asset_name or netbios (free-text identifiers carry no
    transferable ownership signal and explode vocabulary size).
    """
    cidr8, cidr16, cidr24 = derive_cidrs(record.ip)
    oui = extract_oui(record.mac)
    return FeatureRow(
        class_name=record.class_name,
        agent_installed=record.agent_installed,
        location=record.location,
        system=record.system,
        os_parent=derive_os_parent(record.os),
        fqdn_top=truncate_fqdn(record.fqdn),
        cidr8=cidr8,
        cidr16=cidr16,
        cidr24=cidr24,
        oui=oui,
        owner=record.owner,
        os=record.os,
        vendor=lookup_vendor(oui, directory),
    )


def engineer_all(records: Iterable[AssetRecord], directory: OuiDirectory | None = None) -> list[FeatureRow]:
    directory = directory or default_directory()
    return [engineer(r, directory) for r in records]
