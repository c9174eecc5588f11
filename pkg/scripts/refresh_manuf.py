#!/usr/bin/env python3
"""Rebuild the bundled OUI->vendor snapshot (Wireshark manuf format).

Input: a JSON dump of the IEEE MA-L registry mapping 6-hex-digit OUIs to
registrant text (first line = organization name, remaining lines = address),
e.g. the `index.json` shipped in the npm package `oui-data`.

Output: src/assetowner/data/manuf with lines `XX:XX:XX\t<short>\t<vendor>`.
Only exact 3-byte assignments are emitted; the short column is the
organization name with corporate suffixes stripped.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

# Legal/corporate noise dropped when deriving the short display name.
_STOPWORDS = {
    "a", "an", "the", "and", "of",
    "inc", "incorporated", "corp", "corporation", "company", "co",
    "ltd", "limited", "llc", "llp", "plc", "gmbh", "ag", "kg", "bv", "nv",
    "sa", "sas", "srl", "spa", "sl", "ab", "as", "oy", "oyj", "pty", "pvt",
    "sdn", "bhd", "kk", "zao", "ooo", "sro", "doo",
}

_TOKEN_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9\-+']*")


def shorten(vendor: str) -> str:
    """Derive a compact display name: 'Cisco Systems, Inc' -> 'Cisco'."""
    tokens = _TOKEN_RE.findall(vendor)
    kept = [t for t in tokens if t.lower().rstrip(".") not in _STOPWORDS]
    if not kept:
        kept = tokens[:1]
    if not kept:
        return vendor.strip() or "unknown"
    head = kept[0]
    # All-caps long tokens read better titlecased; short ones are acronyms.
    if head.isupper() and len(head) > 5:
        head = head.title()
    return head


def build(source: Path, dest: Path) -> int:
    raw = json.loads(source.read_text(encoding="utf-8"))
    rows: list[tuple[str, str, str]] = []
    for key, value in raw.items():
        if not re.fullmatch(r"[0-9A-Fa-f]{6}", key):
            continue  # longer-prefix (MA-M/MA-S) entries are out of scope
        vendor = str(value).splitlines()[0].strip()
        if not vendor:
            continue
        prefix = ":".join(key[i : i + 2].upper() for i in (0, 2, 4))
        rows.append((prefix, shorten(vendor), vendor))
    rows.sort()
    lines = [
        "# OUI to vendor directory (Wireshark manuf format).",
        "# Derived from the IEEE MA-L registry; exact 3-byte assignments only.",
        "# Format: <prefix>\t<short>\t<vendor>",
    ]
    lines += [f"{p}\t{s}\t{v}" for p, s, v in rows]
    dest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return len(rows)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("source", type=Path, help="registry JSON dump (OUI hex -> registrant text)")
    parser.add_argument(
        "--dest",
        type=Path,
        default=Path(__file__).resolve().parent.parent / "src" / "assetowner" / "data" / "manuf",
    )
    args = parser.parse_args()
    count = build(args.source, args.dest)
    print(f"wrote {count} entries to {args.dest}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
