"""Seeded synthetic CMDB inventory generator.

The real inventory behind the reported results is proprietary, so the
toolkit ships a generator that plants a known ownership rule over
(fqdn_top, cidr16, location) and then corrupts a configured fraction of the
labels. Noise flips the label, never the features, so the stored provenance
is an exact optimal-error oracle.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import asdict, dataclass, field
from typing import Iterable

from .ingest import AssetRecord, validate_fqdn
from .features import extract_oui, truncate_fqdn
from .seeding import rng_from

DEFAULT_SEED = 1729


class SynthConfigError(ValueError):
    """Inconsistent generator configuration (overlapping/gappy rules, bad vocab)."""


@dataclass(frozen=True)
class RuleBox:
    """One conjunctive cell of an ownership rule: all listed values match.

    ``share`` is the probability of drawing this box given its owner.
    """

    fqdn_tops: tuple[str, ...]
    cidr16s: tuple[str, ...]
    locations: tuple[str, ...]
    share: float

    def matches(self, fqdn_top: str, cidr16: str, location: str) -> bool:
        return fqdn_top in self.fqdn_tops and cidr16 in self.cidr16s and location in self.locations


@dataclass(frozen=True)
class SynthConfig:
    """Generator parameters: vocabularies, owner weights, planted rules.

    The rule table must be mutually exclusive and jointly exhaustive over
    the (fqdn_domains × cidr16s × locations) cross product; construction
    validates this by enumeration. Explicit value lists (rather than vocab
    sizes) are stored because rules reference concrete values.
    """

    n_rows: int
    owners: tuple[tuple[str, float], ...]
    noise_rate: float
    seed: int
    fqdn_domains: tuple[str, ...]
    cidr16s: tuple[str, ...]
    locations: tuple[str, ...]
    location_weights: tuple[tuple[str, float], ...]
    ouis: tuple[str, ...]
    os_choices: tuple[tuple[str, float], ...]
    class_names: tuple[tuple[str, float], ...]
    systems: tuple[tuple[str, float], ...]
    rule_table: tuple[tuple[str, tuple[RuleBox, ...]], ...]
    agent_yes_rate: float = 0.8
    netbios_empty_rate: float = 0.02
    unlabeled_rate: float = 0.04

    def __post_init__(self) -> None:
        validate_config(self)

    def fingerprint(self) -> str:
        """Stable digest of every field; folded into the generator seed so
        any config change reshuffles the stream."""
        blob = json.dumps(asdict(self), sort_keys=True, default=str)
        return hashlib.blake2b(blob.encode("utf-8"), digest_size=8).hexdigest()


@dataclass(frozen=True)
class SynthProvenance:
    """Per-row owner assigned by the rule table, before noise/unlabeling.

    Stored beside the inventory for oracle checks; never fed to models.
    """

    true_rule_owner: tuple[str, ...]


_CIDR16_RE = re.compile(r"^(\d{1,3})\.(\d{1,3})\.0\.0/16$")
_OUI_RE = re.compile(r"^[0-9A-F]{2}:[0-9A-F]{2}:[0-9A-F]{2}$")


def _check_weighted(name: str, pairs: Iterable[tuple[str, float]]) -> None:
    seen = set()
    for value, weight in pairs:
        if weight <= 0:
            raise SynthConfigError(f"{name}: weight for {value!r} must be positive")
        if value in seen:
            raise SynthConfigError(f"{name}: duplicate entry {value!r}")
        seen.add(value)


def validate_config(config: SynthConfig) -> None:
    if config.n_rows < 0:
        raise SynthConfigError("n_rows must be >= 0")
    for rate_name in ("noise_rate", "unlabeled_rate", "agent_yes_rate", "netbios_empty_rate"):
        rate = getattr(config, rate_name)
        if not 0.0 <= rate <= 1.0:
            raise SynthConfigError(f"{rate_name} must lie in [0, 1], got {rate}")
    if not config.owners:
        raise SynthConfigError("at least one owner required")
    _check_weighted("owners", config.owners)
    _check_weighted("location_weights", config.location_weights)
    _check_weighted("os_choices", config.os_choices)
    _check_weighted("class_names", config.class_names)
    _check_weighted("systems", config.systems)

    for domain in config.fqdn_domains:
        validate_fqdn(domain)
        if truncate_fqdn(domain) != domain:
            raise SynthConfigError(
                f"fqdn domain {domain!r} must be lowercase with at most three labels"
            )
    for cidr in config.cidr16s:
        if not _CIDR16_RE.match(cidr):
            raise SynthConfigError(f"cidr16 {cidr!r} must look like 'a.b.0.0/16'")
    for oui in config.ouis:
        if not _OUI_RE.match(oui):
            raise SynthConfigError(f"oui {oui!r} must be normalized 'XX:XX:XX'")
    if len(set(config.locations)) != len(config.locations):
        raise SynthConfigError("duplicate locations")
    weight_names = {name for name, _ in config.location_weights}
    if weight_names != set(config.locations):
        raise SynthConfigError("location_weights must cover exactly the locations list")

    owner_names = [name for name, _ in config.owners]
    rule_owners = [owner for owner, _ in config.rule_table]
    if sorted(rule_owners) != sorted(owner_names):
        raise SynthConfigError("rule_table owners must match the owners list exactly")
    known = {
        "fqdn": set(config.fqdn_domains),
        "cidr16": set(config.cidr16s),
        "location": set(config.locations),
    }
    for owner, boxes in config.rule_table:
        if not boxes:
            raise SynthConfigError(f"owner {owner!r} has no rule boxes")
        if abs(sum(box.share for box in boxes) - 1.0) > 1e-9:
            raise SynthConfigError(f"owner {owner!r}: box shares must sum to 1")
        for box in boxes:
            if box.share <= 0:
                raise SynthConfigError(f"owner {owner!r}: box shares must be positive")
            if not set(box.fqdn_tops) <= known["fqdn"]:
                raise SynthConfigError(f"owner {owner!r}: unknown fqdn domain in rule box")
            if not set(box.cidr16s) <= known["cidr16"]:
                raise SynthConfigError(f"owner {owner!r}: unknown cidr16 in rule box")
            if not set(box.locations) <= known["location"]:
                raise SynthConfigError(f"owner {owner!r}: unknown location in rule box")

    # Mutual exclusivity + joint exhaustiveness, by brute enumeration.
    for domain in config.fqdn_domains:
        for cidr in config.cidr16s:
            for location in config.locations:
                matches = [
                    owner
                    for owner, boxes in config.rule_table
                    if any(box.matches(domain, cidr, location) for box in boxes)
                ]
                if len(matches) == 0:
                    raise SynthConfigError(
                        f"rule gap: ({domain}, {cidr}, {location}) matches no owner"
                    )
                if len(matches) > 1:
                    raise SynthConfigError(
                        f"rule overlap: ({domain}, {cidr}, {location}) matches {matches}"
                    )


def rule_owner(config: SynthConfig, fqdn_top: str, cidr16: str, location: str) -> str:
    """The owner the rule table assigns to a feature triple."""
    for owner, boxes in config.rule_table:
        if any(box.matches(fqdn_top, cidr16, location) for box in boxes):
            return owner
    raise SynthConfigError(f"no rule matches ({fqdn_top}, {cidr16}, {location})")


def _weighted_lists(pairs: Iterable[tuple[str, float]]) -> tuple[list[str], list[float]]:
    values = [v for v, _ in pairs]
    weights = [w for _, w in pairs]
    total = sum(weights)
    return values, [w / total for w in weights]


def generate_inventory(config: SynthConfig) -> tuple[list[AssetRecord], SynthProvenance]:
    """Generate ``n_rows`` records, all of which pass ingest validation.

    Rows are sampled owner-first per the configured weights, then a rule box
    within the owner, then concrete feature values inside the box, so owner
    marginals match the weights in expectation. A ``noise_rate`` fraction of
    labeled rows is reassigned uniformly at random to another owner; an
    ``unlabeled_rate`` fraction is emitted with owner "". Deterministic given
    the config (the seed is folded with a digest of every field).
    """
    rng = rng_from(config.seed, "synth", config.fingerprint())
    owner_names, owner_probs = _weighted_lists(config.owners)
    location_weight = dict(config.location_weights)
    os_values, os_probs = _weighted_lists(config.os_choices)
    class_values, class_probs = _weighted_lists(config.class_names)
    system_values, system_probs = _weighted_lists(config.systems)
    boxes_by_owner = {owner: boxes for owner, boxes in config.rule_table}

    records: list[AssetRecord] = []
    true_owners: list[str] = []
    host_prefixes = ("srv", "app", "db", "web", "node", "vm")

    for index in range(config.n_rows):
        owner_true = owner_names[rng.choice(len(owner_names), p=owner_probs)]
        boxes = boxes_by_owner[owner_true]
        shares = [box.share for box in boxes]
        box = boxes[rng.choice(len(boxes), p=shares)]

        fqdn_top = box.fqdn_tops[rng.integers(len(box.fqdn_tops))]
        cidr16 = box.cidr16s[rng.integers(len(box.cidr16s))]
        loc_values, loc_probs = _weighted_lists(
            [(loc, location_weight[loc]) for loc in box.locations]
        )
        location = loc_values[rng.choice(len(loc_values), p=loc_probs)]

        a, b = _CIDR16_RE.match(cidr16).groups()
        # third octet fixed at 0: every /16 holds exactly one /24
        ip = f"{a}.{b}.0.{int(rng.integers(1, 255))}"
        hostname = f"{host_prefixes[rng.integers(len(host_prefixes))]}-{int(rng.integers(0, 10000)):04d}"
        fqdn = f"{hostname}.{fqdn_top}"
        oui = config.ouis[rng.integers(len(config.ouis))]
        tail = rng.integers(0, 256, size=3)
        mac = f"{oui}:{tail[0]:02X}:{tail[1]:02X}:{tail[2]:02X}"

        os_name = os_values[rng.choice(len(os_values), p=os_probs)]
        class_name = class_values[rng.choice(len(class_values), p=class_probs)]
        system = system_values[rng.choice(len(system_values), p=system_probs)]
        agent = "yes" if rng.random() < config.agent_yes_rate else "no"
        netbios = "" if rng.random() < config.netbios_empty_rate else hostname.upper()

        tags = {"env": ("prod", "dev", "stage")[rng.choice(3, p=[0.6, 0.25, 0.15])]}
        if rng.random() < 0.3:
            tags["patch-group"] = f"pg{int(rng.integers(1, 5))}"

        unlabeled_draw = rng.random()
        noise_draw = rng.random()
        flip_to = int(rng.integers(0, max(1, len(owner_names) - 1)))
        if unlabeled_draw < config.unlabeled_rate:
            owner_label = ""
        elif noise_draw < config.noise_rate and len(owner_names) > 1:
            others = [name for name in owner_names if name != owner_true]
            owner_label = others[flip_to]
        else:
            owner_label = owner_true

        records.append(
            AssetRecord(
                asset_name=f"a{index:05d}-{hostname}",
                netbios=netbios,
                os=os_name,
                class_name=class_name,
                fqdn=fqdn,
                ip=ip,
                mac=mac,
                agent_installed=agent,
                location=location,
                system=system,
                owner=owner_label,
                tags=tags,
            )
        )
        true_owners.append(owner_true)

    return records, SynthProvenance(tuple(true_owners))


def default_benchmark_config(seed: int = DEFAULT_SEED, n_rows: int = 5000, noise_rate: float = 0.03) -> SynthConfig:
    """The repo's standard benchmark: 6 owners, planted rule over
    (fqdn_top, cidr16, location).

    Owner pair (j, j+3) lives in location group j; within it, fqdn group 0
    belongs to owner j, group 2 to owner j+3, and the middle fqdn group is
    gated by the cidr16 group (cg0/cg1 vs cg2). Location and fqdn therefore
    carry the dominant signal and cidr16 a moderate one, which keeps the
    planted top-3 importance ranking stable for tree models. cidr16 groups
    are rotated against /8 boundaries so cidr8 is informative but strictly
    weaker than cidr16.
    """
    owners = (
        ("team-platform", 0.30),
        ("team-database", 0.24),
        ("team-webapps", 0.16),
        ("team-analytics", 0.12),
        ("team-security", 0.10),
        ("team-backup", 0.08),
    )
    fg = (
        ("corp.acme-corp.com", "prod.acme-corp.com"),
        ("cloud.acme-corp.com", "labs.acme-corp.com"),
        ("edge.acme-corp.net", "legacy.acme-corp.net"),
    )
    cidr16s = (
        "10.10.0.0/16", "10.20.0.0/16", "10.30.0.0/16", "10.40.0.0/16",
        "172.16.0.0/16", "172.17.0.0/16", "172.18.0.0/16", "172.19.0.0/16",
        "192.168.0.0/16", "192.169.0.0/16", "192.170.0.0/16", "192.171.0.0/16",
    )
    # groups of four, rotated one step against the /8 boundaries
    cg0 = ("10.10.0.0/16", "10.20.0.0/16", "10.30.0.0/16", "172.16.0.0/16")
    cg1 = ("172.17.0.0/16", "172.18.0.0/16", "172.19.0.0/16", "192.168.0.0/16")
    cg2 = ("192.169.0.0/16", "192.170.0.0/16", "192.171.0.0/16", "10.40.0.0/16")
    cg01 = cg0 + cg1
    location_groups = (("AMER", "EMEA"), ("APAC",), ("LATAM",))
    pair_owners = (
        ("team-platform", "team-analytics"),
        ("team-database", "team-security"),
        ("team-webapps", "team-backup"),
    )
    rules = []
    for j, (front, back) in enumerate(pair_owners):
        locs = location_groups[j]
        rules.append(
            (
                front,
                (
                    RuleBox(fg[0], cidr16s, locs, 0.55),
                    RuleBox(fg[1], cg01, locs, 0.45),
                ),
            )
        )
        rules.append(
            (
                back,
                (
                    RuleBox(fg[2], cidr16s, locs, 0.55),
                    RuleBox(fg[1], cg2, locs, 0.45),
                ),
            )
        )
    return SynthConfig(
        n_rows=n_rows,
        owners=owners,
        noise_rate=noise_rate,
        seed=seed,
        fqdn_domains=fg[0] + fg[1] + fg[2],
        cidr16s=cidr16s,
        locations=("AMER", "EMEA", "APAC", "LATAM"),
        location_weights=(("AMER", 0.6), ("EMEA", 0.4), ("APAC", 1.0), ("LATAM", 1.0)),
        ouis=(
            "00:50:56", "00:0C:29", "00:00:0C", "00:1A:A0", "00:21:9B",
            "00:1B:63", "F8:32:E4", "B8:27:EB", "3C:5A:B4", "00:25:B3",
        ),
        os_choices=(
            ("Linux kernel 3.2", 0.18),
            ("Linux kernel 2.4", 0.12),
            ("Ubuntu Linux 20.04", 0.15),
            ("Red Hat Enterprise Linux 8", 0.15),
            ("Windows Server 2019", 0.15),
            ("Windows 10 Enterprise", 0.10),
            ("VMware ESXi 7.0", 0.05),
            ("FreeBSD 13", 0.03),
            ("macOS 13", 0.03),
            ("Cisco IOS 15.2", 0.02),
            ("BeOS R5", 0.02),
        ),
        class_names=(
            ("server", 0.50),
            ("workstation", 0.20),
            ("vm", 0.15),
            ("appliance", 0.10),
            ("container", 0.05),
        ),
        systems=(
            ("cmdb-core", 0.40),
            ("cmdb-cloud", 0.25),
            ("discovery-scan", 0.20),
            ("manual-entry", 0.10),
            ("import-legacy", 0.05),
        ),
        rule_table=tuple(rules),
    )


def config_to_json(config: SynthConfig) -> str:
    """Serialize a config to the documented JSON schema."""
    doc = asdict(config)
    doc["rule_table"] = [
        {
            "owner": owner,
            "boxes": [
                {
                    "fqdn_tops": list(box.fqdn_tops),
                    "cidr16s": list(box.cidr16s),
                    "locations": list(box.locations),
                    "share": box.share,
                }
                for box in boxes
            ],
        }
        for owner, boxes in config.rule_table
    ]
    return json.dumps(doc, indent=2, sort_keys=True)


def config_from_json(text: str) -> SynthConfig:
    """Parse the JSON schema back into a validated SynthConfig."""
    doc = json.loads(text)
    pairs = lambda rows: tuple((str(a), float(b)) for a, b in rows)  # noqa: E731
    rule_table = tuple(
        (
            entry["owner"],
            tuple(
                RuleBox(
                    tuple(box["fqdn_tops"]),
                    tuple(box["cidr16s"]),
                    tuple(box["locations"]),
                    float(box["share"]),
                )
                for box in entry["boxes"]
            ),
        )
        for entry in doc["rule_table"]
    )
    return SynthConfig(
        n_rows=int(doc["n_rows"]),
        owners=pairs(doc["owners"]),
        noise_rate=float(doc["noise_rate"]),
        seed=int(doc["seed"]),
        fqdn_domains=tuple(doc["fqdn_domains"]),
        cidr16s=tuple(doc["cidr16s"]),
        locations=tuple(doc["locations"]),
        location_weights=pairs(doc["location_weights"]),
        ouis=tuple(doc["ouis"]),
        os_choices=pairs(doc["os_choices"]),
        class_names=pairs(doc["class_names"]),
        systems=pairs(doc["systems"]),
        rule_table=rule_table,
        agent_yes_rate=float(doc.get("agent_yes_rate", 0.8)),
        netbios_empty_rate=float(doc.get("netbios_empty_rate", 0.02)),
        unlabeled_rate=float(doc.get("unlabeled_rate", 0.04)),
    )
