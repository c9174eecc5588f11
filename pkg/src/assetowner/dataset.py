"""Categorical encoding, one-vs-rest problems, MCCV splits, EDA summaries.

The table encodes every feature against a lexicographically sorted
vocabulary; codes are the only thing the models ever see. Splits follow the
80/10/10 floor rule, stratified so both classes reach every part whenever
the arithmetic allows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .features import FEATURES, FeatureRow
from .seeding import rng_from

#: Owners with fewer labeled positives than this are refused: a 10% CV slice
#: would average under 3 positives and every metric becomes noise.
MIN_POSITIVES = 30

UNSEEN_CODE = -1

#: Per-feature (name, sorted vocabulary) pairs, as held by CategoricalTable.
Columns = tuple[tuple[str, tuple[str, ...]], ...]


@dataclass(eq=False)
class CategoricalTable:
    """Integer-coded view of engineered rows.

    columns: per feature (name, sorted vocabulary); order fixed by FEATURES.
    codes: (n_rows, 10) int32 vocabulary indices.
    owners: per-row owner label ("" = unlabeled).
    os_display / vendor_display: sidecar strings for EDA breakdowns; not
    model features.
    """

    columns: tuple[tuple[str, tuple[str, ...]], ...]
    codes: np.ndarray
    owners: tuple[str, ...]
    os_display: tuple[str, ...] = ()
    vendor_display: tuple[str, ...] = ()

    @property
    def n_rows(self) -> int:
        return self.codes.shape[0]

    @property
    def vocabularies(self) -> tuple[tuple[str, ...], ...]:
        return tuple(vocab for _, vocab in self.columns)

    def vocabulary(self, feature: str) -> tuple[str, ...]:
        for name, vocab in self.columns:
            if name == feature:
                return vocab
        raise KeyError(feature)

    def decode_row(self, index: int) -> dict[str, str]:
        return {
            name: vocab[self.codes[index, j]]
            for j, (name, vocab) in enumerate(self.columns)
        }


@dataclass(eq=False)
class BinaryProblem:
    """One-vs-rest problem for a single owner.

    indices: labeled rows (unlabeled rows are excluded here and kept on
    ``inference_indices`` for later scoring). labels align with indices.
    """

    table: CategoricalTable
    target_owner: str
    indices: np.ndarray
    labels: np.ndarray
    inference_indices: np.ndarray

    @property
    def n(self) -> int:
        return int(self.indices.shape[0])


@dataclass(frozen=True)
class SplitPlan:
    """One MCCV iteration's disjoint train/cv/test row positions.

    Positions index into the problem's labels (0..n-1), ascending within
    each part. |train| = floor(0.8 n), |cv| = floor(0.1 n), test = rest.
    """

    iteration: int
    seed: int
    train: tuple[int, ...]
    cv: tuple[int, ...]
    test: tuple[int, ...]


@dataclass(frozen=True)
class EdaSummary:
    """Frequency tables + nested groupings feeding the dashboard EDA view."""

    n_rows: int
    feature_tables: dict[str, dict[str, int]]
    owner_counts: dict[str, int]
    cidr16_by_cidr8: dict[str, dict[str, int]]
    os_by_os_parent: dict[str, dict[str, int]]


#: The seven features with dashboard frequency tables.
EDA_FEATURES = ("class_name", "agent_installed", "location", "fqdn_top", "os_parent", "oui", "cidr8")


def build_table(rows: Sequence[FeatureRow]) -> CategoricalTable:
    """Encode rows into a CategoricalTable.

    Vocabularies are exactly the distinct values present, sorted
    lexicographically; decode(encode(x)) == x for every row.
    """
    if not rows:
        raise ValueError("cannot build a table from zero rows")
    columns = []
    code_cols = []
    for name in FEATURES:
        values = [row.feature(name) for row in rows]
        vocab = tuple(sorted(set(values)))
        index = {v: i for i, v in enumerate(vocab)}
        columns.append((name, vocab))
        code_cols.append(np.fromiter((index[v] for v in values), dtype=np.int32, count=len(values)))
    codes = np.stack(code_cols, axis=1)
    return CategoricalTable(
        columns=tuple(columns),
        codes=codes,
        owners=tuple(row.owner for row in rows),
        os_display=tuple(row.os for row in rows),
        vendor_display=tuple(row.vendor for row in rows),
    )


def encode_against(
    columns: tuple[tuple[str, tuple[str, ...]], ...], rows: Iterable[FeatureRow]
) -> np.ndarray:
    """Encode rows against an existing vocabulary snapshot.

    Categories absent from the snapshot map to UNSEEN_CODE (-1); each model
    documents how it routes them.
    """
    maps = [{v: i for i, v in enumerate(vocab)} for _, vocab in columns]
    out = []
    for row in rows:
        out.append(
            [maps[j].get(row.feature(name), UNSEEN_CODE) for j, (name, _) in enumerate(columns)]
        )
    return np.asarray(out, dtype=np.int32).reshape(-1, len(columns))


def make_binary_problem(
    table: CategoricalTable, owner: str, min_positives: int = MIN_POSITIVES
) -> BinaryProblem:
    """Frame `owner` vs rest over the table's labeled rows.

    Raises ValueError when the owner is absent or has fewer than
    ``min_positives`` labeled rows.
    """
    owners = np.asarray(table.owners, dtype=object)
    labeled = np.flatnonzero(owners != "")
    unlabeled = np.flatnonzero(owners == "")
    labels = owners[labeled] == owner
    positives = int(labels.sum())
    if positives == 0:
        raise ValueError(f"owner {owner!r} does not occur in the table")
    if positives < min_positives:
        raise ValueError(
            f"owner {owner!r} has {positives} labeled rows; "
            f"at least {min_positives} required for stable cross validation"
        )
    return BinaryProblem(
        table=table,
        target_owner=owner,
        indices=labeled.astype(np.int64),
        labels=labels.astype(bool),
        inference_indices=unlabeled.astype(np.int64),
    )


def split_sizes(n: int) -> tuple[int, int, int]:
    """The 80/10/10 floor rule: train and cv floored, remainder to test."""
    train = int(np.floor(0.8 * n))
    cv = int(np.floor(0.1 * n))
    return train, cv, n - train - cv


def _largest_remainder(count: int, proportions: Sequence[float]) -> list[int]:
    """Apportion `count` items to parts by quota + largest remainder.

    Deterministic: remainder ties resolve to the earlier part.
    """
    quotas = [count * p for p in proportions]
    alloc = [int(np.floor(q)) for q in quotas]
    remainder = count - sum(alloc)
    order = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - alloc[i]), i))
    for i in order[:remainder]:
        alloc[i] += 1
    return alloc


def _stratified_allocation(n_pos: int, n_neg: int, sizes: tuple[int, int, int]) -> tuple[list[int], list[int]]:
    """Per-part positive/negative counts honoring exact part sizes.

    The minority class is apportioned by largest remainder, the majority
    fills the rest; a repair pass then guarantees each part holds both
    classes whenever that is arithmetically possible.
    """
    n = n_pos + n_neg
    proportions = [s / n for s in sizes]
    minority_is_pos = n_pos <= n_neg
    n_min = n_pos if minority_is_pos else n_neg
    alloc_min = _largest_remainder(n_min, proportions)

    # repair 1: parts with capacity but no minority borrow from the richest
    for p in range(3):
        if alloc_min[p] == 0 and sizes[p] >= 1:
            donors = [q for q in range(3) if alloc_min[q] >= 2]
            if donors:
                donor = max(donors, key=lambda q: (alloc_min[q], -q))
                alloc_min[donor] -= 1
                alloc_min[p] += 1
    # repair 2: parts the minority filled completely starve the majority
    for p in range(3):
        if sizes[p] - alloc_min[p] == 0 and sizes[p] >= 2:
            takers = [q for q in range(3) if sizes[q] - alloc_min[q] >= 2]
            if takers:
                taker = max(takers, key=lambda q: (sizes[q] - alloc_min[q], -q))
                alloc_min[p] -= 1
                alloc_min[taker] += 1
    # clamp against part capacity (defensive; repairs preserve totals)
    alloc_maj = [sizes[p] - alloc_min[p] for p in range(3)]
    if minority_is_pos:
        return alloc_min, alloc_maj
    return alloc_maj, alloc_min


def mccv_split(n: int, iteration: int, master_seed: int, labels: Sequence[bool]) -> SplitPlan:
    """Stratified Monte Carlo split for one iteration.

    Deterministic function of (n, iteration, master_seed, labels); distinct
    iterations draw independent permutations from streams keyed by
    (master_seed, iteration).
    """
    if n < 10:
        raise ValueError(f"need at least 10 rows to split, got {n}")
    labels = np.asarray(labels, dtype=bool)
    if labels.shape[0] != n:
        raise ValueError("labels length must equal n")
    n_pos = int(labels.sum())
    n_neg = n - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("both classes must be present to stratify a split")

    sizes = split_sizes(n)
    alloc_pos, alloc_neg = _stratified_allocation(n_pos, n_neg, sizes)

    rng = rng_from(master_seed, "mccv", iteration)
    pos = rng.permutation(np.flatnonzero(labels))
    neg = rng.permutation(np.flatnonzero(~labels))

    parts: list[np.ndarray] = []
    p_start = n_start = 0
    for k in range(3):
        p_end, n_end = p_start + alloc_pos[k], n_start + alloc_neg[k]
        part = np.concatenate([pos[p_start:p_end], neg[n_start:n_end]])
        part.sort()
        parts.append(part)
        p_start, n_start = p_end, n_end

    return SplitPlan(
        iteration=iteration,
        seed=master_seed,
        train=tuple(int(i) for i in parts[0]),
        cv=tuple(int(i) for i in parts[1]),
        test=tuple(int(i) for i in parts[2]),
    )


def summarize(table: CategoricalTable) -> EdaSummary:
    """Frequency tables for the seven EDA features, owner counts, and the
    cidr16-by-cidr8 / os-by-os_parent nested groupings."""
    feature_tables: dict[str, dict[str, int]] = {}
    for name in EDA_FEATURES:
        vocab = table.vocabulary(name)
        j = FEATURES.index(name)
        counts = np.bincount(table.codes[:, j], minlength=len(vocab))
        feature_tables[name] = {vocab[i]: int(counts[i]) for i in range(len(vocab))}

    owner_counts: dict[str, int] = {}
    for owner in table.owners:
        owner_counts[owner] = owner_counts.get(owner, 0) + 1

    j8, j16 = FEATURES.index("cidr8"), FEATURES.index("cidr16")
    v8, v16 = table.vocabulary("cidr8"), table.vocabulary("cidr16")
    cidr16_by_cidr8: dict[str, dict[str, int]] = {}
    for c8, c16 in zip(table.codes[:, j8], table.codes[:, j16]):
        bucket = cidr16_by_cidr8.setdefault(v8[c8], {})
        key = v16[c16]
        bucket[key] = bucket.get(key, 0) + 1

    jparent = FEATURES.index("os_parent")
    vparent = table.vocabulary("os_parent")
    os_by_os_parent: dict[str, dict[str, int]] = {}
    for code, os_name in zip(table.codes[:, jparent], table.os_display):
        bucket = os_by_os_parent.setdefault(vparent[code], {})
        bucket[os_name] = bucket.get(os_name, 0) + 1

    return EdaSummary(
        n_rows=table.n_rows,
        feature_tables={k: dict(sorted(v.items())) for k, v in feature_tables.items()},
        owner_counts=dict(sorted(owner_counts.items())),
        cidr16_by_cidr8={k: dict(sorted(v.items())) for k, v in sorted(cidr16_by_cidr8.items())},
        os_by_os_parent={k: dict(sorted(v.items())) for k, v in sorted(os_by_os_parent.items())},
    )
