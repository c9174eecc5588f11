"""Command line entry points.

Verbs: generate (synthetic inventory CSV), ingest (validate a CSV and
report issues), analyze (EDA artifacts only), evaluate (the full protocol
to a bundle directory), label (predict owners for unlabeled rows), serve
(read-only HTTP over a bundle).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .dataset import (
    MIN_POSITIVES,
    build_table,
    make_binary_problem,
    mccv_split,
    summarize,
)
from .features import default_directory, engineer_all
from .ingest import IngestConfig, IngestError, parse_export, serialize_records
from .synth import (
    DEFAULT_SEED,
    config_from_json,
    config_to_json,
    default_benchmark_config,
    generate_inventory,
)


def _load_table(path: Path, fail_fast: bool = False):
    records, issues = parse_export(path, IngestConfig(fail_fast=fail_fast))
    rows = engineer_all(records, default_directory())
    return build_table(rows), records, issues


def _eligible_owners(table) -> list[str]:
    counts: dict[str, int] = {}
    for owner in table.owners:
        if owner:
            counts[owner] = counts.get(owner, 0) + 1
    return sorted(o for o, c in counts.items() if c >= MIN_POSITIVES)


def _cmd_generate(args) -> int:
    if args.config:
        config = config_from_json(Path(args.config).read_text(encoding="utf-8"))
    else:
        config = default_benchmark_config(
            seed=args.seed, n_rows=args.rows, noise_rate=args.noise
        )
    records, _ = generate_inventory(config)
    out = Path(args.out)
    out.write_text(serialize_records(records), encoding="utf-8")
    if args.emit_config:
        Path(args.emit_config).write_text(config_to_json(config), encoding="utf-8")
    print(f"wrote {len(records)} rows to {out}")
    return 0


def _cmd_ingest(args) -> int:
    records, issues = parse_export(Path(args.input), IngestConfig(fail_fast=args.strict))
    by_kind: dict[tuple[str, str], int] = {}
    for issue in issues:
        key = (issue.severity, f"{issue.field}: {issue.reason}")
        by_kind[key] = by_kind.get(key, 0) + 1
    print(f"kept {len(records)} rows, {len(issues)} issues")
    for (severity, what), count in sorted(by_kind.items()):
        print(f"  [{severity}] {what}: {count}")
    if args.out:
        Path(args.out).write_text(serialize_records(records), encoding="utf-8")
        print(f"normalized CSV written to {args.out}")
    return 0


def _cmd_analyze(args) -> int:
    from .report import ArtifactBundle, write_artifacts

    table, records, issues = _load_table(Path(args.input))
    bundle = ArtifactBundle(eda=summarize(table), run_reports={}, rows=table)
    paths = write_artifacts(bundle, args.out)
    print(f"{len(records)} rows analyzed ({len(issues)} ingest issues)")
    for path in paths:
        print(f"  {path}")
    return 0


def _cmd_evaluate(args) -> int:
    from .evaluation import default_grid, desk_grid, run_mccv
    from .report import build_bundle, write_artifacts

    table, _, _ = _load_table(Path(args.input))
    eligible = _eligible_owners(table)
    owners = args.owner or eligible
    for owner in owners:
        if owner not in eligible:
            print(
                f"error: owner {owner!r} is not evaluable "
                f"(needs >= {MIN_POSITIVES} labeled rows); eligible: {eligible}",
                file=sys.stderr,
            )
            return 2
    grid = desk_grid() if args.desk_grid else default_grid()
    reports = {}
    for owner in owners:
        started = time.monotonic()
        problem = make_binary_problem(table, owner)
        report = run_mccv(
            problem,
            grid=grid,
            iterations=args.iterations,
            master_seed=args.seed,
            jobs=args.jobs,
        )
        reports[owner] = report
        medians = {
            fam: f"{res.error_summary['median']:.4f}"
            for fam, res in report.per_family.items()
        }
        elapsed = time.monotonic() - started
        print(f"{owner}: {elapsed:.1f}s, median test error {medians}")
    bundle = build_bundle(table, reports)
    paths = write_artifacts(bundle, args.out)
    print(f"bundle written: {len(paths)} files in {args.out}")
    return 0


def _cmd_label(args) -> int:
    import numpy as np

    from . import models
    from .evaluation import default_grid, desk_grid, grid_search, params_of

    table, records, _ = _load_table(Path(args.input))
    eligible = _eligible_owners(table)
    if not eligible:
        print("error: no owner has enough labeled rows to fit", file=sys.stderr)
        return 2
    unlabeled = [i for i, owner in enumerate(table.owners) if not owner]
    if not unlabeled:
        print("nothing to label: every row has an owner")
        return 0
    grid = desk_grid() if args.desk_grid else default_grid()
    family = args.family
    codes_q = table.codes[np.array(unlabeled, dtype=np.int64)]
    scores = np.zeros((len(unlabeled), len(eligible)), dtype=np.float64)
    for col, owner in enumerate(eligible):
        problem = make_binary_problem(table, owner)
        plan = mccv_split(problem.n, 0, args.seed, list(problem.labels))
        chosen, _ = grid_search(problem, plan, family, grid, args.seed)
        params = params_of(family, chosen)
        idx = np.asarray(problem.indices, dtype=np.int64)
        codes_fit = table.codes[idx]
        y_fit = np.asarray(problem.labels, dtype=np.uint8)
        if family == "adaboost":
            model = models.fit_adaboost(table.columns, codes_fit, y_fit, **params)
        elif family == "logistic":
            model = models.fit_logistic(table.columns, codes_fit, y_fit)
        elif family == "naive_bayes":
            model = models.fit_naive_bayes(
                table.columns, codes_fit, y_fit, alpha=params["laplace"]
            )
        elif family == "cart":
            model = models.fit_cart(table.columns, codes_fit, y_fit, **params)
        else:
            model = models.fit_random_forest(
                table.columns, codes_fit, y_fit,
                seed_key=(args.seed, 0, "random_forest", owner), **params,
            )
        _, owner_scores = models.predict(model, codes_q)
        scores[:, col] = owner_scores
    # highest score wins; exact ties go to the lexicographically first owner,
    # which argmax already yields because eligible is sorted
    winners = np.argmax(scores, axis=1)
    lines = ["row_index,asset_name,fqdn,predicted_owner,score"]
    for k, row_idx in enumerate(unlabeled):
        rec = records[row_idx]
        owner = eligible[int(winners[k])]
        lines.append(
            f"{row_idx},{rec.asset_name},{rec.fqdn},{owner},{scores[k, winners[k]]:.6g}"
        )
    out = Path(args.out)
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"labeled {len(unlabeled)} rows with {family}; wrote {out}")
    return 0


def _cmd_serve(args) -> int:
    from .report import BundleError, serve

    try:
        server = serve(
            args.dir,
            (args.host, args.port),
            static_dir=args.static,
        )
    except BundleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    host, port = server.server_address[:2]
    print(f"serving {args.dir} on http://{host}:{port}/ (ctrl-c stops)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="assetowner",
        description="Predict asset ownership from inventory network identifiers.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("generate", help="write a synthetic inventory CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="JSON generator config (overrides the flags below)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--rows", type=int, default=5000)
    p.add_argument("--noise", type=float, default=0.03)
    p.add_argument("--emit-config", help="also write the effective config as JSON")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("ingest", help="validate a CSV export and report issues")
    p.add_argument("--input", required=True)
    p.add_argument("--out", help="write the normalized rows back out as CSV")
    p.add_argument("--strict", action="store_true", help="fail on the first issue")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("analyze", help="write EDA artifacts for a CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True, help="artifact directory")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("evaluate", help="run the evaluation protocol, write a bundle")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True, help="artifact directory")
    p.add_argument("--owner", action="append", help="restrict to this owner (repeatable)")
    p.add_argument("--iterations", type=int, default=100)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--desk-grid", action="store_true",
                   help="trim the forest grid to ntree in {100, 250}")
    p.add_argument("--jobs", type=int, default=1, help="parallel iterations")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("label", help="predict owners for unlabeled rows")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True, help="predictions CSV path")
    p.add_argument("--family", default="adaboost",
                   choices=["adaboost", "logistic", "naive_bayes", "cart", "random_forest"])
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--desk-grid", action="store_true")
    p.set_defaults(func=_cmd_label)

    p = sub.add_parser("serve", help="serve a bundle directory read-only over HTTP")
    p.add_argument("--dir", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--static", help="dashboard static files directory")
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (IngestError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
