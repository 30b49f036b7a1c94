"""Command-line interface: one subcommand per pipeline step.

All inputs and outputs are files named on the command line; there is no
hidden state and no network access. Every randomized subcommand requires an
explicit --seed and records it (with per-instance derived seeds) in its
outputs, so any run can be reproduced from its artifacts alone.

Exit codes: 0 success, 1 data/validation errors, 2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import augmentation, evaluation, reporting, substitution
from .annotations import (
    EntityType,
    annotate_dataset,
    filter_entity_instances,
    ingest_annotations,
    write_annotations,
)
from .catalog import load_catalog
from .errors import KcqaError
from .mrqa import parse_mrqa, write_mrqa
from .seeding import MASK64


def _info(message: str) -> None:
    print(message, file=sys.stderr)


def _seed_arg(value: str) -> int:
    return int(value) & MASK64


def _add_parallelism(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--parallelism",
        type=int,
        default=1,
        metavar="N",
        help="worker processes (output is identical for any value)",
    )


def _write_skipped(skipped, path: str | None) -> None:
    if path is None:
        return
    with open(path, "w", encoding="utf-8") as fh:
        for qid, reason in skipped:
            fh.write(json.dumps({"qid": qid, "reason": reason}) + "\n")


def _cmd_annotate(args) -> int:
    dataset = parse_mrqa(args.input)
    catalog = load_catalog(args.catalog) if args.catalog else None
    annotations = annotate_dataset(dataset, catalog)
    write_annotations(annotations, args.out)
    _info(f"annotated {len(annotations)} of {len(dataset)} instances")
    return 0


def _cmd_filter(args) -> int:
    dataset = parse_mrqa(args.input)
    annotations = ingest_annotations(args.annotations)
    kept, skipped = filter_entity_instances(dataset, annotations)
    write_mrqa(kept, args.out)
    _write_skipped(skipped, args.skipped)
    _info(f"kept {len(kept)} instances, skipped {len(skipped)}")
    return 0


def _policy_from_args(parser: argparse.ArgumentParser, args) -> substitution.SubstitutionPolicy:
    popularity_flags = args.pop_lower is not None or args.pop_upper is not None
    if args.policy != "popularity" and popularity_flags:
        parser.error("--pop-lower/--pop-upper are only valid with --policy popularity")
    if args.policy != "type-swap" and args.target_type is not None:
        parser.error("--target-type is only valid with --policy type-swap")

    if args.policy == "corpus":
        return substitution.CorpusPolicy()
    if args.policy == "type-swap":
        target = EntityType(args.target_type) if args.target_type else None
        return substitution.TypeSwapPolicy(target_type=target)
    if args.policy == "popularity":
        if args.pop_lower is None:
            parser.error("--policy popularity requires --pop-lower")
        upper = float("inf") if args.pop_upper is None else float(args.pop_upper)
        return substitution.PopularityPolicy(lower=args.pop_lower, upper=upper)
    return substitution.AliasPolicy()


def _cmd_substitute(args, parser: argparse.ArgumentParser) -> int:
    policy = _policy_from_args(parser, args)
    needs_catalog = isinstance(
        policy, (substitution.PopularityPolicy, substitution.AliasPolicy)
    )
    if needs_catalog and not args.catalog:
        parser.error(f"--policy {args.policy} requires --catalog")

    dataset = parse_mrqa(args.input)
    annotations = ingest_annotations(args.annotations)
    catalog = load_catalog(args.catalog) if args.catalog else None
    pool = substitution.build_answer_pool(dataset, annotations)
    substituted, records, skipped = substitution.substitute_dataset(
        dataset, annotations, policy, pool, catalog, args.seed, args.parallelism
    )
    write_mrqa(substituted, args.out)
    substitution.write_records(records, args.records)
    _write_skipped(skipped, args.skipped)
    if args.manifest:
        manifest = {
            "subcommand": "substitute",
            "policy": policy.name,
            "global_seed": args.seed,
            "n_input": len(dataset),
            "n_substituted": len(substituted),
            "n_skipped": len(skipped),
        }
        Path(args.manifest).write_text(json.dumps(manifest, indent=2) + "\n")
    _info(f"substituted {len(substituted)} instances, skipped {len(skipped)}")
    return 0


def _cmd_popularity_suite(args) -> int:
    dataset = parse_mrqa(args.input)
    annotations = ingest_annotations(args.annotations)
    catalog = load_catalog(args.catalog)
    entity_type = EntityType(args.entity_type)
    runs = substitution.generate_popularity_suite(
        dataset, annotations, catalog, entity_type, args.buckets, args.seed,
        args.parallelism,
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    bucket_meta = []
    for run in runs:
        stem = f"bucket-{run.bucket.index}"
        write_mrqa(run.dataset, out_dir / f"{stem}.jsonl.gz")
        substitution.write_records(run.records, out_dir / f"{stem}.records.jsonl")
        bucket_meta.append(
            {
                "index": run.bucket.index,
                "lower": run.bucket.lower,
                "upper": None if run.bucket.upper == float("inf") else run.bucket.upper,
                "member_count": run.bucket.member_count,
                "n_substituted": len(run.dataset),
                "n_skipped": len(run.skipped),
            }
        )
    manifest = {
        "subcommand": "popularity-suite",
        "entity_type": entity_type.value,
        "global_seed": args.seed,
        "buckets": bucket_meta,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    _info(f"wrote {len(runs)} bucket datasets to {out_dir}")
    return 0


def _cmd_split_overlap(args) -> int:
    dev = parse_mrqa(args.dev)
    train = parse_mrqa(args.train)
    split = evaluation.split_answer_overlap(dev, train)
    write_mrqa(split.ao, args.out_ao)
    write_mrqa(split.nao, args.out_nao)
    _info(f"answer overlap: {len(split.ao)}, no answer overlap: {len(split.nao)}")
    return 0


def _cmd_evaluate(args, parser: argparse.ArgumentParser) -> int:
    if args.sample_other is not None and (args.substituted is None or args.seed is None):
        parser.error("--sample-other requires --substituted and --seed")
    dataset = parse_mrqa(args.dataset)
    records = substitution.read_records(args.records)
    original_preds = evaluation.load_predictions(args.original_preds)
    substituted_preds = evaluation.load_predictions(args.substituted_preds)
    if args.stratify == "bucket":
        report = evaluation.eval_conflict_stratified(
            original_preds, substituted_preds, dataset, records,
            evaluation.bucket_stratum_key,
        )
    elif args.stratify == "type-pair":
        report = evaluation.eval_conflict_stratified(
            original_preds, substituted_preds, dataset, records,
            evaluation.type_pair_stratum_key,
        )
    else:
        report = evaluation.eval_conflict(
            original_preds, substituted_preds, dataset, records
        )
    evaluation.save_report(report, args.out)

    if args.sample_other is not None:
        substituted = parse_mrqa(args.substituted)
        samples = evaluation.sample_other_predictions(
            dataset,
            substituted,
            records,
            original_preds,
            substituted_preds,
            args.sample_other_count,
            random.Random(args.seed),
        )
        with open(args.sample_other, "w", encoding="utf-8") as fh:
            for sample in samples:
                fh.write(json.dumps(sample.__dict__, ensure_ascii=False) + "\n")
        _info(f"sampled {len(samples)} other-predictions for review")

    ratio = report.memorization_ratio
    _info(
        f"evaluated {report.n_correct_on_original}/{report.n_total} instances, "
        f"memorization ratio {'n/a' if ratio is None else f'{ratio:.3f}'}"
    )
    return 0


def _cmd_augment(args) -> int:
    train = parse_mrqa(args.input)
    if augmentation.has_substituted_copies(train) and not args.force:
        raise KcqaError(
            "input already contains '-sub' qids; pass --force to augment anyway"
        )
    annotations = ingest_annotations(args.annotations)
    pool = substitution.build_answer_pool(train, annotations)
    mixed, records = augmentation.build_mixed_training(
        train, annotations, pool, args.seed
    )
    write_mrqa(mixed.dataset, args.out)
    substitution.write_records(records, args.records)
    manifest = {"subcommand": "augment", "global_seed": args.seed, **mixed.manifest()}
    Path(args.manifest).write_text(json.dumps(manifest, indent=2) + "\n")
    _info(
        f"mixed set: {mixed.n_original} originals + {mixed.n_substituted} copies "
        f"(containment rate {mixed.containment_rate:.3f})"
    )
    return 0


def _cmd_report(args) -> int:
    report = evaluation.load_report(args.report)
    table = reporting.render_report_table(report, label=args.label)
    if args.out:
        Path(args.out).write_text(table)
    else:
        print(table, end="")
    if args.tsv:
        reporting.write_report_tsv(report, args.tsv, label=args.label)
    if args.figures:
        paths = reporting.render_figures(report, args.figures, label=args.label)
        _info("wrote " + ", ".join(str(p) for p in paths))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kcqa",
        description="Build and score entity-substituted knowledge-conflict QA datasets.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("annotate", help="type gold answers with the heuristic typer")
    p.add_argument("--input", required=True, help="MRQA JSONL dataset (.gz ok)")
    p.add_argument("--out", required=True, help="annotation sidecar JSONL to write")
    p.add_argument("--catalog", help="entity catalog JSONL for gazetteer lookups")
    p.set_defaults(func=_cmd_annotate)

    p = sub.add_parser("filter", help="keep instances with a typed, in-context answer")
    p.add_argument("--input", required=True)
    p.add_argument("--annotations", required=True, help="annotation sidecar JSONL")
    p.add_argument("--out", required=True)
    p.add_argument("--skipped", help="JSONL of skipped qids with reasons")
    p.set_defaults(func=_cmd_filter)

    p = sub.add_parser("substitute", help="rewrite answers under a substitution policy")
    p.add_argument("--policy", required=True, choices=["corpus", "type-swap", "popularity", "alias"])
    p.add_argument("--input", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--seed", required=True, type=_seed_arg, help="64-bit global seed")
    p.add_argument("--out", required=True, help="substituted MRQA JSONL")
    p.add_argument("--records", required=True, help="substitution record JSONL")
    p.add_argument("--catalog", help="required for popularity and alias policies")
    p.add_argument("--pop-lower", type=int, help="popularity lower bound (inclusive)")
    p.add_argument("--pop-upper", type=int, help="popularity upper bound (exclusive; default unbounded)")
    p.add_argument("--target-type", choices=[t.value for t in EntityType],
                   help="fix the type-swap target type")
    p.add_argument("--skipped")
    p.add_argument("--manifest", help="run manifest JSON (records the seed)")
    _add_parallelism(p)
    p.set_defaults(func=lambda args: _cmd_substitute(args, parser))

    p = sub.add_parser(
        "popularity-suite",
        help="one popularity-substituted dataset per popularity bucket",
    )
    p.add_argument("--input", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--catalog", required=True)
    p.add_argument("--entity-type", required=True, choices=[t.value for t in EntityType])
    p.add_argument("--buckets", type=int, default=5)
    p.add_argument("--seed", required=True, type=_seed_arg)
    p.add_argument("--out-dir", required=True)
    _add_parallelism(p)
    p.set_defaults(func=_cmd_popularity_suite)

    p = sub.add_parser("split-overlap", help="partition dev by answer overlap with train")
    p.add_argument("--dev", required=True)
    p.add_argument("--train", required=True)
    p.add_argument("--out-ao", required=True)
    p.add_argument("--out-nao", required=True)
    p.set_defaults(func=_cmd_split_overlap)

    p = sub.add_parser("evaluate", help="score prediction files for knowledge conflicts")
    p.add_argument("--dataset", required=True, help="original (pre-substitution) dataset")
    p.add_argument("--records", required=True)
    p.add_argument("--original-preds", required=True, help="predictions on the original set")
    p.add_argument("--substituted-preds", required=True, help="predictions on the substituted set")
    p.add_argument("--out", required=True, help="evaluation report JSON")
    p.add_argument("--stratify", choices=["bucket", "type-pair"])
    p.add_argument("--sample-other", help="JSONL of sampled Other predictions for review")
    p.add_argument("--sample-other-count", type=int, default=40)
    p.add_argument("--substituted", help="substituted dataset (needed for --sample-other)")
    p.add_argument("--seed", type=_seed_arg, help="seed for --sample-other")
    p.set_defaults(func=lambda args: _cmd_evaluate(args, parser))

    p = sub.add_parser("augment", help="build the mixed training set")
    p.add_argument("--input", required=True, help="training dataset (retrieved passages)")
    p.add_argument("--annotations", required=True)
    p.add_argument("--seed", required=True, type=_seed_arg)
    p.add_argument("--out", required=True)
    p.add_argument("--records", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--force", action="store_true",
                   help="augment even if the input already holds '-sub' copies")
    p.set_defaults(func=_cmd_augment)

    p = sub.add_parser("report", help="render a report as text, TSV, and figures")
    p.add_argument("--report", required=True, help="evaluation report JSON")
    p.add_argument("--out", help="write the table here instead of stdout")
    p.add_argument("--tsv", help="tab-delimited metrics file")
    p.add_argument("--figures", help="directory for PNG figures")
    p.add_argument("--label", default="all", help="row label for the top-level report")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except KcqaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
