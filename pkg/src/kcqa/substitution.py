"""Answer substitution: pick a replacement under a policy and rewrite the context.

Each instance (q, a, c) becomes (q, a', c') where every occurrence of any
gold-answer surface in c is replaced by a' verbatim. Replacement candidates
come from the dataset's own answers (corpus, type-swap) or from the entity
catalog (popularity, alias). All randomness flows through per-instance
derived seeds, so output is identical however the work is scheduled.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace as dc_replace
from multiprocessing import get_context
from typing import Mapping, NamedTuple, Optional, Sequence, Union

from .annotations import EntityAnnotation, EntityType
from .catalog import EntityCatalog, PopularityBucket, compute_buckets, sample_entity
from .errors import (
    EmptyRangeError,
    NoCandidateError,
    NoOccurrenceError,
    NotFoundError,
    ParseError,
    SchemaError,
    UnlinkedAnswerError,
)
from .matching import contains_surface, find_matches, replace_matches
from .mrqa import Dataset, QAInstance
from .normalize import normalize_answer
from .seeding import instance_rng
from .streams import Source, open_bytes_sink, open_bytes_source, text_lines


@dataclass(frozen=True)
class CorpusPolicy:
    """Same-type answer sampled from the dataset's own gold answers."""

    name = "corpus"


@dataclass(frozen=True)
class TypeSwapPolicy:
    """Different-type (nonsensical) answer from the dataset's gold answers."""

    target_type: Optional[EntityType] = None
    name = "type-swap"


@dataclass(frozen=True)
class PopularityPolicy:
    """Same-type catalog entity with popularity in [lower, upper)."""

    lower: int | float
    upper: float
    name = "popularity"

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError("popularity policy requires lower < upper")


@dataclass(frozen=True)
class AliasPolicy:
    """A different surface form of the same entity, from its catalog aliases."""

    name = "alias"


SubstitutionPolicy = Union[CorpusPolicy, TypeSwapPolicy, PopularityPolicy, AliasPolicy]


@dataclass(frozen=True)
class AnswerPool:
    """Deduplicated annotated answers of a dataset, grouped by entity type."""

    by_type: Mapping[EntityType, tuple[str, ...]]

    def candidates(self, entity_type: EntityType) -> tuple[str, ...]:
        return self.by_type.get(entity_type, ())


def build_answer_pool(
    dataset: Dataset, annotations: Mapping[str, EntityAnnotation]
) -> AnswerPool:
    """Collect each annotated answer surface once under its type, sorted for determinism.

    If two annotations disagree about the type of an identical surface, the
    first one in dataset order wins.
    """
    assigned: dict[str, EntityType] = {}
    for inst in dataset.instances:
        ann = annotations.get(inst.qid)
        if ann is None or ann.answer_surface in assigned:
            continue
        assigned[ann.answer_surface] = ann.entity_type
    grouped: dict[EntityType, list[str]] = {t: [] for t in EntityType}
    for surface, entity_type in assigned.items():
        grouped[entity_type].append(surface)
    return AnswerPool(
        by_type={
            t: tuple(sorted(surfaces, key=lambda s: (s.casefold(), s)))
            for t, surfaces in grouped.items()
        }
    )


class SubstituteChoice(NamedTuple):
    surface: str
    entity_type: EntityType
    wikidata_id: Optional[str]
    popularity: Optional[int]


def select_substitute(
    annotation: EntityAnnotation,
    policy: SubstitutionPolicy,
    pool: AnswerPool,
    catalog: Optional[EntityCatalog],
    rng: random.Random,
    gold_answers: Sequence[str] = (),
) -> SubstituteChoice:
    """Draw a substitute answer under the policy.

    Corpus and type-swap candidates exclude anything whose normalized form
    collides with the instance's gold answers, so the substitute can never be
    exact-match-equal to the original.
    """
    if isinstance(policy, CorpusPolicy):
        excluded = _normalized_golds(annotation, gold_answers)
        candidates = [
            s
            for s in pool.candidates(annotation.entity_type)
            if normalize_answer(s) not in excluded
        ]
        if not candidates:
            raise NoCandidateError(policy.name, annotation.entity_type.value)
        return SubstituteChoice(
            candidates[rng.randrange(len(candidates))], annotation.entity_type, None, None
        )

    if isinstance(policy, TypeSwapPolicy):
        if policy.target_type is not None:
            if policy.target_type == annotation.entity_type:
                raise NoCandidateError(
                    policy.name,
                    annotation.entity_type.value,
                    "target type equals the original type",
                )
            source_types = [policy.target_type]
        else:
            source_types = [t for t in EntityType if t != annotation.entity_type]
        excluded = _normalized_golds(annotation, gold_answers)
        candidates = [
            (s, t)
            for t in source_types
            for s in pool.candidates(t)
            if normalize_answer(s) not in excluded
        ]
        if not candidates:
            raise NoCandidateError(policy.name, annotation.entity_type.value)
        surface, entity_type = candidates[rng.randrange(len(candidates))]
        return SubstituteChoice(surface, entity_type, None, None)

    if isinstance(policy, PopularityPolicy):
        if catalog is None:
            raise ValueError("popularity policy requires a catalog")
        entity = sample_entity(
            catalog, annotation.entity_type, policy.lower, policy.upper, rng
        )
        return SubstituteChoice(
            entity.name, annotation.entity_type, entity.id, entity.popularity
        )

    if isinstance(policy, AliasPolicy):
        if annotation.wikidata_id is None:
            raise UnlinkedAnswerError(
                f"{annotation.qid}: alias substitution needs a wikidata_id"
            )
        if catalog is None:
            raise ValueError("alias policy requires a catalog")
        folded = annotation.answer_surface.casefold()
        candidates = [
            a for a in catalog.aliases_of(annotation.wikidata_id) if a.casefold() != folded
        ]
        if not candidates:
            raise NoCandidateError(policy.name, annotation.entity_type.value, "no aliases")
        return SubstituteChoice(
            candidates[rng.randrange(len(candidates))],
            annotation.entity_type,
            annotation.wikidata_id,
            None,
        )

    raise TypeError(f"unknown policy {policy!r}")


def _normalized_golds(
    annotation: EntityAnnotation, gold_answers: Sequence[str]
) -> set[str]:
    excluded = {normalize_answer(g) for g in gold_answers}
    excluded.add(normalize_answer(annotation.answer_surface))
    return excluded


@dataclass(frozen=True)
class SubstitutionRecord:
    """Provenance of one rewrite, enough to audit or reproduce it."""

    qid: str
    policy: str
    original_answer: str
    original_type: EntityType
    substitute_answer: str
    substitute_type: EntityType
    substitute_wikidata_id: Optional[str]
    replaced_span_count: int
    ambiguous_substitute: bool
    rng_seed_used: int
    bucket_index: Optional[int] = None
    popularity_delta: Optional[int] = None

    def to_json_obj(self) -> dict:
        obj: dict = {
            "qid": self.qid,
            "policy": self.policy,
            "original_answer": self.original_answer,
            "original_type": self.original_type.value,
            "substitute_answer": self.substitute_answer,
            "substitute_type": self.substitute_type.value,
        }
        if self.substitute_wikidata_id is not None:
            obj["substitute_wikidata_id"] = self.substitute_wikidata_id
        obj["replaced_span_count"] = self.replaced_span_count
        obj["ambiguous_substitute"] = self.ambiguous_substitute
        obj["rng_seed_used"] = self.rng_seed_used
        if self.bucket_index is not None:
            obj["bucket_index"] = self.bucket_index
        if self.popularity_delta is not None:
            obj["popularity_delta"] = self.popularity_delta
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict) -> "SubstitutionRecord":
        return cls(
            qid=obj["qid"],
            policy=obj["policy"],
            original_answer=obj["original_answer"],
            original_type=EntityType(obj["original_type"]),
            substitute_answer=obj["substitute_answer"],
            substitute_type=EntityType(obj["substitute_type"]),
            substitute_wikidata_id=obj.get("substitute_wikidata_id"),
            replaced_span_count=obj["replaced_span_count"],
            ambiguous_substitute=obj["ambiguous_substitute"],
            rng_seed_used=obj["rng_seed_used"],
            bucket_index=obj.get("bucket_index"),
            popularity_delta=obj.get("popularity_delta"),
        )


@dataclass(frozen=True)
class SubstitutedInstance:
    instance: QAInstance
    record: SubstitutionRecord


@dataclass(frozen=True)
class RewriteResult:
    instance: QAInstance
    replaced_span_count: int
    ambiguous_substitute: bool


def apply_substitution(instance: QAInstance, substitute_answer: str) -> RewriteResult:
    """Replace every occurrence of any gold-answer surface with the substitute.

    The rewritten instance's only gold answer is the substitute; its spans
    point at each inserted copy. ``ambiguous_substitute`` flags substitutes
    that already occurred in the original context. The substitute is inserted
    verbatim, so a substitute that itself embeds an original surface as a
    whole word would survive the rewrite; candidate sources where that can
    happen should be screened by the caller.
    """
    matches = find_matches(instance.context, instance.gold_answers)
    if not matches:
        raise NoOccurrenceError(
            f"{instance.qid}: no gold answer occurs in the context"
        )
    ambiguous = contains_surface(instance.context, substitute_answer)
    new_context, new_spans = replace_matches(instance.context, matches, substitute_answer)
    rewritten = QAInstance(
        qid=instance.qid,
        question=instance.question,
        context=new_context,
        gold_answers=(substitute_answer,),
        answer_spans=tuple(new_spans),
    )
    return RewriteResult(rewritten, len(matches), ambiguous)


def _substitute_one(
    instance: QAInstance,
    annotations: Mapping[str, EntityAnnotation],
    policy: SubstitutionPolicy,
    pool: AnswerPool,
    catalog: Optional[EntityCatalog],
    global_seed: int,
):
    ann = annotations.get(instance.qid)
    if ann is None:
        return ("skip", instance.qid, "no-annotation")
    seed, rng = instance_rng(global_seed, instance.qid)
    try:
        choice = select_substitute(ann, policy, pool, catalog, rng, instance.gold_answers)
        result = apply_substitution(instance, choice.surface)
    except (NoCandidateError, UnlinkedAnswerError, EmptyRangeError, NotFoundError, NoOccurrenceError) as exc:
        return ("skip", instance.qid, str(exc))
    record = SubstitutionRecord(
        qid=instance.qid,
        policy=policy.name,
        original_answer=ann.answer_surface,
        original_type=ann.entity_type,
        substitute_answer=choice.surface,
        substitute_type=choice.entity_type,
        substitute_wikidata_id=choice.wikidata_id,
        replaced_span_count=result.replaced_span_count,
        ambiguous_substitute=result.ambiguous_substitute,
        rng_seed_used=seed,
    )
    return ("ok", result.instance, record)


class _Worker:
    """Picklable per-instance closure for the process pool."""

    def __init__(self, annotations, policy, pool, catalog, global_seed):
        self.args = (annotations, policy, pool, catalog, global_seed)

    def __call__(self, instance: QAInstance):
        return _substitute_one(instance, *self.args)


def substitute_dataset(
    dataset: Dataset,
    annotations: Mapping[str, EntityAnnotation],
    policy: SubstitutionPolicy,
    pool: AnswerPool,
    catalog: Optional[EntityCatalog] = None,
    global_seed: int = 0,
    parallelism: int = 1,
) -> tuple[Dataset, list[SubstitutionRecord], list[tuple[str, str]]]:
    """Substitute every instance; skipped instances carry a reason instead of aborting."""
    worker = _Worker(annotations, policy, pool, catalog, global_seed)
    if parallelism > 1 and len(dataset.instances) > 1:
        chunk = max(1, len(dataset.instances) // (parallelism * 4))
        with get_context("fork").Pool(parallelism) as procs:
            outcomes = procs.map(worker, dataset.instances, chunksize=chunk)
    else:
        outcomes = [worker(inst) for inst in dataset.instances]

    instances: list[QAInstance] = []
    records: list[SubstitutionRecord] = []
    skipped: list[tuple[str, str]] = []
    for outcome in outcomes:
        if outcome[0] == "ok":
            instances.append(outcome[1])
            records.append(outcome[2])
        else:
            skipped.append((outcome[1], outcome[2]))
    return Dataset(header=dict(dataset.header), instances=instances), records, skipped


@dataclass(frozen=True)
class BucketSubstitution:
    bucket: PopularityBucket
    dataset: Dataset
    records: list[SubstitutionRecord]
    skipped: list[tuple[str, str]]


def generate_popularity_suite(
    dataset: Dataset,
    annotations: Mapping[str, EntityAnnotation],
    catalog: EntityCatalog,
    entity_type: EntityType,
    k: int,
    global_seed: int,
    parallelism: int = 1,
) -> list[BucketSubstitution]:
    """One popularity-substituted dataset per bucket of the type's catalog partition.

    Records carry the bucket index and, where the original answer's popularity
    is known, the original-minus-substitute popularity delta.
    """
    buckets = compute_buckets(catalog, entity_type, k)
    restricted = Dataset(
        header=dict(dataset.header),
        instances=[
            inst
            for inst in dataset.instances
            if (ann := annotations.get(inst.qid)) is not None
            and ann.entity_type == entity_type
        ],
    )
    runs: list[BucketSubstitution] = []
    for bucket in buckets:
        policy = PopularityPolicy(lower=bucket.lower, upper=bucket.upper)
        sub_dataset, records, skipped = substitute_dataset(
            restricted,
            annotations,
            policy,
            AnswerPool(by_type={}),
            catalog,
            global_seed,
            parallelism,
        )
        tagged = []
        for record in records:
            delta = None
            ann = annotations[record.qid]
            sub_pop = (
                catalog.entity(record.substitute_wikidata_id).popularity
                if record.substitute_wikidata_id is not None
                else None
            )
            if ann.popularity is not None and sub_pop is not None:
                delta = ann.popularity - sub_pop
            tagged.append(
                dc_replace(record, bucket_index=bucket.index, popularity_delta=delta)
            )
        runs.append(BucketSubstitution(bucket, sub_dataset, tagged, skipped))
    return runs


def write_records(records: Sequence[SubstitutionRecord], target: Source) -> None:
    with open_bytes_sink(target) as stream:
        for record in records:
            line = json.dumps(record.to_json_obj(), ensure_ascii=False, separators=(",", ":"))
            stream.write(line.encode("utf-8") + b"\n")


def read_records(source: Source) -> list[SubstitutionRecord]:
    records: list[SubstitutionRecord] = []
    with open_bytes_source(source) as stream:
        for line_number, line in enumerate(text_lines(stream), start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(line_number, f"malformed JSON: {exc.msg}") from exc
            try:
                records.append(SubstitutionRecord.from_json_obj(obj))
            except (KeyError, ValueError) as exc:
                raise SchemaError(f"line {line_number}: bad record field: {exc}") from exc
    return records
