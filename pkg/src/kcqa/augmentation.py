"""Mixed training sets: originals plus corpus-substituted copies.

Training a reader on passages whose answers have been swapped teaches it to
trust the passage over its memory. Every original instance is kept; each
instance whose passage actually contains its typed gold answer contributes
one corpus-substituted copy, appended after the originals with a "-sub" qid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .annotations import EntityAnnotation
from .errors import NoCandidateError
from .matching import contains_surface
from .mrqa import Dataset, QAInstance
from .seeding import instance_rng
from .substitution import (
    AnswerPool,
    CorpusPolicy,
    SubstitutionRecord,
    apply_substitution,
    select_substitute,
)

COPY_QID_SUFFIX = "-sub"


@dataclass
class MixedTrainingSet:
    dataset: Dataset
    n_original: int
    n_substituted: int

    @property
    def containment_rate(self) -> float:
        return self.n_substituted / self.n_original if self.n_original else 0.0

    def manifest(self) -> dict:
        return {
            "n_original": self.n_original,
            "n_substituted": self.n_substituted,
            "containment_rate": self.containment_rate,
        }


def has_substituted_copies(dataset: Dataset) -> bool:
    return any(inst.qid.endswith(COPY_QID_SUFFIX) for inst in dataset.instances)


def strip_substituted_copies(dataset: Dataset) -> Dataset:
    return Dataset(
        header=dict(dataset.header),
        instances=[i for i in dataset.instances if not i.qid.endswith(COPY_QID_SUFFIX)],
    )


def build_mixed_training(
    train: Dataset,
    annotations: Mapping[str, EntityAnnotation],
    pool: AnswerPool,
    global_seed: int,
) -> tuple[MixedTrainingSet, list[SubstitutionRecord]]:
    """Append one corpus-substituted copy per instance whose context contains its answer."""
    policy = CorpusPolicy()
    copies: list[QAInstance] = []
    records: list[SubstitutionRecord] = []
    for inst in train.instances:
        ann = annotations.get(inst.qid)
        if ann is None:
            continue
        if ann.answer_surface not in inst.gold_answers:
            continue
        if not contains_surface(inst.context, ann.answer_surface):
            continue
        copy_qid = inst.qid + COPY_QID_SUFFIX
        seed, rng = instance_rng(global_seed, copy_qid)
        try:
            choice = select_substitute(ann, policy, pool, None, rng, inst.gold_answers)
        except NoCandidateError:
            continue
        copy = QAInstance(
            qid=copy_qid,
            question=inst.question,
            context=inst.context,
            gold_answers=inst.gold_answers,
            answer_spans=inst.answer_spans,
        )
        result = apply_substitution(copy, choice.surface)
        copies.append(result.instance)
        records.append(
            SubstitutionRecord(
                qid=copy_qid,
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
        )
    mixed = Dataset(
        header=dict(train.header), instances=list(train.instances) + copies
    )
    return (
        MixedTrainingSet(
            dataset=mixed, n_original=len(train.instances), n_substituted=len(copies)
        ),
        records,
    )
