"""Shared fixture builders for the test suite."""

from __future__ import annotations

import random

import pytest

from kcqa import (
    CatalogEntity,
    Dataset,
    EntityAnnotation,
    EntityCatalog,
    EntityType,
    QAInstance,
)

WW1_CONTEXT = (
    "The United States declared war on Germany on April 6, 1917, over 2 years "
    "after World War I started. A ceasefire and Armistice was declared on "
    "November 11, 1918."
)
WW1_QUESTION = "Who did US fight in world war 1?"


def make_instance(qid: str, answer: str, context: str, question: str = "q?",
                  extra_golds: tuple[str, ...] = ()) -> QAInstance:
    """Instance whose spans are computed from the first occurrence of the answer.

    An answer absent from the context yields no spans (used to exercise
    filtering and error paths).
    """
    start = context.find(answer)
    spans = ((start, start + len(answer)),) if start >= 0 else ()
    return QAInstance(
        qid=qid,
        question=question,
        context=context,
        gold_answers=(answer, *extra_golds),
        answer_spans=spans,
    )


@pytest.fixture
def ww1_instance() -> QAInstance:
    return make_instance("ww1-q1", "Germany", WW1_CONTEXT, WW1_QUESTION)


@pytest.fixture
def ww1_dataset(ww1_instance) -> Dataset:
    return Dataset(header={"dataset": "fixture"}, instances=[ww1_instance])


def build_corpus(
    n: int,
    entities_per_type: int = 40,
    seed: int = 0,
    types: tuple[EntityType, ...] = tuple(EntityType),
) -> tuple[Dataset, dict[str, EntityAnnotation], EntityCatalog]:
    """Synthetic dataset + annotations + catalog with disjoint, boundary-clean surfaces.

    Every answer is the canonical name of a catalog entity, so all four
    substitution policies have candidates. Popularity values are distinct
    within each type.
    """
    entities: list[CatalogEntity] = []
    for t in types:
        for i in range(entities_per_type):
            name = f"{t.value.capitalize()}ent{i:03d}"
            entities.append(
                CatalogEntity(
                    id=f"Q{t.value}{i}",
                    name=name,
                    entity_type=t,
                    popularity=(i + 1) * 10,
                    aliases=(f"{name} prime", f"{name} junior"),
                )
            )
    catalog = EntityCatalog(entities)

    rng = random.Random(seed)
    instances: list[QAInstance] = []
    annotations: dict[str, EntityAnnotation] = {}
    for i in range(n):
        t = types[i % len(types)]
        members = catalog.entities_of_type(t)
        entity = members[rng.randrange(len(members))]
        qid = f"q{i:05d}"
        context = f"Ledger {i} notes that {entity.name} held the record that year."
        instances.append(make_instance(qid, entity.name, context))
        annotations[qid] = EntityAnnotation(
            qid=qid,
            answer_surface=entity.name,
            entity_type=t,
            wikidata_id=entity.id,
            popularity=entity.popularity,
            source="sidecar",
        )
    return Dataset(header={"dataset": "synthetic"}, instances=instances), annotations, catalog
