"""Entity typing of gold answers: sidecar ingestion, heuristic fallback, filtering.

Answers are typed as one of five entity classes (person, date, numeric,
organization, location). Externally produced sidecars are the high-quality
path; the built-in typer is a conservative pattern-plus-gazetteer fallback
that prefers returning nothing over guessing.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Optional

from .errors import ConflictError, ParseError, SchemaError
from .matching import contains_surface
from .mrqa import Dataset, QAInstance, collapse_whitespace
from .streams import Source, open_bytes_sink, open_bytes_source, text_lines

if TYPE_CHECKING:
    from .catalog import EntityCatalog


class EntityType(str, Enum):
    PER = "PER"
    DAT = "DAT"
    NUM = "NUM"
    ORG = "ORG"
    LOC = "LOC"


_SOURCE_BASES = ("sidecar", "heuristic")


@dataclass(frozen=True)
class EntityAnnotation:
    """The typed (optionally Wikidata-linked) gold answer of one instance."""

    qid: str
    answer_surface: str
    entity_type: EntityType
    wikidata_id: Optional[str] = None
    popularity: Optional[int] = None
    source: str = "sidecar"

    def __post_init__(self):
        if self.popularity is not None and self.wikidata_id is None:
            raise SchemaError(
                f"annotation {self.qid}: popularity present without wikidata_id"
            )
        if self.popularity is not None and self.popularity < 0:
            raise SchemaError(f"annotation {self.qid}: negative popularity")
        base = self.source.split(":", 1)[0]
        if base not in _SOURCE_BASES:
            raise SchemaError(
                f"annotation {self.qid}: unknown source '{self.source}' "
                f"(expected one of {_SOURCE_BASES}, optionally with a ':<link-method>' suffix)"
            )


def _annotation_from_obj(obj: dict, line_number: int) -> EntityAnnotation:
    for field_name in ("qid", "answer", "type"):
        if field_name not in obj:
            raise SchemaError(f"line {line_number}: missing field '{field_name}'")
    type_str = obj["type"]
    try:
        entity_type = EntityType(type_str)
    except ValueError:
        raise SchemaError(
            f"line {line_number}: unknown entity_type '{type_str}' (qid {obj['qid']})"
        ) from None
    return EntityAnnotation(
        qid=str(obj["qid"]),
        answer_surface=str(obj["answer"]),
        entity_type=entity_type,
        wikidata_id=obj.get("wikidata_id"),
        popularity=obj.get("popularity"),
        source=obj.get("source", "sidecar"),
    )


def ingest_annotations(source: Source) -> dict[str, EntityAnnotation]:
    """Load a sidecar JSONL file into a qid-keyed map; duplicate qids are rejected."""
    annotations: dict[str, EntityAnnotation] = {}
    with open_bytes_source(source) as stream:
        for line_number, line in enumerate(text_lines(stream), start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(line_number, f"malformed JSON: {exc.msg}") from exc
            ann = _annotation_from_obj(obj, line_number)
            if ann.qid in annotations:
                raise ConflictError(f"line {line_number}: duplicate qid '{ann.qid}'")
            annotations[ann.qid] = ann
    return annotations


def write_annotations(annotations: dict[str, EntityAnnotation], target: Source) -> None:
    with open_bytes_sink(target) as stream:
        for ann in annotations.values():
            obj: dict = {
                "qid": ann.qid,
                "answer": ann.answer_surface,
                "type": ann.entity_type.value,
            }
            if ann.wikidata_id is not None:
                obj["wikidata_id"] = ann.wikidata_id
            if ann.popularity is not None:
                obj["popularity"] = ann.popularity
            obj["source"] = ann.source
            stream.write(json.dumps(obj, ensure_ascii=False).encode("utf-8") + b"\n")


_MONTHS = (
    "january february march april may june july august september october november december "
    "jan feb mar apr jun jul aug sep sept oct nov dec"
).split()
_MONTH_ALT = "|".join(_MONTHS)
_DAY = r"\d{1,2}(?:st|nd|rd|th)?"
_YEAR = r"\d{3,4}"

_DATE_PATTERNS = [
    re.compile(rf"^(?:{_MONTH_ALT})\.?$", re.IGNORECASE),                       # June
    re.compile(r"^[12]\d{3}$"),                                                 # 1917
    re.compile(rf"^{_DAY}\s+(?:{_MONTH_ALT})\.?(?:,?\s+{_YEAR})?$", re.IGNORECASE),  # 6 April 1917
    re.compile(rf"^(?:{_MONTH_ALT})\.?\s+{_DAY}(?:,?\s+{_YEAR})?$", re.IGNORECASE),  # April 6, 1917
    re.compile(rf"^(?:{_MONTH_ALT})\.?,?\s+{_YEAR}$", re.IGNORECASE),           # April 1917
]

_MAGNITUDES = "hundred thousand million billion trillion"
_NUMERIC_PATTERNS = [
    re.compile(r"^[+-]?\d{1,3}(?:,\d{3})+(?:\.\d+)?$"),   # 757,900
    re.compile(r"^[+-]?\d+(?:\.\d+)?$"),                   # 42 / 3.2
    re.compile(
        rf"^[+-]?\d+(?:\.\d+)?\s+(?:{'|'.join(_MAGNITUDES.split())})$", re.IGNORECASE
    ),                                                     # 3.2 million
]


def type_answer(
    answer_text: str, catalog: Optional["EntityCatalog"] = None
) -> Optional[tuple[EntityType, Optional[str]]]:
    """Heuristic typer: date/number grammar first, then catalog gazetteer, else nothing."""
    text = collapse_whitespace(answer_text)
    if not text:
        return None
    for pattern in _DATE_PATTERNS:
        if pattern.match(text):
            return EntityType.DAT, None
    for pattern in _NUMERIC_PATTERNS:
        if pattern.match(text):
            return EntityType.NUM, None
    if catalog is not None:
        entity = catalog.lookup_surface(text)
        if entity is not None:
            return entity.entity_type, entity.id
    return None


def annotate_dataset(
    dataset: Dataset, catalog: Optional["EntityCatalog"] = None
) -> dict[str, EntityAnnotation]:
    """Heuristically annotate each instance.

    The first gold answer (in list order) that receives a type and occurs in
    the context becomes the annotated surface; instances with no such answer
    get no annotation.
    """
    annotations: dict[str, EntityAnnotation] = {}
    for inst in dataset.instances:
        ann = _annotate_instance(inst, catalog)
        if ann is not None:
            annotations[inst.qid] = ann
    return annotations


def _annotate_instance(
    inst: QAInstance, catalog: Optional["EntityCatalog"]
) -> Optional[EntityAnnotation]:
    for gold in inst.gold_answers:
        typed = type_answer(gold, catalog)
        if typed is None:
            continue
        if not contains_surface(inst.context, gold):
            continue
        entity_type, wikidata_id = typed
        popularity = None
        if wikidata_id is not None and catalog is not None:
            popularity = catalog.entity(wikidata_id).popularity
        return EntityAnnotation(
            qid=inst.qid,
            answer_surface=gold,
            entity_type=entity_type,
            wikidata_id=wikidata_id,
            popularity=popularity,
            source="heuristic",
        )
    return None


SKIP_NO_ANNOTATION = "no-annotation"
SKIP_NOT_IN_GOLD = "answer-not-in-gold"
SKIP_NOT_IN_CONTEXT = "answer-not-in-context"


def filter_entity_instances(
    dataset: Dataset, annotations: dict[str, EntityAnnotation]
) -> tuple[Dataset, list[tuple[str, str]]]:
    """Keep instances whose annotated answer is a gold answer occurring in the context."""
    kept: list[QAInstance] = []
    skipped: list[tuple[str, str]] = []
    for inst in dataset.instances:
        ann = annotations.get(inst.qid)
        if ann is None:
            skipped.append((inst.qid, SKIP_NO_ANNOTATION))
        elif ann.answer_surface not in inst.gold_answers:
            skipped.append((inst.qid, SKIP_NOT_IN_GOLD))
        elif not contains_surface(inst.context, ann.answer_surface):
            skipped.append((inst.qid, SKIP_NOT_IN_CONTEXT))
        else:
            kept.append(inst)
    return Dataset(header=dict(dataset.header), instances=kept), skipped
