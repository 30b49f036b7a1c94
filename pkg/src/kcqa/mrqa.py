"""MRQA shared-task JSONL reading, writing, and validation.

On disk a dataset is one header line ``{"header": {...}}`` followed by one
JSON object per context, each holding a ``qas`` array. Char spans are
inclusive on both ends in the file format; in memory every span is half-open.
Multiple qas under one context are flattened to one instance per (question,
context) pair, because every downstream transform works per pair.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, BinaryIO, Iterator

from .errors import ParseError, SchemaError, ValidationError
from .streams import Source, open_bytes_sink, open_bytes_source, text_lines


def collapse_whitespace(text: str) -> str:
    return " ".join(text.split())


@dataclass(frozen=True)
class QAInstance:
    """One question/context/answers record."""

    qid: str
    question: str
    context: str
    gold_answers: tuple[str, ...]
    answer_spans: tuple[tuple[int, int], ...] = ()


@dataclass
class Dataset:
    """An ordered list of instances plus the free-form header record."""

    header: dict[str, Any] = field(default_factory=dict)
    instances: list[QAInstance] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.instances)

    def by_qid(self) -> dict[str, QAInstance]:
        return {inst.qid: inst for inst in self.instances}


def _qa_to_instances(obj: dict, line_number: int) -> Iterator[QAInstance]:
    if "context" not in obj:
        raise SchemaError(f"line {line_number}: missing field 'context'")
    context = obj["context"]
    if not isinstance(context, str):
        raise SchemaError(f"line {line_number}: 'context' must be a string")
    qas = obj.get("qas")
    if not isinstance(qas, list):
        raise SchemaError(f"line {line_number}: missing field 'qas'")

    for qa in qas:
        qid = qa.get("qid")
        if not qid or not isinstance(qid, str):
            raise SchemaError(f"line {line_number}: missing or empty 'qid'")
        if "question" not in qa:
            raise SchemaError(f"line {line_number}: missing field 'question' (qid {qid})")
        answers = qa.get("answers")
        if answers is None:
            raise SchemaError(f"line {line_number}: missing field 'answers' (qid {qid})")
        if not answers:
            raise SchemaError(f"line {line_number}: gold_answers empty (qid {qid})")
        detected = qa.get("detected_answers")
        if detected is None:
            raise SchemaError(f"line {line_number}: missing field 'detected_answers' (qid {qid})")

        spans: list[tuple[int, int]] = []
        for det in detected:
            for pair in det.get("char_spans", []):
                start, end_incl = int(pair[0]), int(pair[1])
                end = end_incl + 1
                if not (0 <= start < end <= len(context)):
                    raise ValidationError(
                        f"line {line_number}: span ({start}, {end_incl}) out of bounds "
                        f"for context of length {len(context)} (qid {qid})"
                    )
                spans.append((start, end))

        yield QAInstance(
            qid=qid,
            question=str(qa["question"]),
            context=context,
            gold_answers=tuple(str(a) for a in answers),
            answer_spans=tuple(spans),
        )


class MrqaReader:
    """Streaming reader: exposes the header, then iterates instances one line at a time."""

    def __init__(self, stream: BinaryIO):
        self._lines = text_lines(stream)
        try:
            first = next(self._lines)
        except StopIteration:
            raise ParseError(1, "empty file, expected a header line") from None
        try:
            head = json.loads(first)
        except json.JSONDecodeError as exc:
            raise ParseError(1, f"malformed JSON: {exc.msg}") from exc
        if not isinstance(head, dict) or "header" not in head:
            raise SchemaError("line 1: missing field 'header'")
        self.header: dict[str, Any] = head["header"]
        self._line_number = 1

    def __iter__(self) -> Iterator[QAInstance]:
        for line in self._lines:
            self._line_number += 1
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(self._line_number, f"malformed JSON: {exc.msg}") from exc
            yield from _qa_to_instances(obj, self._line_number)


def parse_mrqa(source: Source, gzipped: bool | None = None) -> Dataset:
    """Parse a full dataset into memory, enforcing qid uniqueness."""
    with open_bytes_source(source, gzipped) as stream:
        reader = MrqaReader(stream)
        instances: list[QAInstance] = []
        seen: set[str] = set()
        for inst in reader:
            if inst.qid in seen:
                raise ValidationError(f"duplicate qid '{inst.qid}'")
            seen.add(inst.qid)
            instances.append(inst)
        return Dataset(header=reader.header, instances=instances)


def _instance_to_line(inst: QAInstance) -> dict:
    detected = [
        {"text": inst.context[start:end], "char_spans": [[start, end - 1]]}
        for start, end in inst.answer_spans
    ]
    return {
        "context": inst.context,
        "qas": [
            {
                "qid": inst.qid,
                "question": inst.question,
                "answers": list(inst.gold_answers),
                "detected_answers": detected,
            }
        ],
    }


def _dump(obj: dict) -> bytes:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":")).encode("utf-8")


def write_mrqa(dataset: Dataset, target: Source, gzipped: bool | None = None) -> None:
    """Write a dataset; output re-parses to an equal Dataset and is byte-deterministic."""
    with open_bytes_sink(target, gzipped) as stream:
        stream.write(_dump({"header": dataset.header}) + b"\n")
        for inst in dataset.instances:
            stream.write(_dump(_instance_to_line(inst)) + b"\n")


class MrqaWriter:
    """Streaming counterpart of MrqaReader for pipelines that never hold the full dataset."""

    def __init__(self, stream: BinaryIO, header: dict[str, Any]):
        self._stream = stream
        self._stream.write(_dump({"header": header}) + b"\n")

    def write(self, inst: QAInstance) -> None:
        self._stream.write(_dump(_instance_to_line(inst)) + b"\n")


def validate_instance(instance: QAInstance) -> list[str]:
    """All invariant violations of one instance; empty when it is well formed."""
    violations: list[str] = []
    if not instance.qid:
        violations.append("qid: empty")
    if not instance.gold_answers:
        violations.append("gold_answers: empty")
    collapsed_golds = {collapse_whitespace(g) for g in instance.gold_answers}
    for i, (start, end) in enumerate(instance.answer_spans):
        if not 0 <= start < end:
            violations.append(f"answer_spans[{i}]: start must satisfy 0 <= start < end")
            continue
        if end > len(instance.context):
            violations.append(f"answer_spans[{i}]: end > context length")
            continue
        text = collapse_whitespace(instance.context[start:end])
        if text not in collapsed_golds:
            violations.append(
                f"answer_spans[{i}]: text {instance.context[start:end]!r} does not match any gold answer"
            )
    return violations


def validate_dataset(dataset: Dataset) -> list[str]:
    """Instance violations prefixed with qid, plus duplicate-qid checks."""
    violations: list[str] = []
    seen: set[str] = set()
    for inst in dataset.instances:
        if inst.qid in seen:
            violations.append(f"{inst.qid}: duplicate qid")
        seen.add(inst.qid)
        violations.extend(f"{inst.qid}: {v}" for v in validate_instance(inst))
    return violations
