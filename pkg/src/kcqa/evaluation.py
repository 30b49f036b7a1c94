"""Scoring of reader predictions against original and substituted datasets.

The conflict analysis restricts itself to instances the model answered
correctly on the unaltered example, then classifies each prediction on the
substituted example as the original answer, the substitute answer, or other.
The memorization ratio original/(original+substitute) measures how often the
model falls back on what it memorized instead of reading the context.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Mapping, Optional, Sequence

from .annotations import EntityType
from .errors import MissingPredictionError, SchemaError, ValidationError
from .mrqa import Dataset
from .normalize import exact_match, normalize_answer  # noqa: F401  (re-exported surface)
from .streams import Source, open_bytes_sink, open_bytes_source
from .substitution import SubstitutionRecord


class Outcome(str, Enum):
    ORIGINAL = "original"
    SUBSTITUTE = "substitute"
    OTHER = "other"


@dataclass(frozen=True)
class Prediction:
    qid: str
    text: str
    score: Optional[float] = None


def load_predictions(source: Source) -> dict[str, Prediction]:
    """Prediction JSON: object mapping qid to a bare string or {"text", "score"}."""
    with open_bytes_source(source) as stream:
        try:
            obj = json.load(stream)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"prediction file is not valid JSON: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise SchemaError("prediction file must be a JSON object keyed by qid")
    predictions: dict[str, Prediction] = {}
    for qid, value in obj.items():
        if isinstance(value, str):
            predictions[qid] = Prediction(qid=qid, text=value)
        elif isinstance(value, dict) and isinstance(value.get("text"), str):
            score = value.get("score")
            if score is not None and not isinstance(score, (int, float)):
                raise SchemaError(f"prediction {qid}: score must be a number")
            predictions[qid] = Prediction(qid=qid, text=value["text"], score=score)
        else:
            raise SchemaError(f"prediction {qid}: expected a string or {{'text', 'score'}}")
    return predictions


def categorize(
    prediction_on_substituted: str,
    original_golds: Sequence[str],
    substitute_answer: str,
) -> Outcome:
    """Classify a prediction made on the substituted example.

    The substitute is checked first so records produced outside this package,
    where the substitute may normalize onto an original gold variant, still
    get a defined answer.
    """
    if exact_match(prediction_on_substituted, [substitute_answer]):
        return Outcome.SUBSTITUTE
    if exact_match(prediction_on_substituted, original_golds):
        return Outcome.ORIGINAL
    return Outcome.OTHER


def memorization_ratio(original_count: int, substitute_count: int) -> Optional[float]:
    """original/(original+substitute); None when there is nothing to divide."""
    if original_count < 0 or substitute_count < 0:
        raise ValueError("counts must be non-negative")
    total = original_count + substitute_count
    if total == 0:
        return None
    return original_count / total


@dataclass
class EvalReport:
    n_total: int
    n_correct_on_original: int
    counts: dict[Outcome, int]
    percent: dict[Outcome, float]
    memorization_ratio: Optional[float]
    confidence_gt: Optional[dict[str, Optional[float]]] = None
    strata: Optional[dict[str, "EvalReport"]] = None

    def to_json_obj(self) -> dict:
        return {
            "n_total": self.n_total,
            "n_correct_on_original": self.n_correct_on_original,
            "counts": {o.value: self.counts[o] for o in Outcome},
            "percent": {o.value: self.percent[o] for o in Outcome},
            "memorization_ratio": self.memorization_ratio,
            "confidence_gt": self.confidence_gt,
            "strata": (
                {label: report.to_json_obj() for label, report in self.strata.items()}
                if self.strata is not None
                else None
            ),
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "EvalReport":
        strata = obj.get("strata")
        return cls(
            n_total=obj["n_total"],
            n_correct_on_original=obj["n_correct_on_original"],
            counts={o: obj["counts"][o.value] for o in Outcome},
            percent={o: obj["percent"][o.value] for o in Outcome},
            memorization_ratio=obj["memorization_ratio"],
            confidence_gt=obj.get("confidence_gt"),
            strata=(
                {label: cls.from_json_obj(sub) for label, sub in strata.items()}
                if strata is not None
                else None
            ),
        )


def save_report(report: EvalReport, target: Source) -> None:
    with open_bytes_sink(target) as stream:
        stream.write(json.dumps(report.to_json_obj(), indent=2).encode("utf-8") + b"\n")


def load_report(source: Source) -> EvalReport:
    with open_bytes_source(source) as stream:
        return EvalReport.from_json_obj(json.load(stream))


def eval_conflict(
    original_preds: Mapping[str, Prediction],
    substituted_preds: Mapping[str, Prediction],
    original_dataset: Dataset,
    records: Sequence[SubstitutionRecord],
) -> EvalReport:
    """Categorize substituted predictions for instances answered correctly pre-substitution."""
    missing = [
        r.qid
        for r in records
        if r.qid not in original_preds or r.qid not in substituted_preds
    ]
    if missing:
        raise MissingPredictionError(missing)
    by_qid = original_dataset.by_qid()
    absent = [r.qid for r in records if r.qid not in by_qid]
    if absent:
        raise ValidationError(
            f"records reference qids absent from the dataset: {', '.join(absent[:10])}"
        )

    counts = {o: 0 for o in Outcome}
    gt_pairs: dict[Outcome, list[bool]] = {o: [] for o in Outcome}
    n_correct = 0
    for record in records:
        inst = by_qid[record.qid]
        if not exact_match(original_preds[record.qid].text, inst.gold_answers):
            continue
        n_correct += 1
        outcome = categorize(
            substituted_preds[record.qid].text, inst.gold_answers, record.substitute_answer
        )
        counts[outcome] += 1
        p_orig = original_preds[record.qid].score
        p_sub = substituted_preds[record.qid].score
        if p_orig is not None and p_sub is not None:
            gt_pairs[outcome].append(p_orig > p_sub)

    percent = {
        o: (100.0 * counts[o] / n_correct if n_correct else 0.0) for o in Outcome
    }
    confidence_gt: Optional[dict[str, Optional[float]]] = None
    all_pairs = [flag for flags in gt_pairs.values() for flag in flags]
    if all_pairs:
        confidence_gt = {
            o.value: (100.0 * sum(gt_pairs[o]) / len(gt_pairs[o]) if gt_pairs[o] else None)
            for o in Outcome
        }
        confidence_gt["overall"] = 100.0 * sum(all_pairs) / len(all_pairs)

    return EvalReport(
        n_total=len(records),
        n_correct_on_original=n_correct,
        counts=counts,
        percent=percent,
        memorization_ratio=memorization_ratio(
            counts[Outcome.ORIGINAL], counts[Outcome.SUBSTITUTE]
        ),
        confidence_gt=confidence_gt,
    )


def eval_conflict_stratified(
    original_preds: Mapping[str, Prediction],
    substituted_preds: Mapping[str, Prediction],
    original_dataset: Dataset,
    records: Sequence[SubstitutionRecord],
    key_fn: Callable[[SubstitutionRecord], str],
) -> EvalReport:
    """Overall report plus one nested report per ``key_fn`` group."""
    overall = eval_conflict(original_preds, substituted_preds, original_dataset, records)
    groups: dict[str, list[SubstitutionRecord]] = {}
    for record in records:
        groups.setdefault(key_fn(record), []).append(record)
    overall.strata = {
        label: eval_conflict(original_preds, substituted_preds, original_dataset, group)
        for label, group in sorted(groups.items())
    }
    return overall


def bucket_stratum_key(record: SubstitutionRecord) -> str:
    index = record.bucket_index if record.bucket_index is not None else "?"
    return f"bucket-{index}"


def type_pair_stratum_key(record: SubstitutionRecord) -> str:
    return f"{record.original_type.value}->{record.substitute_type.value}"


@dataclass
class OverlapSplit:
    ao: Dataset
    nao: Dataset


def split_answer_overlap(dev: Dataset, train: Dataset) -> OverlapSplit:
    """Partition dev by whether any normalized gold answer appears in the training answers."""
    train_answers = {
        normalize_answer(g) for inst in train.instances for g in inst.gold_answers
    }
    ao = Dataset(header=dict(dev.header))
    nao = Dataset(header=dict(dev.header))
    for inst in dev.instances:
        if any(normalize_answer(g) in train_answers for g in inst.gold_answers):
            ao.instances.append(inst)
        else:
            nao.instances.append(inst)
    return OverlapSplit(ao=ao, nao=nao)


def typeswap_matrix(
    per_pair_reports: Mapping[tuple[EntityType, EntityType], EvalReport],
) -> dict[EntityType, dict[EntityType, Optional[float]]]:
    """5x5 grid of memorization ratios keyed (original type, substitute type)."""
    for original_type, substitute_type in per_pair_reports:
        if original_type == substitute_type:
            raise ValidationError(
                f"type-swap pair ({original_type.value}, {substitute_type.value}) is diagonal"
            )
    grid: dict[EntityType, dict[EntityType, Optional[float]]] = {
        t: {u: None for u in EntityType} for t in EntityType
    }
    for (original_type, substitute_type), report in per_pair_reports.items():
        grid[original_type][substitute_type] = report.memorization_ratio
    return grid


@dataclass(frozen=True)
class OtherSample:
    qid: str
    question: str
    context: str
    original_answer: str
    substitute_answer: str
    prediction: str


def sample_other_predictions(
    original_dataset: Dataset,
    substituted_dataset: Dataset,
    records: Sequence[SubstitutionRecord],
    original_preds: Mapping[str, Prediction],
    substituted_preds: Mapping[str, Prediction],
    n: int,
    rng: random.Random,
) -> list[OtherSample]:
    """Uniform sample (without replacement) of predictions classified as Other."""
    if n < 0:
        raise ValueError("n must be non-negative")
    original_by_qid = original_dataset.by_qid()
    substituted_by_qid = substituted_dataset.by_qid()
    others: list[SubstitutionRecord] = []
    for record in records:
        inst = original_by_qid[record.qid]
        if not exact_match(original_preds[record.qid].text, inst.gold_answers):
            continue
        outcome = categorize(
            substituted_preds[record.qid].text, inst.gold_answers, record.substitute_answer
        )
        if outcome is Outcome.OTHER:
            others.append(record)
    chosen = others if len(others) <= n else rng.sample(others, n)
    return [
        OtherSample(
            qid=record.qid,
            question=original_by_qid[record.qid].question,
            context=substituted_by_qid[record.qid].context,
            original_answer=record.original_answer,
            substitute_answer=record.substitute_answer,
            prediction=substituted_preds[record.qid].text,
        )
        for record in chosen
    ]


SIMULATED_OTHER_ANSWER = "xyzzy unanswerable stub"


def simulate_reader(
    substituted: Dataset,
    records: Sequence[SubstitutionRecord],
    memorization_prob: float,
    other_prob: float,
    rng: random.Random,
) -> dict[str, Prediction]:
    """Synthetic reader over the substituted set, for exercising the metrics pipeline.

    Per instance, independently: predict the original answer with probability
    ``memorization_prob``, a fixed out-of-vocabulary string with probability
    ``other_prob``, otherwise the substitute answer. Scores are uniform(0,1).
    """
    if memorization_prob < 0 or other_prob < 0:
        raise ValueError("probabilities must be non-negative")
    if memorization_prob + other_prob > 1:
        raise ValueError("memorization_prob + other_prob must not exceed 1")
    qids = {inst.qid for inst in substituted.instances}
    predictions: dict[str, Prediction] = {}
    for record in records:
        if record.qid not in qids:
            continue
        roll = rng.random()
        if roll < memorization_prob:
            text = record.original_answer
        elif roll < memorization_prob + other_prob:
            text = SIMULATED_OTHER_ANSWER
        else:
            text = record.substitute_answer
        predictions[record.qid] = Prediction(
            qid=record.qid, text=text, score=rng.random()
        )
    return predictions
