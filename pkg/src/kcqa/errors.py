"""Exception taxonomy shared across the toolkit.

Errors signal unusable inputs (bad files, impossible requests); per-instance
conditions that are expected in normal runs (no substitution candidate, an
unlinked answer) are also exceptions here, but pipeline drivers catch them and
turn them into skip records instead of aborting.
"""


class KcqaError(Exception):
    """Base class for all toolkit errors."""


class ParseError(KcqaError):
    """A line of an input file is not valid JSON."""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class SchemaError(KcqaError):
    """An input record is valid JSON but violates the expected schema."""


class ValidationError(KcqaError):
    """Structured data violates a documented invariant."""


class ConflictError(KcqaError):
    """A duplicate key (qid, entity id) was encountered."""


class NotFoundError(KcqaError):
    """A referenced identifier is absent from the catalog."""


class InsufficientPopulationError(KcqaError):
    """Too few entities of the requested type to form the requested buckets."""


class EmptyRangeError(KcqaError):
    """No catalog entity of the requested type falls inside the popularity bounds."""


class NoCandidateError(KcqaError):
    """The substitution policy admits no candidate answer for this instance."""

    def __init__(self, policy: str, entity_type: str, detail: str = ""):
        self.policy = policy
        self.entity_type = entity_type
        msg = f"no candidate under policy '{policy}' for type {entity_type}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class UnlinkedAnswerError(KcqaError):
    """Alias substitution requires a Wikidata link the annotation does not have."""


class NoOccurrenceError(KcqaError):
    """No gold-answer surface occurs in the context; nothing to rewrite."""


class MissingPredictionError(KcqaError):
    """Evaluation was asked about qids absent from a prediction file."""

    def __init__(self, qids):
        self.qids = list(qids)
        shown = ", ".join(self.qids[:10])
        suffix = "" if len(self.qids) <= 10 else f" (+{len(self.qids) - 10} more)"
        super().__init__(f"missing predictions for qids: {shown}{suffix}")
