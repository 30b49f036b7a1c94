"""Toolkit for entity-substituted knowledge-conflict QA datasets.

Builds substituted variants of MRQA-format QA datasets (corpus, type-swap,
popularity, and alias substitution), evaluates reader predictions on them
(exact match, prediction categorization, memorization ratio), and constructs
substitution-augmented training mixes.
"""

from .annotations import (
    EntityAnnotation,
    EntityType,
    annotate_dataset,
    filter_entity_instances,
    ingest_annotations,
    type_answer,
    write_annotations,
)
from .augmentation import MixedTrainingSet, build_mixed_training
from .catalog import (
    CatalogEntity,
    EntityCatalog,
    PopularityBucket,
    compute_buckets,
    load_catalog,
    sample_entity,
)
from .evaluation import (
    EvalReport,
    Outcome,
    OverlapSplit,
    Prediction,
    categorize,
    eval_conflict,
    eval_conflict_stratified,
    exact_match,
    load_predictions,
    memorization_ratio,
    normalize_answer,
    sample_other_predictions,
    simulate_reader,
    split_answer_overlap,
    typeswap_matrix,
)
from .mrqa import (
    Dataset,
    MrqaReader,
    MrqaWriter,
    QAInstance,
    parse_mrqa,
    validate_dataset,
    validate_instance,
    write_mrqa,
)
from .substitution import (
    AliasPolicy,
    AnswerPool,
    CorpusPolicy,
    PopularityPolicy,
    SubstitutedInstance,
    SubstitutionPolicy,
    SubstitutionRecord,
    TypeSwapPolicy,
    apply_substitution,
    build_answer_pool,
    generate_popularity_suite,
    read_records,
    select_substitute,
    substitute_dataset,
    write_records,
)

__version__ = "0.1.0"
