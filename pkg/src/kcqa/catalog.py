"""Entity catalog: names, aliases, types, popularity; buckets and sampling.

The catalog is a static snapshot loaded from JSONL; nothing is fetched live,
so the file is the single source of truth for popularity values and every run
over the same file is reproducible.
"""

from __future__ import annotations

import json
import logging
import math
import random
from bisect import bisect_left
from dataclasses import dataclass
from typing import Iterable, Optional

from .annotations import EntityType
from .errors import (
    ConflictError,
    EmptyRangeError,
    InsufficientPopulationError,
    NotFoundError,
    ParseError,
    SchemaError,
)
from .streams import Source, open_bytes_source, text_lines

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CatalogEntity:
    id: str
    name: str
    entity_type: EntityType
    popularity: int
    aliases: tuple[str, ...] = ()


@dataclass(frozen=True)
class PopularityBucket:
    """One slice of a popularity partition; lower inclusive, upper exclusive."""

    index: int
    lower: int
    upper: float  # math.inf for the last bucket
    member_count: int

    def contains(self, popularity: int | float) -> bool:
        return self.lower <= popularity < self.upper


class EntityCatalog:
    """Immutable after construction; all queries are read-only and thread-safe."""

    def __init__(self, entities: Iterable[CatalogEntity]):
        self._entities: list[CatalogEntity] = []
        self._by_id: dict[str, CatalogEntity] = {}
        self._by_surface: dict[str, list[str]] = {}
        for entity in entities:
            if entity.id in self._by_id:
                raise ConflictError(f"duplicate entity id '{entity.id}'")
            if entity.popularity < 0:
                raise SchemaError(f"entity {entity.id}: negative popularity")
            entity = _repair_aliases(entity)
            self._entities.append(entity)
            self._by_id[entity.id] = entity
            for surface in (entity.name, *entity.aliases):
                self._by_surface.setdefault(surface.casefold(), []).append(entity.id)

        self._by_type: dict[EntityType, list[CatalogEntity]] = {t: [] for t in EntityType}
        for entity in self._entities:
            self._by_type[entity.entity_type].append(entity)
        for members in self._by_type.values():
            members.sort(key=lambda e: (e.popularity, e.id))
        self._type_pops: dict[EntityType, list[int]] = {
            t: [e.popularity for e in members] for t, members in self._by_type.items()
        }

    def __len__(self) -> int:
        return len(self._entities)

    @property
    def entities(self) -> tuple[CatalogEntity, ...]:
        return tuple(self._entities)

    def entity(self, entity_id: str) -> CatalogEntity:
        try:
            return self._by_id[entity_id]
        except KeyError:
            raise NotFoundError(f"unknown entity id '{entity_id}'") from None

    def aliases_of(self, entity_id: str) -> tuple[str, ...]:
        """Aliases in load order; the canonical name is not included."""
        return self.entity(entity_id).aliases

    def lookup_surface(self, surface: str) -> Optional[CatalogEntity]:
        """Case-insensitive name/alias lookup; first loaded entity wins ties."""
        ids = self._by_surface.get(surface.casefold())
        return self._by_id[ids[0]] if ids else None

    def entities_of_type(self, entity_type: EntityType) -> tuple[CatalogEntity, ...]:
        """Entities of the type, sorted by (popularity, id)."""
        return tuple(self._by_type[entity_type])

    def indexes_consistent(self) -> bool:
        """Rebuild the indexes from the entity list and compare."""
        rebuilt = EntityCatalog(self._entities)
        return (
            rebuilt._by_id == self._by_id
            and rebuilt._by_type == self._by_type
            and rebuilt._by_surface == self._by_surface
        )


def _repair_aliases(entity: CatalogEntity) -> CatalogEntity:
    kept: list[str] = []
    seen = {entity.name.casefold()}
    for alias in entity.aliases:
        folded = alias.casefold()
        if folded in seen:
            logger.warning(
                "entity %s: dropping alias %r duplicating the name or an earlier alias",
                entity.id,
                alias,
            )
            continue
        seen.add(folded)
        kept.append(alias)
    if len(kept) == len(entity.aliases):
        return entity
    return CatalogEntity(
        id=entity.id,
        name=entity.name,
        entity_type=entity.entity_type,
        popularity=entity.popularity,
        aliases=tuple(kept),
    )


def load_catalog(source: Source) -> EntityCatalog:
    """Load catalog JSONL ({"id","name","type","popularity","aliases"})."""
    entities: list[CatalogEntity] = []
    with open_bytes_source(source) as stream:
        for line_number, line in enumerate(text_lines(stream), start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(line_number, f"malformed JSON: {exc.msg}") from exc
            for field_name in ("id", "name", "type", "popularity"):
                if field_name not in obj:
                    raise SchemaError(f"line {line_number}: missing field '{field_name}'")
            try:
                entity_type = EntityType(obj["type"])
            except ValueError:
                raise SchemaError(
                    f"line {line_number}: unknown entity_type '{obj['type']}'"
                ) from None
            popularity = obj["popularity"]
            if not isinstance(popularity, int) or popularity < 0:
                raise SchemaError(
                    f"line {line_number}: popularity must be a non-negative integer"
                )
            entities.append(
                CatalogEntity(
                    id=str(obj["id"]),
                    name=str(obj["name"]),
                    entity_type=entity_type,
                    popularity=popularity,
                    aliases=tuple(str(a) for a in obj.get("aliases", [])),
                )
            )
    return EntityCatalog(entities)


def compute_buckets(
    catalog: EntityCatalog, entity_type: EntityType, k: int
) -> list[PopularityBucket]:
    """Split the type's entities into k contiguous popularity groups of near-equal size.

    Entities are ordered by (popularity, id); the first ``n % k`` buckets take
    the extra member. Bounds come from boundary members, so membership is
    decidable from the bounds alone when popularity values do not straddle a
    boundary.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    members = catalog.entities_of_type(entity_type)
    n = len(members)
    if n < k:
        raise InsufficientPopulationError(
            f"{n} entities of type {entity_type.value}, need at least {k}"
        )
    base, extra = divmod(n, k)
    buckets: list[PopularityBucket] = []
    start = 0
    for index in range(k):
        size = base + (1 if index < extra else 0)
        end = start + size
        upper = math.inf if index == k - 1 else float(members[end].popularity)
        buckets.append(
            PopularityBucket(
                index=index,
                lower=members[start].popularity,
                upper=upper,
                member_count=size,
            )
        )
        start = end
    return buckets


def sample_entity(
    catalog: EntityCatalog,
    entity_type: EntityType,
    lower: int | float,
    upper: int | float,
    rng: random.Random,
) -> CatalogEntity:
    """Uniform draw over entities of the type with lower <= popularity < upper."""
    members = catalog.entities_of_type(entity_type)
    pops = catalog._type_pops[entity_type]
    lo = bisect_left(pops, lower)
    hi = bisect_left(pops, upper)
    if lo >= hi:
        raise EmptyRangeError(
            f"no {entity_type.value} entity with popularity in [{lower}, {upper})"
        )
    return members[lo + rng.randrange(hi - lo)]
