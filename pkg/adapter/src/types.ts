/** Shared types for the sidecar exporter. */

export const ENTITY_TYPES = ["PER", "DAT", "NUM", "ORG", "LOC"] as const;
export type EntityType = (typeof ENTITY_TYPES)[number];

export function isEntityType(value: string): value is EntityType {
  return (ENTITY_TYPES as readonly string[]).includes(value);
}

/** Labels the tagger can emit (spaCy-style scheme). */
export type NerLabel =
  | "PERSON"
  | "GPE"
  | "LOC"
  | "FAC"
  | "ORG"
  | "DATE"
  | "TIME"
  | "CARDINAL"
  | "QUANTITY"
  | "MONEY"
  | "PERCENT";

export interface QAInstance {
  qid: string;
  question: string;
  context: string;
  goldAnswers: string[];
}

export interface CatalogEntity {
  id: string;
  name: string;
  type: EntityType;
  popularity: number;
  aliases: string[];
}

/** One line of the annotation sidecar consumed by the pipeline. */
export interface SidecarLine {
  qid: string;
  answer: string;
  type: EntityType;
  wikidata_id?: string;
  popularity?: number;
  source: string;
}

export interface ExportSummary {
  nTyped: number;
  nUntyped: number;
  typeHistogram: Record<EntityType, number>;
}

export interface AdapterConfig {
  inputPath: string;
  outputPath: string;
  /** Tagger identifier; only "pattern-gazetteer-v1" is loadable. */
  model: string;
  /** NER label -> entity type; labels absent from the map are dropped. */
  labelMap: Record<string, EntityType>;
  catalogPath?: string;
}

export class AdapterError extends Error {}
export class ModelLoadError extends AdapterError {}
