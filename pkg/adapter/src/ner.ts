/**
 * Answer tagging: a deterministic pattern-plus-gazetteer tagger standing in
 * for a learned NER + entity-linking pipeline. It emits spaCy-style labels;
 * the label map decides which of those become sidecar entity types.
 */

import { Catalog, LinkMethod } from "./catalog";
import { containsSurface } from "./matching";
import { EntityType, ModelLoadError, NerLabel } from "./types";

export interface TaggedAnswer {
  label: NerLabel;
  entityId?: string;
  popularity?: number;
  linkMethod?: LinkMethod;
}

export type Tagger = (answer: string, context: string) => TaggedAnswer | null;

const MONTHS =
  "january|february|march|april|may|june|july|august|september|october|november|december|" +
  "jan|feb|mar|apr|jun|jul|aug|sep|sept|oct|nov|dec";
const DAY = "\\d{1,2}(?:st|nd|rd|th)?";
const YEAR = "\\d{3,4}";

const DATE_PATTERNS: RegExp[] = [
  new RegExp(`^(?:${MONTHS})\\.?$`, "i"),
  /^[12]\d{3}$/,
  new RegExp(`^${DAY}\\s+(?:${MONTHS})\\.?(?:,?\\s+${YEAR})?$`, "i"),
  new RegExp(`^(?:${MONTHS})\\.?\\s+${DAY}(?:,?\\s+${YEAR})?$`, "i"),
  new RegExp(`^(?:${MONTHS})\\.?,?\\s+${YEAR}$`, "i"),
];

const TIME_PATTERN = /^\d{1,2}:\d{2}(?::\d{2})?\s*(?:am|pm)?$/i;
const PERCENT_PATTERN = /^[+-]?\d+(?:\.\d+)?\s*(?:%|percent)$/i;
const MONEY_PATTERN = /^[$€£]\s?\d[\d,]*(?:\.\d+)?(?:\s+(?:hundred|thousand|million|billion|trillion))?$/i;
const QUANTITY_PATTERN = /^[+-]?\d+(?:\.\d+)?\s+(?:hundred|thousand|million|billion|trillion)$/i;
const CARDINAL_PATTERNS: RegExp[] = [
  /^[+-]?\d{1,3}(?:,\d{3})+(?:\.\d+)?$/,
  /^[+-]?\d+(?:\.\d+)?$/,
];

const GAZETTEER_LABELS: Record<EntityType, NerLabel> = {
  PER: "PERSON",
  LOC: "GPE",
  ORG: "ORG",
  DAT: "DATE",
  NUM: "CARDINAL",
};

export const SUPPORTED_MODEL = "pattern-gazetteer-v1";

export function createTagger(model: string, catalog: Catalog | null): Tagger {
  if (model !== SUPPORTED_MODEL) {
    throw new ModelLoadError(
      `cannot load NER model '${model}' (available: ${SUPPORTED_MODEL})`
    );
  }
  return (answer: string, context: string): TaggedAnswer | null => {
    const text = answer.trim().replace(/\s+/g, " ");
    if (text === "" || !containsSurface(context, answer)) {
      return null; // no span in the context means nothing to label
    }
    for (const pattern of DATE_PATTERNS) {
      if (pattern.test(text)) return { label: "DATE" };
    }
    if (TIME_PATTERN.test(text)) return { label: "TIME" };
    if (PERCENT_PATTERN.test(text)) return { label: "PERCENT" };
    if (MONEY_PATTERN.test(text)) return { label: "MONEY" };
    if (QUANTITY_PATTERN.test(text)) return { label: "QUANTITY" };
    for (const pattern of CARDINAL_PATTERNS) {
      if (pattern.test(text)) return { label: "CARDINAL" };
    }
    if (catalog !== null) {
      const hit = catalog.lookup(text);
      if (hit !== null) {
        return {
          label: GAZETTEER_LABELS[hit.entity.type],
          entityId: hit.entity.id,
          popularity: hit.entity.popularity,
          linkMethod: hit.method,
        };
      }
    }
    return null;
  };
}
