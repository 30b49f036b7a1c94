/** NER label -> entity type mapping; unmapped labels drop to "no annotation". */

import * as fs from "fs";

import { AdapterError, EntityType, isEntityType } from "./types";

export const DEFAULT_LABEL_MAP: Record<string, EntityType> = {
  PERSON: "PER",
  GPE: "LOC",
  LOC: "LOC",
  FAC: "LOC",
  ORG: "ORG",
  DATE: "DAT",
  TIME: "DAT",
  CARDINAL: "NUM",
  QUANTITY: "NUM",
  MONEY: "NUM",
  PERCENT: "NUM",
};

export function loadLabelMap(path: string): Record<string, EntityType> {
  let obj: Record<string, unknown>;
  try {
    obj = JSON.parse(fs.readFileSync(path, "utf-8"));
  } catch (err) {
    throw new AdapterError(`${path}: not a valid JSON label map (${(err as Error).message})`);
  }
  const map: Record<string, EntityType> = {};
  for (const [label, target] of Object.entries(obj)) {
    if (typeof target !== "string" || !isEntityType(target)) {
      throw new AdapterError(
        `${path}: label '${label}' maps to '${target}', expected one of PER|DAT|NUM|ORG|LOC`
      );
    }
    map[label] = target;
  }
  return map;
}
