/**
 * Sidecar export: tag each instance's gold answer, map the label, link it to
 * the catalog, and emit one validated annotation line per typed instance.
 */

import * as fs from "fs";

import { Catalog, loadCatalog } from "./catalog";
import { readMrqaInstances } from "./mrqa";
import { createTagger } from "./ner";
import {
  AdapterConfig,
  AdapterError,
  ENTITY_TYPES,
  EntityType,
  ExportSummary,
  SidecarLine,
  isEntityType,
} from "./types";

/** Schema check applied to every line before it is written. */
export function validateSidecarLine(line: SidecarLine): void {
  if (!line.qid) throw new AdapterError("sidecar line without qid");
  if (!line.answer) throw new AdapterError(`${line.qid}: sidecar line without answer`);
  if (!isEntityType(line.type)) {
    throw new AdapterError(`${line.qid}: bad entity type '${line.type}'`);
  }
  if (line.popularity !== undefined) {
    if (line.wikidata_id === undefined) {
      throw new AdapterError(`${line.qid}: popularity present without wikidata_id`);
    }
    if (!Number.isInteger(line.popularity) || line.popularity < 0) {
      throw new AdapterError(`${line.qid}: popularity must be a non-negative integer`);
    }
  }
  const base = line.source.split(":", 1)[0];
  if (base !== "sidecar" && base !== "heuristic") {
    throw new AdapterError(`${line.qid}: bad source '${line.source}'`);
  }
}

function emptyHistogram(): Record<EntityType, number> {
  return Object.fromEntries(ENTITY_TYPES.map((t) => [t, 0])) as Record<EntityType, number>;
}

export function exportAnnotations(config: AdapterConfig): ExportSummary {
  const catalog: Catalog | null = config.catalogPath
    ? loadCatalog(config.catalogPath)
    : null;
  const tagger = createTagger(config.model, catalog);
  const instances = readMrqaInstances(config.inputPath);

  const summary: ExportSummary = {
    nTyped: 0,
    nUntyped: 0,
    typeHistogram: emptyHistogram(),
  };
  const out: string[] = [];
  for (const inst of instances) {
    let line: SidecarLine | null = null;
    for (const gold of inst.goldAnswers) {
      const tagged = tagger(gold, inst.context);
      if (tagged === null) continue;
      const mapped = config.labelMap[tagged.label];
      if (mapped === undefined) continue; // unmapped label drops to "no annotation"
      line = {
        qid: inst.qid,
        answer: gold,
        type: mapped,
        source: tagged.linkMethod ? `sidecar:${tagged.linkMethod}` : "sidecar",
      };
      if (tagged.entityId !== undefined) {
        line.wikidata_id = tagged.entityId;
        if (tagged.popularity !== undefined) line.popularity = tagged.popularity;
      }
      break; // first typable gold answer wins
    }
    if (line === null) {
      summary.nUntyped += 1;
      continue;
    }
    validateSidecarLine(line);
    out.push(JSON.stringify(line));
    summary.nTyped += 1;
    summary.typeHistogram[line.type] += 1;
  }
  fs.writeFileSync(config.outputPath, out.join("\n") + (out.length > 0 ? "\n" : ""));
  return summary;
}
