#!/usr/bin/env node
/**
 * CLI wrapper: runs the exporter over one dataset and prints the summary to
 * stderr (and optionally to a JSON file).
 *
 * Exit codes: 0 success, 1 data/model errors, 2 usage errors.
 */

import * as fs from "fs";
import { parseArgs } from "util";

import { exportAnnotations } from "./export";
import { DEFAULT_LABEL_MAP, loadLabelMap } from "./labelmap";
import { SUPPORTED_MODEL } from "./ner";
import { AdapterError } from "./types";

const USAGE = `usage: kcqa-ner-adapter --input DATA.jsonl[.gz] --out SIDECAR.jsonl
                        [--catalog CATALOG.jsonl] [--model ID]
                        [--label-map MAP.json] [--summary SUMMARY.json]

Tags each instance's gold answer, maps NER labels onto the five entity
types, and writes an annotation sidecar (default model: ${SUPPORTED_MODEL}).`;

export function runCli(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        input: { type: "string" },
        out: { type: "string" },
        catalog: { type: "string" },
        model: { type: "string", default: SUPPORTED_MODEL },
        "label-map": { type: "string" },
        summary: { type: "string" },
        help: { type: "boolean", default: false },
      },
      allowPositionals: false,
    });
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n${USAGE}\n`);
    return 2;
  }
  const values = parsed.values;
  if (values.help) {
    process.stdout.write(USAGE + "\n");
    return 0;
  }
  if (!values.input || !values.out) {
    process.stderr.write(`error: --input and --out are required\n${USAGE}\n`);
    return 2;
  }

  try {
    const labelMap = values["label-map"]
      ? loadLabelMap(values["label-map"])
      : DEFAULT_LABEL_MAP;
    const summary = exportAnnotations({
      inputPath: values.input,
      outputPath: values.out,
      model: values.model!,
      labelMap,
      catalogPath: values.catalog,
    });
    const rendered = JSON.stringify(summary, null, 2);
    process.stderr.write(rendered + "\n");
    if (values.summary) {
      fs.writeFileSync(values.summary, rendered + "\n");
    }
    return 0;
  } catch (err) {
    if (err instanceof AdapterError || err instanceof Error) {
      process.stderr.write(`error: ${(err as Error).message}\n`);
      return 1;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(runCli(process.argv.slice(2)));
}
