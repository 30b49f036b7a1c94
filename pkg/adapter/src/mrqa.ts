/** Minimal MRQA JSONL reader: header line, then one context object per line. */

import * as fs from "fs";
import * as zlib from "zlib";

import { AdapterError, QAInstance } from "./types";

export function readMrqaInstances(path: string): QAInstance[] {
  let raw = fs.readFileSync(path);
  if (path.endsWith(".gz")) {
    raw = zlib.gunzipSync(raw);
  }
  const lines = raw.toString("utf-8").split("\n");
  if (lines.length === 0 || lines[0].trim() === "") {
    throw new AdapterError(`${path}: empty file, expected a header line`);
  }
  const head = parseLine(lines[0], 1, path);
  if (typeof head !== "object" || head === null || !("header" in head)) {
    throw new AdapterError(`${path}: line 1: missing field 'header'`);
  }

  const instances: QAInstance[] = [];
  for (let i = 1; i < lines.length; i++) {
    if (lines[i].trim() === "") continue;
    const obj = parseLine(lines[i], i + 1, path) as {
      context?: unknown;
      qas?: unknown;
    };
    if (typeof obj.context !== "string" || !Array.isArray(obj.qas)) {
      throw new AdapterError(`${path}: line ${i + 1}: missing 'context' or 'qas'`);
    }
    for (const qa of obj.qas as Array<Record<string, unknown>>) {
      const qid = qa.qid;
      const question = qa.question;
      const answers = qa.answers;
      if (typeof qid !== "string" || qid === "") {
        throw new AdapterError(`${path}: line ${i + 1}: missing or empty 'qid'`);
      }
      if (typeof question !== "string" || !Array.isArray(answers) || answers.length === 0) {
        throw new AdapterError(`${path}: line ${i + 1}: bad qa entry (qid ${qid})`);
      }
      instances.push({
        qid,
        question,
        context: obj.context,
        goldAnswers: answers.map(String),
      });
    }
  }
  return instances;
}

function parseLine(line: string, lineNumber: number, path: string): unknown {
  try {
    return JSON.parse(line);
  } catch (err) {
    throw new AdapterError(`${path}: line ${lineNumber}: malformed JSON (${(err as Error).message})`);
  }
}
