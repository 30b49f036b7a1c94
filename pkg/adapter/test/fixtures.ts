/** Builders for a 50-instance MRQA fixture plus a matching entity catalog. */

import * as fs from "fs";
import * as path from "path";

import { CatalogEntity, EntityType } from "../src/types";

export interface Fixture {
  datasetPath: string;
  catalogPath: string;
  /** qid -> gold answer, for every instance including untypeable ones */
  answers: Map<string, string>;
  nTypeable: number;
  nUntypeable: number;
}

function catalogEntities(): CatalogEntity[] {
  const make = (prefix: string, type: EntityType, count: number): CatalogEntity[] =>
    Array.from({ length: count }, (_, i) => ({
      id: `Q${type}${i}`,
      name: `${prefix}${i}`,
      type,
      popularity: (i + 1) * 100,
      aliases: [`${prefix}${i} the Elder`],
    }));
  return [
    ...make("Arelia Vance", "PER", 14),
    ...make("Westmarch Province", "LOC", 14),
    ...make("Helix Works", "ORG", 14),
  ];
}

export function buildFixture(dir: string): Fixture {
  const entities = catalogEntities();
  const catalogPath = path.join(dir, "catalog.jsonl");
  fs.writeFileSync(
    catalogPath,
    entities.map((e) => JSON.stringify(e)).join("\n") + "\n"
  );

  const byType = (t: EntityType) => entities.filter((e) => e.type === t);
  const answers: string[] = [];
  for (let i = 0; i < 12; i++) answers.push(byType("PER")[i].name);
  for (let i = 0; i < 12; i++) answers.push(byType("LOC")[i].name);
  // two ORG answers appear via an alias surface to exercise alias linking
  for (let i = 0; i < 10; i++) answers.push(byType("ORG")[i].name);
  answers.push(byType("ORG")[10].aliases[0], byType("ORG")[11].aliases[0]);
  for (let i = 0; i < 7; i++) answers.push(`April ${i + 1}, 19${10 + i}`);
  answers.push("3.2 million", "757,900", "42", "1,000,000");
  const untypeable = ["running quickly", "beneath the waves", "of great renown"];
  answers.push(...untypeable);

  const lines: string[] = [JSON.stringify({ header: { dataset: "adapter-fixture" } })];
  const answerByQid = new Map<string, string>();
  answers.forEach((answer, i) => {
    const qid = `f${String(i).padStart(3, "0")}`;
    const context = `Chronicle ${i} reports that ${answer} settled the dispute.`;
    const start = context.indexOf(answer);
    lines.push(
      JSON.stringify({
        context,
        qas: [
          {
            qid,
            question: `Who settled dispute ${i}?`,
            answers: [answer],
            detected_answers: [
              { text: answer, char_spans: [[start, start + answer.length - 1]] },
            ],
          },
        ],
      })
    );
    answerByQid.set(qid, answer);
  });

  const datasetPath = path.join(dir, "dataset.jsonl");
  fs.writeFileSync(datasetPath, lines.join("\n") + "\n");
  return {
    datasetPath,
    catalogPath,
    answers: answerByQid,
    nTypeable: answers.length - untypeable.length,
    nUntypeable: untypeable.length,
  };
}
