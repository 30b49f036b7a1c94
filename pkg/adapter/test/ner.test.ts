import { describe, expect, it } from "vitest";

import { Catalog } from "../src/catalog";
import { containsSurface } from "../src/matching";
import { SUPPORTED_MODEL, createTagger } from "../src/ner";
import { ModelLoadError } from "../src/types";

const catalog = new Catalog([
  { id: "Q183", name: "Germany", type: "LOC", popularity: 1500000, aliases: ["Deutschland"] },
  { id: "Q76", name: "Barack Obama", type: "PER", popularity: 900000, aliases: ["Obama"] },
]);

const tag = createTagger(SUPPORTED_MODEL, catalog);

describe("matching", () => {
  it("is case-insensitive and word-boundary delimited", () => {
    expect(containsSurface("about germany today", "Germany")).toBe(true);
    expect(containsSurface("about Germanyland today", "Germany")).toBe(false);
    expect(containsSurface("(Germany)", "Germany")).toBe(true);
    expect(containsSurface("nothing here", "Germany")).toBe(false);
  });
});

describe("tagger", () => {
  it("labels dates", () => {
    expect(tag("April 6, 1917", "It began on April 6, 1917 here.")).toEqual({ label: "DATE" });
    expect(tag("1917", "The year 1917 mattered.")).toEqual({ label: "DATE" });
  });

  it("labels numbers by subkind", () => {
    expect(tag("3.2 million", "There are 3.2 million farmers.")?.label).toBe("QUANTITY");
    expect(tag("757,900", "Exactly 757,900 workers.")?.label).toBe("CARDINAL");
    expect(tag("25%", "Turnout was 25% overall.")?.label).toBe("PERCENT");
  });

  it("links via catalog name and alias", () => {
    const byName = tag("Germany", "War was declared on Germany.");
    expect(byName).toMatchObject({ label: "GPE", entityId: "Q183", linkMethod: "name" });
    const byAlias = tag("Deutschland", "A pact with Deutschland held.");
    expect(byAlias).toMatchObject({ label: "GPE", entityId: "Q183", linkMethod: "alias" });
    expect(byName?.popularity).toBe(1500000);
  });

  it("returns null for unlabelable answers", () => {
    expect(tag("running quickly", "He was running quickly.")).toBeNull();
  });

  it("returns null when the answer is absent from the context", () => {
    expect(tag("Germany", "No relevant country named.")).toBeNull();
  });

  it("rejects unknown model identifiers", () => {
    expect(() => createTagger("transformer-xxl", catalog)).toThrow(ModelLoadError);
  });
});
