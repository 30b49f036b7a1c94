/** Entity catalog loading and case-insensitive name/alias lookup. */

import * as fs from "fs";

import { AdapterError, CatalogEntity, isEntityType } from "./types";

export type LinkMethod = "name" | "alias";

export interface CatalogHit {
  entity: CatalogEntity;
  method: LinkMethod;
}

export class Catalog {
  private byId = new Map<string, CatalogEntity>();
  private byName = new Map<string, string>();
  private byAlias = new Map<string, string>();

  constructor(entities: CatalogEntity[]) {
    for (const entity of entities) {
      if (this.byId.has(entity.id)) {
        throw new AdapterError(`duplicate entity id '${entity.id}'`);
      }
      this.byId.set(entity.id, entity);
      const nameKey = entity.name.toLowerCase();
      if (!this.byName.has(nameKey)) this.byName.set(nameKey, entity.id);
      for (const alias of entity.aliases) {
        const aliasKey = alias.toLowerCase();
        if (!this.byAlias.has(aliasKey)) this.byAlias.set(aliasKey, entity.id);
      }
    }
  }

  /** Exact name match first, then exact alias match, else null. */
  lookup(surface: string): CatalogHit | null {
    const key = surface.toLowerCase();
    const nameId = this.byName.get(key);
    if (nameId !== undefined) {
      return { entity: this.byId.get(nameId)!, method: "name" };
    }
    const aliasId = this.byAlias.get(key);
    if (aliasId !== undefined) {
      return { entity: this.byId.get(aliasId)!, method: "alias" };
    }
    return null;
  }

  get size(): number {
    return this.byId.size;
  }
}

export function loadCatalog(path: string): Catalog {
  const entities: CatalogEntity[] = [];
  const lines = fs.readFileSync(path, "utf-8").split("\n");
  for (let i = 0; i < lines.length; i++) {
    if (lines[i].trim() === "") continue;
    let obj: Record<string, unknown>;
    try {
      obj = JSON.parse(lines[i]);
    } catch (err) {
      throw new AdapterError(`${path}: line ${i + 1}: malformed JSON (${(err as Error).message})`);
    }
    const { id, name, type, popularity } = obj;
    if (typeof id !== "string" || typeof name !== "string" || typeof type !== "string") {
      throw new AdapterError(`${path}: line ${i + 1}: missing id/name/type`);
    }
    if (!isEntityType(type)) {
      throw new AdapterError(`${path}: line ${i + 1}: unknown entity_type '${type}'`);
    }
    if (typeof popularity !== "number" || popularity < 0 || !Number.isInteger(popularity)) {
      throw new AdapterError(`${path}: line ${i + 1}: popularity must be a non-negative integer`);
    }
    const aliases = Array.isArray(obj.aliases) ? obj.aliases.map(String) : [];
    entities.push({ id, name, type, popularity, aliases });
  }
  return new Catalog(entities);
}
