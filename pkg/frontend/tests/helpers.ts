/** Shared test fixtures: file-backed and in-memory bundle fetchers. */

import { readFileSync } from "node:fs";
import path from "node:path";
import type { FetchJson } from "../src/bundle";
import { Atlas, loadBundle } from "../src/bundle";
import type { Manifest } from "../src/types";

// vitest runs with the package root as cwd in every environment
export const FIXTURE_ROOT = path.resolve(process.cwd(), "tests/fixture/bundle");

/** Serve bundle files straight from disk; "baseUrl" is a directory path. */
export const fsFetch: FetchJson = async (url) =>
  JSON.parse(readFileSync(url, "utf8"));

export function loadFixtureAtlas(): Promise<Atlas> {
  return loadBundle(FIXTURE_ROOT, fsFetch);
}

/** Raw fixture rows read outside the loader, for independent comparison. */
export function fixtureRows<T>(name: string): T[] {
  const manifest = JSON.parse(
    readFileSync(path.join(FIXTURE_ROOT, "manifest.json"), "utf8"),
  ) as Manifest;
  const rows: T[] = [];
  for (const chunk of manifest.collections[name].chunks) {
    rows.push(...(JSON.parse(readFileSync(path.join(FIXTURE_ROOT, chunk), "utf8")) as T[]));
  }
  return rows;
}

export function fixtureManifest(): Manifest {
  return JSON.parse(
    readFileSync(path.join(FIXTURE_ROOT, "manifest.json"), "utf8"),
  ) as Manifest;
}

export interface MapFetch extends FetchJson {
  calls: string[];
}

/** In-memory bundle; records every URL requested. */
export function mapFetch(files: Record<string, unknown>): MapFetch {
  const fetcher = (async (url: string) => {
    fetcher.calls.push(url);
    const name = url.split("/").pop() ?? url;
    if (!(name in files)) {
      throw new Error(`no such file: ${name}`);
    }
    return JSON.parse(JSON.stringify(files[name]));
  }) as MapFetch;
  fetcher.calls = [];
  return fetcher;
}

/** Minimal valid manifest over in-memory collections. */
export function makeManifest(
  collections: Record<string, unknown[][]>,
  schema = "atlas-bundle-v1",
): { manifest: Manifest; files: Record<string, unknown> } {
  const files: Record<string, unknown> = {};
  const table: Manifest["collections"] = {};
  const counts: Record<string, number> = {};
  for (const [name, chunks] of Object.entries(collections)) {
    const chunkNames: string[] = [];
    let rows = 0;
    chunks.forEach((chunk, i) => {
      const file = `${name}-${String(i).padStart(3, "0")}.json`;
      files[file] = chunk;
      chunkNames.push(file);
      rows += chunk.length;
    });
    table[name] = { chunks: chunkNames, rows };
    counts[name] = rows;
  }
  const manifest: Manifest = {
    schema,
    seed: 7,
    config_digest: "0".repeat(64),
    chunk_bytes: 1024,
    coordinate_source: "fallback",
    counts,
    collections: table,
  };
  files["manifest.json"] = manifest;
  return { manifest, files };
}

export function nodeRow(id: string, extra: Record<string, unknown> = {}): Record<string, unknown> {
  return {
    id,
    label: `Author ${id}`,
    x: 0,
    y: 0,
    papers: 1,
    citations: 0,
    first_year: 2000,
    last_year: 2001,
    communities: { coauthor: 0, semantic: 0, multiplex: 0 },
    ...extra,
  };
}

/** Empty-but-valid bundle: every collection present with zero rows. */
export function emptyBundleFiles(): Record<string, unknown> {
  const names = [
    "nodes",
    "papers",
    "edges_coauthor",
    "edges_multiplex",
    "phantom_pairs",
    "trajectories",
    "labels",
    "descriptive",
  ];
  return makeManifest(Object.fromEntries(names.map((n) => [n, [[]]]))).files;
}
