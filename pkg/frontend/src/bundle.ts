/**
 * Bundle loader: fetches a manifest plus chunked JSON collections from a
 * static directory and exposes them as frozen in-memory arrays.
 *
 * Collections load lazily on first access. Chunk fetches for one
 * collection are issued concurrently but the rows are concatenated in
 * manifest order, so out-of-order responses cannot scramble a collection.
 */

import type {
  DescriptiveRow,
  EdgeRow,
  LabelRow,
  Manifest,
  NodeRow,
  PaperRow,
  PhantomPairRow,
  TrajectoryRow,
} from "./types";

export const BUNDLE_SCHEMA = "atlas-bundle-v1";

export type FetchJson = (url: string) => Promise<unknown>;

export class BundleError extends Error {}

/** A chunk or manifest request failed outright (network or HTTP error). */
export class FetchFailure extends BundleError {
  readonly url: string;

  constructor(url: string, detail: string) {
    super(`failed to fetch ${url}: ${detail}`);
    this.name = "FetchFailure";
    this.url = url;
  }
}

/** The manifest advertises a schema this build does not understand. */
export class SchemaMismatch extends BundleError {
  readonly found: string;
  readonly expected: string;

  constructor(found: string) {
    super(`bundle schema ${JSON.stringify(found)} != ${BUNDLE_SCHEMA}`);
    this.name = "SchemaMismatch";
    this.found = found;
    this.expected = BUNDLE_SCHEMA;
  }
}

async function fetchJsonDefault(url: string): Promise<unknown> {
  let response: Response;
  try {
    response = await fetch(url);
  } catch (err) {
    throw new FetchFailure(url, String(err));
  }
  if (!response.ok) {
    throw new FetchFailure(url, `HTTP ${response.status}`);
  }
  return response.json();
}

function joinUrl(base: string, name: string): string {
  return base.endsWith("/") ? base + name : `${base}/${name}`;
}

/* Rows are shared by every view; freezing makes accidental mutation throw
   in strict mode instead of silently corrupting later renders. */
function deepFreeze<T>(value: T): T {
  if (value !== null && typeof value === "object" && !Object.isFrozen(value)) {
    Object.freeze(value);
    for (const key of Object.keys(value as object)) {
      deepFreeze((value as Record<string, unknown>)[key]);
    }
  }
  return value;
}

export class Atlas {
  readonly manifest: Manifest;
  readonly baseUrl: string;
  private readonly fetchJson: FetchJson;
  private readonly cache = new Map<string, Promise<readonly unknown[]>>();

  constructor(manifest: Manifest, baseUrl: string, fetchJson: FetchJson) {
    this.manifest = deepFreeze(manifest);
    this.baseUrl = baseUrl;
    this.fetchJson = fetchJson;
  }

  has(name: string): boolean {
    return name in this.manifest.collections;
  }

  /**
   * Rows of one collection, loaded on first call and cached.
   *
   * Missing collections resolve to an empty array so sparse bundles
   * (for example one exported before any holdout evaluation ran) still
   * render every view with empty states.
   */
  collection(name: string): Promise<readonly unknown[]> {
    let pending = this.cache.get(name);
    if (!pending) {
      pending = this.loadCollection(name);
      this.cache.set(name, pending);
    }
    return pending;
  }

  private async loadCollection(name: string): Promise<readonly unknown[]> {
    const entry = this.manifest.collections[name];
    if (!entry) {
      return deepFreeze([]);
    }
    const parts = await Promise.all(
      entry.chunks.map((chunk) => this.fetchJson(joinUrl(this.baseUrl, chunk))),
    );
    const rows: unknown[] = [];
    for (const part of parts) {
      if (!Array.isArray(part)) {
        throw new BundleError(`chunk of ${name} is not a JSON array`);
      }
      rows.push(...part);
    }
    if (rows.length !== entry.rows) {
      throw new BundleError(
        `collection ${name}: got ${rows.length} rows, manifest says ${entry.rows}`,
      );
    }
    return deepFreeze(rows);
  }

  nodes(): Promise<readonly NodeRow[]> {
    return this.collection("nodes") as Promise<readonly NodeRow[]>;
  }

  papers(): Promise<readonly PaperRow[]> {
    return this.collection("papers") as Promise<readonly PaperRow[]>;
  }

  coauthorEdges(): Promise<readonly EdgeRow[]> {
    return this.collection("edges_coauthor") as Promise<readonly EdgeRow[]>;
  }

  multiplexEdges(): Promise<readonly EdgeRow[]> {
    return this.collection("edges_multiplex") as Promise<readonly EdgeRow[]>;
  }

  phantomPairs(): Promise<readonly PhantomPairRow[]> {
    return this.collection("phantom_pairs") as Promise<readonly PhantomPairRow[]>;
  }

  trajectories(): Promise<readonly TrajectoryRow[]> {
    return this.collection("trajectories") as Promise<readonly TrajectoryRow[]>;
  }

  labels(): Promise<readonly LabelRow[]> {
    return this.collection("labels") as Promise<readonly LabelRow[]>;
  }

  async descriptive(): Promise<DescriptiveRow | null> {
    const rows = await this.collection("descriptive");
    return rows.length ? (rows[0] as DescriptiveRow) : null;
  }
}

/** Fetch and validate the manifest; collection chunks load later on demand. */
export async function loadBundle(
  baseUrl: string,
  fetchJson: FetchJson = fetchJsonDefault,
): Promise<Atlas> {
  const raw = await fetchJson(joinUrl(baseUrl, "manifest.json"));
  if (raw === null || typeof raw !== "object" || Array.isArray(raw)) {
    throw new BundleError("manifest.json is not a JSON object");
  }
  const manifest = raw as Manifest;
  if (manifest.schema !== BUNDLE_SCHEMA) {
    throw new SchemaMismatch(String(manifest.schema));
  }
  if (!manifest.collections || typeof manifest.collections !== "object") {
    throw new BundleError("manifest has no collections table");
  }
  return new Atlas(manifest, baseUrl, fetchJson);
}
