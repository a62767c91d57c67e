/**
 * Paper search: case-insensitive substring match over titles and author
 * display names, intersected with the active venue and year filters.
 */

import type { NodeRow, PaperRow } from "./types";

export interface Filters {
  /** Venues to keep; empty array means no venue restriction. */
  venues: string[];
  /** Inclusive [min, max] publication years, or null for all years. */
  years: [number, number] | null;
}

export const NO_FILTERS: Filters = { venues: [], years: null };

export type SortKey = "citations" | "year";

export interface SearchOptions {
  sort?: SortKey;
  ascending?: boolean;
}

/** Case-folded author names per paper, built once per bundle. */
export function authorNameIndex(
  papers: readonly PaperRow[],
  nodes: readonly NodeRow[],
): Map<string, string[]> {
  const labelOf = new Map<string, string>();
  for (const node of nodes) {
    labelOf.set(node.id, node.label);
  }
  const index = new Map<string, string[]>();
  for (const paper of papers) {
    const names: string[] = [];
    for (const authorId of paper.authors) {
      const label = labelOf.get(authorId);
      if (label) {
        names.push(label.toLowerCase());
      }
    }
    index.set(paper.id, names);
  }
  return index;
}

export function paperMatchesFilters(paper: PaperRow, filters: Filters): boolean {
  if (filters.venues.length > 0 && !filters.venues.includes(paper.venue)) {
    return false;
  }
  if (filters.years) {
    const [lo, hi] = filters.years;
    if (paper.year < lo || paper.year > hi) {
      return false;
    }
  }
  return true;
}

function textMatches(
  paper: PaperRow,
  needle: string,
  names: Map<string, string[]>,
): boolean {
  if (!needle) {
    return true;
  }
  if (paper.title.toLowerCase().includes(needle)) {
    return true;
  }
  const authorNames = names.get(paper.id);
  return authorNames !== undefined && authorNames.some((n) => n.includes(needle));
}

function compare(a: PaperRow, b: PaperRow, sort: SortKey, ascending: boolean): number {
  const flip = ascending ? 1 : -1;
  const primary = sort === "year" ? a.year - b.year : a.citations - b.citations;
  if (primary !== 0) {
    return flip * primary;
  }
  const secondary = sort === "year" ? b.citations - a.citations : b.year - a.year;
  if (secondary !== 0) {
    return secondary;
  }
  return a.id < b.id ? -1 : a.id > b.id ? 1 : 0;
}

/**
 * Ranked paper rows for a query under the active filters.
 *
 * An empty query keeps every paper the filters admit. The default order
 * is citations, most cited first; ties break by year then id so the
 * ranking is stable across runs.
 */
export function searchPapers(
  papers: readonly PaperRow[],
  names: Map<string, string[]>,
  query: string,
  filters: Filters = NO_FILTERS,
  options: SearchOptions = {},
): PaperRow[] {
  const needle = query.trim().toLowerCase();
  const sort = options.sort ?? "citations";
  const ascending = options.ascending ?? false;
  const hits = papers.filter(
    (paper) => paperMatchesFilters(paper, filters) && textMatches(paper, needle, names),
  );
  hits.sort((a, b) => compare(a, b, sort, ascending));
  return hits;
}
