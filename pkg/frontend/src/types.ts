/** Row and manifest shapes for the exported atlas bundle. */

export interface CollectionEntry {
  chunks: string[];
  rows: number;
}

export interface Manifest {
  schema: string;
  seed: number;
  config_digest: string;
  chunk_bytes: number;
  coordinate_source: "layout" | "fallback";
  counts: Record<string, number>;
  collections: Record<string, CollectionEntry>;
}

export interface NodeRow {
  id: string;
  label: string;
  x: number;
  y: number;
  papers: number;
  citations: number;
  first_year: number;
  last_year: number;
  communities: Record<string, number>;
}

export interface PaperRow {
  id: string;
  title: string;
  venue: string;
  year: number;
  citations: number;
  authors: string[];
  x: number;
  y: number;
}

export interface EdgeRow {
  source: string;
  target: string;
  w: number;
}

export interface PhantomPairRow {
  anchor: string;
  partner: string;
  cosine: number;
  distance_tag: string;
  realized: boolean;
}

export interface TrajectoryBinRow {
  index: number;
  year_start: number;
  centroid: number[];
  paper_count: number;
  citation_weight: number;
}

export interface TrajectoryRow {
  author_key: string;
  bins: TrajectoryBinRow[];
  bin_count: number;
  total_path: number;
  net: number;
  efficiency: number;
  class: string;
  papers: number;
  citations: number;
  span_years: number;
}

export interface LabelRow {
  layer: string;
  community_id: number;
  top_terms: [string, number][];
  exemplar_authors: string[];
}

export interface GrowthBlock {
  years: number[];
  venues: string[];
  counts: Record<string, number[]>;
  totals: number[];
}

export interface DescriptiveRow {
  papers: number;
  authors: number;
  venues: string[];
  growth: GrowthBlock;
  lotka: { alpha: number; intercept: number; r_squared: number };
  median_career_span: number;
  [key: string]: unknown;
}
