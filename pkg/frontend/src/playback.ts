/**
 * Trajectory playback: a pure function from (trajectory, bin index) to the
 * polyline prefix and stats the trajectory view displays. Scrubbing back
 * and forth re-derives identical frames because nothing is accumulated.
 */

import type { TrajectoryRow } from "./types";

export interface PlaybackFrame {
  /** False when the author has no trajectory; the scrubber is disabled. */
  available: boolean;
  /** Clamped bin index actually shown. */
  binIndex: number;
  binCount: number;
  /** Centroid polyline from the first bin through the selected bin. */
  points: [number, number][];
  /** Year the selected bin starts, or null when unavailable. */
  yearStart: number | null;
  atEnd: boolean;
  classLabel: string;
  efficiency: number;
  net: number;
  totalPath: number;
  spanYears: number;
  papers: number;
  citations: number;
}

const EMPTY_FRAME: PlaybackFrame = {
  available: false,
  binIndex: 0,
  binCount: 0,
  points: [],
  yearStart: null,
  atEnd: false,
  classLabel: "",
  efficiency: 0,
  net: 0,
  totalPath: 0,
  spanYears: 0,
  papers: 0,
  citations: 0,
};

export function clampBin(trajectory: TrajectoryRow | undefined, bin: number): number {
  if (!trajectory || trajectory.bins.length === 0) {
    return 0;
  }
  const last = trajectory.bins.length - 1;
  if (!Number.isFinite(bin)) {
    return last;
  }
  return Math.min(Math.max(Math.trunc(bin), 0), last);
}

export function playbackFrame(
  trajectory: TrajectoryRow | undefined,
  bin: number,
): PlaybackFrame {
  if (!trajectory || trajectory.bins.length === 0) {
    return EMPTY_FRAME;
  }
  const index = clampBin(trajectory, bin);
  const points = trajectory.bins
    .slice(0, index + 1)
    .map((b): [number, number] => [b.centroid[0], b.centroid[1]]);
  return {
    available: true,
    binIndex: index,
    binCount: trajectory.bins.length,
    points,
    yearStart: trajectory.bins[index].year_start,
    atEnd: index === trajectory.bins.length - 1,
    classLabel: trajectory.class,
    efficiency: trajectory.efficiency,
    net: trajectory.net,
    totalPath: trajectory.total_path,
    spanYears: trajectory.span_years,
    papers: trajectory.papers,
    citations: trajectory.citations,
  };
}

export function trajectoryIndex(
  trajectories: readonly TrajectoryRow[],
): Map<string, TrajectoryRow> {
  const index = new Map<string, TrajectoryRow>();
  for (const row of trajectories) {
    index.set(row.author_key, row);
  }
  return index;
}
