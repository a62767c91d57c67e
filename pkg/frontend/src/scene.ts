/**
 * Minimal retained scene for the canvas views. Display lists are plain
 * data so tests can assert on what would be drawn without a real 2D
 * context; rendering is a thin pass over the lists.
 */

import type { AmberEdge } from "./overlay";

export type EdgeKind = "base" | "amber";

export interface SceneNode {
  id: string;
  x: number;
  y: number;
  radius: number;
  color: string;
  label?: string;
}

export interface SceneEdge {
  kind: EdgeKind;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  width: number;
  color: string;
  /** Overlay payload so a click can open the pair panel. */
  ref?: AmberEdge;
}

export interface ScenePoint {
  x: number;
  y: number;
  radius: number;
  color: string;
  id?: string;
}

export class SceneGraph {
  nodes: SceneNode[] = [];
  edges: SceneEdge[] = [];
  points: ScenePoint[] = [];
  polyline: [number, number][] = [];
  polylineColor = "#4ad";

  clear(): void {
    this.nodes = [];
    this.edges = [];
    this.points = [];
    this.polyline = [];
  }

  edgesOfKind(kind: EdgeKind): SceneEdge[] {
    return this.edges.filter((edge) => edge.kind === kind);
  }

  bounds(): { minX: number; minY: number; maxX: number; maxY: number } | null {
    let minX = Infinity;
    let minY = Infinity;
    let maxX = -Infinity;
    let maxY = -Infinity;
    const see = (x: number, y: number) => {
      minX = Math.min(minX, x);
      minY = Math.min(minY, y);
      maxX = Math.max(maxX, x);
      maxY = Math.max(maxY, y);
    };
    for (const node of this.nodes) see(node.x, node.y);
    for (const point of this.points) see(point.x, point.y);
    for (const edge of this.edges) {
      see(edge.x1, edge.y1);
      see(edge.x2, edge.y2);
    }
    for (const [x, y] of this.polyline) see(x, y);
    return minX === Infinity ? null : { minX, minY, maxX, maxY };
  }
}

/** World-to-screen mapping that fits scene bounds into a canvas with padding. */
export class Viewport {
  readonly scale: number;
  readonly offsetX: number;
  readonly offsetY: number;

  constructor(scene: SceneGraph, width: number, height: number, padding = 24) {
    const box = scene.bounds();
    if (!box) {
      this.scale = 1;
      this.offsetX = width / 2;
      this.offsetY = height / 2;
      return;
    }
    const spanX = Math.max(box.maxX - box.minX, 1e-9);
    const spanY = Math.max(box.maxY - box.minY, 1e-9);
    this.scale = Math.min(
      (width - 2 * padding) / spanX,
      (height - 2 * padding) / spanY,
    );
    this.offsetX = width / 2 - this.scale * (box.minX + box.maxX) / 2;
    this.offsetY = height / 2 - this.scale * (box.minY + box.maxY) / 2;
  }

  toScreen(x: number, y: number): [number, number] {
    return [this.offsetX + this.scale * x, this.offsetY + this.scale * y];
  }

  toWorld(sx: number, sy: number): [number, number] {
    return [(sx - this.offsetX) / this.scale, (sy - this.offsetY) / this.scale];
  }
}

function pointSegmentDistance(
  px: number,
  py: number,
  x1: number,
  y1: number,
  x2: number,
  y2: number,
): number {
  const dx = x2 - x1;
  const dy = y2 - y1;
  const lengthSq = dx * dx + dy * dy;
  let t = lengthSq > 0 ? ((px - x1) * dx + (py - y1) * dy) / lengthSq : 0;
  t = Math.min(Math.max(t, 0), 1);
  return Math.hypot(px - (x1 + t * dx), py - (y1 + t * dy));
}

/** Nearest edge of a kind within tolerance of a world point, else null. */
export function hitTestEdge(
  scene: SceneGraph,
  kind: EdgeKind,
  x: number,
  y: number,
  tolerance: number,
): SceneEdge | null {
  let best: SceneEdge | null = null;
  let bestDistance = tolerance;
  for (const edge of scene.edges) {
    if (edge.kind !== kind) {
      continue;
    }
    const d = pointSegmentDistance(x, y, edge.x1, edge.y1, edge.x2, edge.y2);
    if (d <= bestDistance) {
      bestDistance = d;
      best = edge;
    }
  }
  return best;
}

export function hitTestNode(
  scene: SceneGraph,
  x: number,
  y: number,
  tolerance: number,
): SceneNode | null {
  let best: SceneNode | null = null;
  let bestDistance = tolerance;
  for (const node of scene.nodes) {
    const d = Math.hypot(x - node.x, y - node.y);
    if (d <= bestDistance) {
      bestDistance = d;
      best = node;
    }
  }
  return best;
}

/**
 * Draw the scene. A null context (canvas unavailable, as under test DOM
 * stubs) is a no-op; the display lists above stay the source of truth.
 */
export function renderScene(
  ctx: CanvasRenderingContext2D | null,
  scene: SceneGraph,
  width: number,
  height: number,
): void {
  if (!ctx) {
    return;
  }
  const view = new Viewport(scene, width, height);
  ctx.clearRect(0, 0, width, height);
  for (const edge of scene.edges) {
    const [x1, y1] = view.toScreen(edge.x1, edge.y1);
    const [x2, y2] = view.toScreen(edge.x2, edge.y2);
    ctx.strokeStyle = edge.color;
    ctx.lineWidth = edge.width;
    ctx.beginPath();
    ctx.moveTo(x1, y1);
    ctx.lineTo(x2, y2);
    ctx.stroke();
  }
  if (scene.polyline.length > 0) {
    ctx.strokeStyle = scene.polylineColor;
    ctx.lineWidth = 2;
    ctx.beginPath();
    const [x0, y0] = view.toScreen(scene.polyline[0][0], scene.polyline[0][1]);
    ctx.moveTo(x0, y0);
    for (const [wx, wy] of scene.polyline.slice(1)) {
      const [x, y] = view.toScreen(wx, wy);
      ctx.lineTo(x, y);
    }
    ctx.stroke();
  }
  for (const point of scene.points) {
    const [x, y] = view.toScreen(point.x, point.y);
    ctx.fillStyle = point.color;
    ctx.beginPath();
    ctx.arc(x, y, point.radius, 0, 2 * Math.PI);
    ctx.fill();
  }
  for (const node of scene.nodes) {
    const [x, y] = view.toScreen(node.x, node.y);
    ctx.fillStyle = node.color;
    ctx.beginPath();
    ctx.arc(x, y, node.radius, 0, 2 * Math.PI);
    ctx.fill();
  }
}
