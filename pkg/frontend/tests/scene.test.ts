import { describe, expect, it } from "vitest";
import { SceneGraph, Viewport, hitTestEdge, hitTestNode, renderScene } from "../src/scene";

function demoScene(): SceneGraph {
  const scene = new SceneGraph();
  scene.nodes.push({ id: "a", x: 0, y: 0, radius: 4, color: "#111" });
  scene.nodes.push({ id: "b", x: 10, y: 0, radius: 4, color: "#222" });
  scene.edges.push({ kind: "base", x1: 0, y1: 0, x2: 10, y2: 0, width: 1, color: "#bbb" });
  scene.edges.push({ kind: "amber", x1: 0, y1: 5, x2: 10, y2: 5, width: 2, color: "#fb0" });
  return scene;
}

describe("hit testing", () => {
  it("finds the nearest edge of the requested kind only", () => {
    const scene = demoScene();
    expect(hitTestEdge(scene, "amber", 5, 5.4, 1)?.kind).toBe("amber");
    expect(hitTestEdge(scene, "amber", 5, 0.1, 1)).toBeNull(); // near a base edge
    expect(hitTestEdge(scene, "base", 5, 0.1, 1)?.kind).toBe("base");
  });

  it("respects the tolerance radius", () => {
    const scene = demoScene();
    expect(hitTestEdge(scene, "amber", 5, 9, 1)).toBeNull();
    expect(hitTestEdge(scene, "amber", 5, 9, 5)?.kind).toBe("amber");
  });

  it("measures distance to the segment, not its infinite line", () => {
    const scene = demoScene();
    expect(hitTestEdge(scene, "base", 50, 0, 2)).toBeNull();
  });

  it("picks the closest node within range", () => {
    const scene = demoScene();
    expect(hitTestNode(scene, 1, 1, 3)?.id).toBe("a");
    expect(hitTestNode(scene, 9, -1, 3)?.id).toBe("b");
    expect(hitTestNode(scene, 5, 20, 3)).toBeNull();
  });
});

describe("viewport", () => {
  it("maps world bounds into the canvas with symmetric inverse", () => {
    const scene = demoScene();
    const view = new Viewport(scene, 800, 600);
    const [sx, sy] = view.toScreen(5, 2.5);
    const [wx, wy] = view.toWorld(sx, sy);
    expect(wx).toBeCloseTo(5, 9);
    expect(wy).toBeCloseTo(2.5, 9);
  });

  it("keeps every scene point inside the canvas", () => {
    const scene = demoScene();
    const view = new Viewport(scene, 400, 300);
    for (const node of scene.nodes) {
      const [sx, sy] = view.toScreen(node.x, node.y);
      expect(sx).toBeGreaterThanOrEqual(0);
      expect(sx).toBeLessThanOrEqual(400);
      expect(sy).toBeGreaterThanOrEqual(0);
      expect(sy).toBeLessThanOrEqual(300);
    }
  });

  it("degenerates gracefully on an empty scene", () => {
    const view = new Viewport(new SceneGraph(), 100, 100);
    expect(view.toScreen(0, 0)).toEqual([50, 50]);
  });
});

describe("display lists", () => {
  it("separates edge kinds", () => {
    const scene = demoScene();
    expect(scene.edgesOfKind("amber").length).toBe(1);
    expect(scene.edgesOfKind("base").length).toBe(1);
    scene.clear();
    expect(scene.edges.length).toBe(0);
    expect(scene.nodes.length).toBe(0);
  });

  it("renders as a no-op without a drawing context", () => {
    expect(() => renderScene(null, demoScene(), 100, 100)).not.toThrow();
  });
});
