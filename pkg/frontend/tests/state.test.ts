import { describe, expect, it } from "vitest";
import {
  decodeHash,
  defaultState,
  encodeHash,
  validateSelection,
  VIEW_NAMES,
} from "../src/state";
import type { ViewState } from "../src/state";

describe("hash round-trip", () => {
  const cases: ViewState[] = [
    defaultState(),
    {
      view: "combined",
      query: "deep retrieval",
      venues: ["a-venue", "b-venue"],
      years: [2001, 2015],
      selection: { kind: "node", id: "upstream:A0031" },
      overlay: true,
      bin: 4,
    },
    {
      view: "trajectories",
      query: "",
      venues: [],
      years: null,
      selection: { kind: "paper", id: "p0123" },
      overlay: false,
      bin: 0,
    },
    {
      view: "years",
      query: "x & y = z?",
      venues: ["only-one"],
      years: [1999, 1999],
      selection: null,
      overlay: false,
      bin: 0,
    },
  ];

  it("decode(encode(state)) is the identity", () => {
    for (const state of cases) {
      expect(decodeHash(encodeHash(state))).toEqual(state);
    }
  });

  it("the default state encodes to an empty hash", () => {
    expect(encodeHash(defaultState())).toBe("");
    expect(decodeHash("")).toEqual(defaultState());
    expect(decodeHash("#")).toEqual(defaultState());
  });

  it("every view name survives the round trip", () => {
    for (const view of VIEW_NAMES) {
      const state = { ...defaultState(), view };
      expect(decodeHash(encodeHash(state)).view).toBe(view);
    }
  });

  it("percent-encodes selections containing separators", () => {
    const state = {
      ...defaultState(),
      selection: { kind: "node" as const, id: "weird:id&with=chars" },
    };
    expect(decodeHash(encodeHash(state)).selection).toEqual(state.selection);
  });
});

describe("malformed hashes", () => {
  it("falls back to defaults for unknown views", () => {
    expect(decodeHash("#view=nonsense").view).toBe("explorer");
  });

  it("drops inverted or unparseable year ranges", () => {
    expect(decodeHash("#years=2020-2005").years).toBeNull();
    expect(decodeHash("#years=abc").years).toBeNull();
    expect(decodeHash("#years=2001-2002").years).toEqual([2001, 2002]);
  });

  it("ignores negative or fractional bins", () => {
    expect(decodeHash("#bin=-2").bin).toBe(0);
    expect(decodeHash("#bin=1.5").bin).toBe(0);
    expect(decodeHash("#bin=3").bin).toBe(3);
  });

  it("requires a kind prefix on selections", () => {
    expect(decodeHash("#sel=justanid").selection).toBeNull();
    expect(decodeHash("#sel=edge:x").selection).toBeNull();
    expect(decodeHash("#sel=node:x").selection).toEqual({ kind: "node", id: "x" });
  });

  it("normalizes venue lists", () => {
    expect(decodeHash("#venues=b,a,").venues).toEqual(["a", "b"]);
  });
});

describe("selection validation", () => {
  const nodeIds = new Set(["n1", "n2"]);
  const paperIds = new Set(["p1"]);

  it("keeps selections whose id exists", () => {
    const state = { ...defaultState(), selection: { kind: "node" as const, id: "n1" } };
    expect(validateSelection(state, nodeIds, paperIds).selection).toEqual({
      kind: "node",
      id: "n1",
    });
  });

  it("drops selections pointing at absent ids", () => {
    const ghost = { ...defaultState(), selection: { kind: "paper" as const, id: "nope" } };
    expect(validateSelection(ghost, nodeIds, paperIds).selection).toBeNull();
  });

  it("checks the id against the pool matching its kind", () => {
    const crossed = { ...defaultState(), selection: { kind: "paper" as const, id: "n1" } };
    expect(validateSelection(crossed, nodeIds, paperIds).selection).toBeNull();
  });

  it("leaves unselected states untouched", () => {
    const state = defaultState();
    expect(validateSelection(state, nodeIds, paperIds)).toBe(state);
  });
});
