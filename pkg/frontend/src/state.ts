/**
 * View state and its URL-hash encoding. The hash is the single source of
 * truth for what the page shows, so any state can be bookmarked or shared
 * and a reload lands on the same view.
 */

export const VIEW_NAMES = [
  "explorer",
  "years",
  "network",
  "topic",
  "trajectories",
  "combined",
] as const;

export type ViewName = (typeof VIEW_NAMES)[number];

export interface Selection {
  kind: "node" | "paper";
  id: string;
}

export interface ViewState {
  view: ViewName;
  query: string;
  venues: string[];
  years: [number, number] | null;
  selection: Selection | null;
  overlay: boolean;
  bin: number;
}

export function defaultState(): ViewState {
  return {
    view: "explorer",
    query: "",
    venues: [],
    years: null,
    selection: null,
    overlay: false,
    bin: 0,
  };
}

function isViewName(value: string): value is ViewName {
  return (VIEW_NAMES as readonly string[]).includes(value);
}

export function encodeHash(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.view !== "explorer") {
    params.set("view", state.view);
  }
  if (state.query) {
    params.set("q", state.query);
  }
  if (state.venues.length > 0) {
    params.set("venues", [...state.venues].sort().join(","));
  }
  if (state.years) {
    params.set("years", `${state.years[0]}-${state.years[1]}`);
  }
  if (state.selection) {
    params.set("sel", `${state.selection.kind}:${state.selection.id}`);
  }
  if (state.overlay) {
    params.set("overlay", "1");
  }
  if (state.bin > 0) {
    params.set("bin", String(state.bin));
  }
  const encoded = params.toString();
  return encoded ? `#${encoded}` : "";
}

/** Parse a location hash; malformed pieces fall back to defaults. */
export function decodeHash(hash: string): ViewState {
  const state = defaultState();
  const raw = hash.startsWith("#") ? hash.slice(1) : hash;
  if (!raw) {
    return state;
  }
  const params = new URLSearchParams(raw);
  const view = params.get("view");
  if (view && isViewName(view)) {
    state.view = view;
  }
  state.query = params.get("q") ?? "";
  const venues = params.get("venues");
  if (venues) {
    state.venues = venues.split(",").filter((v) => v.length > 0).sort();
  }
  const years = params.get("years");
  if (years) {
    const match = /^(-?\d+)-(-?\d+)$/.exec(years);
    if (match) {
      const lo = Number(match[1]);
      const hi = Number(match[2]);
      if (lo <= hi) {
        state.years = [lo, hi];
      }
    }
  }
  const sel = params.get("sel");
  if (sel) {
    const colon = sel.indexOf(":");
    const kind = sel.slice(0, colon);
    const id = sel.slice(colon + 1);
    if ((kind === "node" || kind === "paper") && id) {
      state.selection = { kind, id };
    }
  }
  state.overlay = params.get("overlay") === "1";
  const bin = Number(params.get("bin") ?? "0");
  state.bin = Number.isInteger(bin) && bin > 0 ? bin : 0;
  return state;
}

/**
 * Drop a selection whose id no longer exists in the loaded bundle.
 * Stale hashes (old bookmarks, hand-edited URLs) must not leave the UI
 * pointing at a ghost row.
 */
export function validateSelection(
  state: ViewState,
  nodeIds: ReadonlySet<string>,
  paperIds: ReadonlySet<string>,
): ViewState {
  if (!state.selection) {
    return state;
  }
  const pool = state.selection.kind === "node" ? nodeIds : paperIds;
  if (pool.has(state.selection.id)) {
    return state;
  }
  return { ...state, selection: null };
}
