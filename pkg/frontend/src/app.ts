/**
 * Application shell: wires the bundle loader, search, overlay, and
 * playback models to a six-view DOM layout and keeps the whole view
 * state round-tripping through the URL hash.
 */

import { Atlas, FetchJson, FetchFailure, SchemaMismatch, loadBundle } from "./bundle";
import { Filters, authorNameIndex, searchPapers, SortKey } from "./search";
import { AmberEdge, nodeIndex, overlayEdges, pairPanel } from "./overlay";
import { playbackFrame, trajectoryIndex } from "./playback";
import {
  SceneGraph,
  Viewport,
  hitTestEdge,
  hitTestNode,
  renderScene,
} from "./scene";
import {
  ViewState,
  VIEW_NAMES,
  decodeHash,
  defaultState,
  encodeHash,
  validateSelection,
} from "./state";
import type { NodeRow, PaperRow, TrajectoryRow } from "./types";

const COMMUNITY_COLORS = [
  "#4e79a7", "#f28e2b", "#59a356", "#e15759", "#76b7b2",
  "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

const AMBER = "#ffb000";

function communityColor(id: number): string {
  return COMMUNITY_COLORS[((id % COMMUNITY_COLORS.length) + COMMUNITY_COLORS.length) % COMMUNITY_COLORS.length];
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function fmt(value: number, digits: number): string {
  return Number.isFinite(value) ? value.toFixed(digits) : "n/a";
}

export interface AppOptions {
  fetchJson?: FetchJson;
  /** Pass null to detach from the global window (no hash sync). */
  window?: Window | null;
}

export class App {
  readonly root: HTMLElement;
  readonly doc: Document;
  readonly scene = new SceneGraph();
  state: ViewState = defaultState();
  atlas: Atlas | null = null;
  sort: SortKey = "citations";
  sortAscending = false;

  private readonly win: Window | null;
  private nodes: readonly NodeRow[] = [];
  private papers: readonly PaperRow[] = [];
  private nameIndex = new Map<string, string[]>();
  private nodeById = new Map<string, NodeRow>();
  private paperById = new Map<string, PaperRow>();
  private trajByAuthor = new Map<string, TrajectoryRow>();
  private nodeIds: Set<string> = new Set();
  private paperIds: Set<string> = new Set();
  private activePair: AmberEdge | null = null;
  private lastWrittenHash = "";
  private canvasSize: [number, number] = [900, 600];
  private viewport: Viewport | null = null;

  constructor(root: HTMLElement, options: AppOptions = {}) {
    this.root = root;
    this.doc = root.ownerDocument;
    this.win =
      options.window !== undefined
        ? options.window
        : typeof window !== "undefined"
          ? window
          : null;
  }

  get filters(): Filters {
    return { venues: this.state.venues, years: this.state.years };
  }

  async load(bundleUrl: string, fetchJson?: FetchJson): Promise<void> {
    try {
      this.atlas = fetchJson ? await loadBundle(bundleUrl, fetchJson) : await loadBundle(bundleUrl);
    } catch (err) {
      this.renderLoadFailure(err);
      return;
    }
    const [nodes, papers, trajectories] = await Promise.all([
      this.atlas.nodes(),
      this.atlas.papers(),
      this.atlas.trajectories(),
    ]);
    this.nodes = nodes;
    this.papers = papers;
    this.nameIndex = authorNameIndex(papers, nodes);
    this.nodeById = nodeIndex(nodes);
    this.paperById = new Map(papers.map((p) => [p.id, p]));
    this.trajByAuthor = trajectoryIndex(trajectories);
    this.nodeIds = new Set(nodes.map((n) => n.id));
    this.paperIds = new Set(papers.map((p) => p.id));

    if (this.win) {
      this.state = decodeHash(this.win.location.hash);
      this.win.addEventListener("hashchange", () => {
        if (this.win && this.win.location.hash !== this.lastWrittenHash) {
          this.state = validateSelection(
            decodeHash(this.win.location.hash),
            this.nodeIds,
            this.paperIds,
          );
          void this.render();
        }
      });
    }
    this.state = validateSelection(this.state, this.nodeIds, this.paperIds);
    await this.render();
  }

  /** Apply a state change, sync the hash, and re-render. */
  async setState(partial: Partial<ViewState>): Promise<void> {
    this.state = validateSelection(
      { ...this.state, ...partial },
      this.nodeIds,
      this.paperIds,
    );
    if (partial.selection !== undefined || partial.overlay !== undefined) {
      this.activePair = null;
    }
    this.writeHash();
    await this.render();
  }

  showPair(edge: AmberEdge): void {
    this.activePair = edge;
    void this.render();
  }

  /** Canvas click in screen coordinates; amber edges win over nodes. */
  handleCanvasClick(sx: number, sy: number): void {
    if (!this.viewport) {
      return;
    }
    const [wx, wy] = this.viewport.toWorld(sx, sy);
    const tolerance = 8 / this.viewport.scale;
    if (this.state.view === "combined" && this.state.overlay) {
      const amber = hitTestEdge(this.scene, "amber", wx, wy, tolerance);
      if (amber && amber.ref) {
        this.showPair(amber.ref);
        return;
      }
    }
    const node = hitTestNode(this.scene, wx, wy, tolerance * 1.5);
    if (node) {
      void this.setState({ selection: { kind: "node", id: node.id } });
    }
  }

  private writeHash(): void {
    if (!this.win) {
      return;
    }
    const hash = encodeHash(this.state);
    this.lastWrittenHash = hash;
    const url = this.win.location.pathname + this.win.location.search + hash;
    if (this.win.history && typeof this.win.history.replaceState === "function") {
      this.win.history.replaceState(null, "", url);
    } else {
      this.win.location.hash = hash;
    }
  }

  private renderLoadFailure(err: unknown): void {
    this.root.textContent = "";
    if (err instanceof SchemaMismatch) {
      const banner = el(this.doc, "div", "version-banner");
      banner.textContent =
        `This atlas build reads bundle schema ${err.expected}, but the ` +
        `bundle declares ${err.found}. Re-export the bundle or update the atlas.`;
      this.root.appendChild(banner);
      return;
    }
    const detail = err instanceof FetchFailure ? err.message : String(err);
    const box = el(this.doc, "div", "load-error");
    box.textContent = `Could not load the atlas bundle. ${detail}`;
    this.root.appendChild(box);
  }

  async render(): Promise<void> {
    if (!this.atlas) {
      return;
    }
    this.root.textContent = "";
    this.root.appendChild(this.renderHeader());

    const main = el(this.doc, "main", "layout");
    const viewBox = el(this.doc, "section", "view");
    main.appendChild(viewBox);

    switch (this.state.view) {
      case "explorer":
        viewBox.appendChild(this.renderExplorer());
        break;
      case "years":
        viewBox.appendChild(this.renderYears());
        break;
      case "network":
        viewBox.appendChild(await this.renderNetwork());
        break;
      case "topic":
        viewBox.appendChild(this.renderTopic());
        break;
      case "trajectories":
        viewBox.appendChild(this.renderTrajectories());
        break;
      case "combined":
        viewBox.appendChild(await this.renderCombined());
        break;
    }

    main.appendChild(await this.renderPanel());
    this.root.appendChild(main);
  }

  private renderHeader(): HTMLElement {
    const header = el(this.doc, "header", "topbar");
    const nav = el(this.doc, "nav", "views");
    for (const name of VIEW_NAMES) {
      const button = el(this.doc, "button", name === this.state.view ? "active" : "", name);
      button.dataset.view = name;
      button.addEventListener("click", () => void this.setState({ view: name }));
      nav.appendChild(button);
    }
    header.appendChild(nav);

    const bar = el(this.doc, "div", "filters");

    const query = el(this.doc, "input", "query") as HTMLInputElement;
    query.type = "search";
    query.placeholder = "title or author";
    query.value = this.state.query;
    query.addEventListener("change", () => void this.setState({ query: query.value }));
    bar.appendChild(query);

    const venueBox = el(this.doc, "span", "venue-filter");
    for (const venue of this.allVenues()) {
      const label = el(this.doc, "label", "", venue);
      const check = el(this.doc, "input") as HTMLInputElement;
      check.type = "checkbox";
      check.value = venue;
      check.checked = this.state.venues.includes(venue);
      check.addEventListener("change", () => {
        const next = new Set(this.state.venues);
        if (check.checked) {
          next.add(venue);
        } else {
          next.delete(venue);
        }
        void this.setState({ venues: [...next].sort() });
      });
      label.prepend(check);
      venueBox.appendChild(label);
    }
    bar.appendChild(venueBox);

    const yearLo = el(this.doc, "input", "year-lo") as HTMLInputElement;
    const yearHi = el(this.doc, "input", "year-hi") as HTMLInputElement;
    yearLo.type = "number";
    yearHi.type = "number";
    yearLo.placeholder = "from";
    yearHi.placeholder = "to";
    if (this.state.years) {
      yearLo.value = String(this.state.years[0]);
      yearHi.value = String(this.state.years[1]);
    }
    const applyYears = () => {
      const lo = Number(yearLo.value);
      const hi = Number(yearHi.value);
      const valid = yearLo.value !== "" && yearHi.value !== "" &&
        Number.isInteger(lo) && Number.isInteger(hi) && lo <= hi;
      void this.setState({ years: valid ? [lo, hi] : null });
    };
    yearLo.addEventListener("change", applyYears);
    yearHi.addEventListener("change", applyYears);
    bar.appendChild(yearLo);
    bar.appendChild(yearHi);

    header.appendChild(bar);
    return header;
  }

  private allVenues(): string[] {
    return [...new Set(this.papers.map((p) => p.venue))].sort();
  }

  visiblePapers(): PaperRow[] {
    return searchPapers(this.papers, this.nameIndex, this.state.query, this.filters, {
      sort: this.sort,
      ascending: this.sortAscending,
    });
  }

  private renderExplorer(): HTMLElement {
    const box = el(this.doc, "div", "explorer");
    const rows = this.visiblePapers();
    box.appendChild(el(this.doc, "p", "count", `${rows.length} papers`));

    const table = el(this.doc, "table", "results");
    const head = el(this.doc, "tr");
    for (const [key, title] of [
      ["title", "Title"],
      ["authors", "Authors"],
      ["venue", "Venue"],
      ["year", "Year"],
      ["citations", "Citations"],
    ] as const) {
      const th = el(this.doc, "th", "", title);
      if (key === "year" || key === "citations") {
        th.classList.add("sortable");
        th.addEventListener("click", () => {
          if (this.sort === key) {
            this.sortAscending = !this.sortAscending;
          } else {
            this.sort = key;
            this.sortAscending = false;
          }
          void this.render();
        });
      }
      head.appendChild(th);
    }
    const thead = el(this.doc, "thead");
    thead.appendChild(head);
    table.appendChild(thead);

    const body = el(this.doc, "tbody");
    for (const paper of rows) {
      const tr = el(this.doc, "tr");
      tr.dataset.paperId = paper.id;
      if (this.state.selection?.kind === "paper" && this.state.selection.id === paper.id) {
        tr.classList.add("selected");
      }
      const names = paper.authors
        .map((a) => this.nodeById.get(a)?.label ?? a)
        .join(", ");
      tr.appendChild(el(this.doc, "td", "title", paper.title));
      tr.appendChild(el(this.doc, "td", "authors", names));
      tr.appendChild(el(this.doc, "td", "venue", paper.venue));
      tr.appendChild(el(this.doc, "td", "year", String(paper.year)));
      tr.appendChild(el(this.doc, "td", "citations", String(paper.citations)));
      tr.addEventListener("click", () =>
        void this.setState({ selection: { kind: "paper", id: paper.id } }),
      );
      body.appendChild(tr);
    }
    table.appendChild(body);
    box.appendChild(table);
    return box;
  }

  private renderYears(): HTMLElement {
    const box = el(this.doc, "div", "years");
    const papers = this.visiblePapers();
    const byYear = new Map<number, number>();
    for (const paper of papers) {
      byYear.set(paper.year, (byYear.get(paper.year) ?? 0) + 1);
    }
    const years = [...byYear.keys()].sort((a, b) => a - b);
    const peak = Math.max(1, ...byYear.values());
    const chart = el(this.doc, "div", "bar-chart");
    for (const year of years) {
      const count = byYear.get(year) ?? 0;
      const column = el(this.doc, "div", "bar-col");
      const bar = el(this.doc, "div", "bar");
      bar.style.height = `${Math.round((100 * count) / peak)}%`;
      bar.dataset.year = String(year);
      bar.dataset.count = String(count);
      bar.title = `${year}: ${count}`;
      column.appendChild(bar);
      column.appendChild(el(this.doc, "span", "bar-label", String(year)));
      chart.appendChild(column);
    }
    box.appendChild(chart);
    box.appendChild(el(this.doc, "p", "count", `${papers.length} papers across ${years.length} years`));
    return box;
  }

  private graphCanvas(): HTMLCanvasElement {
    const canvas = el(this.doc, "canvas", "stage") as HTMLCanvasElement;
    const [width, height] = this.canvasSize;
    canvas.width = width;
    canvas.height = height;
    canvas.addEventListener("click", (event: MouseEvent) => {
      const rect = canvas.getBoundingClientRect();
      this.handleCanvasClick(event.clientX - rect.left, event.clientY - rect.top);
    });
    return canvas;
  }

  private paintScene(canvas: HTMLCanvasElement): void {
    const [width, height] = this.canvasSize;
    this.viewport = new Viewport(this.scene, width, height);
    let ctx: CanvasRenderingContext2D | null = null;
    try {
      ctx = canvas.getContext("2d");
    } catch {
      ctx = null; // headless DOM without canvas support
    }
    renderScene(ctx, this.scene, width, height);
  }

  private buildAuthorScene(edges: readonly { source: string; target: string; w: number }[], layer: string): void {
    this.scene.clear();
    for (const edge of edges) {
      const a = this.nodeById.get(edge.source);
      const b = this.nodeById.get(edge.target);
      if (!a || !b) {
        continue;
      }
      this.scene.edges.push({
        kind: "base",
        x1: a.x,
        y1: a.y,
        x2: b.x,
        y2: b.y,
        width: Math.min(1 + Math.log1p(edge.w), 4),
        color: "#bbb",
      });
    }
    for (const node of this.nodes) {
      this.scene.nodes.push({
        id: node.id,
        x: node.x,
        y: node.y,
        radius: Math.min(3 + Math.sqrt(node.papers), 10),
        color: communityColor(node.communities[layer] ?? 0),
        label: node.label,
      });
    }
  }

  private async renderNetwork(): Promise<HTMLElement> {
    const box = el(this.doc, "div", "network");
    const edges = await this.atlas!.coauthorEdges();
    this.buildAuthorScene(edges, "coauthor");
    const canvas = this.graphCanvas();
    box.appendChild(canvas);
    this.paintScene(canvas);
    box.appendChild(
      el(this.doc, "p", "count", `${this.nodes.length} authors, ${edges.length} coauthor edges`),
    );
    return box;
  }

  private renderTopic(): HTMLElement {
    const box = el(this.doc, "div", "topic");
    const venues = this.allVenues();
    const papers = this.visiblePapers();
    this.scene.clear();
    for (const paper of papers) {
      this.scene.points.push({
        x: paper.x,
        y: paper.y,
        radius: 2 + Math.min(Math.sqrt(paper.citations), 6),
        color: communityColor(venues.indexOf(paper.venue)),
        id: paper.id,
      });
    }
    const canvas = this.graphCanvas();
    box.appendChild(canvas);
    this.paintScene(canvas);
    box.appendChild(el(this.doc, "p", "count", `${papers.length} papers plotted`));
    return box;
  }

  private async renderCombined(): Promise<HTMLElement> {
    const box = el(this.doc, "div", "combined");
    const toggle = el(this.doc, "label", "overlay-toggle", "phantom overlay");
    const check = el(this.doc, "input") as HTMLInputElement;
    check.type = "checkbox";
    check.checked = this.state.overlay;
    check.addEventListener("change", () => void this.setState({ overlay: check.checked }));
    toggle.prepend(check);
    box.appendChild(toggle);

    const edges = await this.atlas!.multiplexEdges();
    this.buildAuthorScene(edges, "multiplex");

    const pairs = await this.atlas!.phantomPairs();
    for (const amber of overlayEdges(pairs, this.state.overlay)) {
      const a = this.nodeById.get(amber.anchor);
      const b = this.nodeById.get(amber.partner);
      if (!a || !b) {
        continue;
      }
      this.scene.edges.push({
        kind: "amber",
        x1: a.x,
        y1: a.y,
        x2: b.x,
        y2: b.y,
        width: 2.5,
        color: AMBER,
        ref: amber,
      });
    }

    const canvas = this.graphCanvas();
    box.appendChild(canvas);
    this.paintScene(canvas);
    const amberCount = this.scene.edgesOfKind("amber").length;
    box.appendChild(
      el(this.doc, "p", "count",
        `${edges.length} multiplex edges, ${amberCount} suggested pairs shown`),
    );
    return box;
  }

  private renderTrajectories(): HTMLElement {
    const box = el(this.doc, "div", "trajectories");
    const needle = this.state.query.trim().toLowerCase();
    const authors = this.nodes.filter(
      (n) => !needle || n.label.toLowerCase().includes(needle),
    );

    const list = el(this.doc, "ul", "author-list");
    for (const node of authors) {
      const item = el(this.doc, "li", "", node.label);
      item.dataset.nodeId = node.id;
      if (this.state.selection?.kind === "node" && this.state.selection.id === node.id) {
        item.classList.add("selected");
      }
      item.addEventListener("click", () =>
        void this.setState({ selection: { kind: "node", id: node.id }, bin: 0 }),
      );
      list.appendChild(item);
    }
    box.appendChild(list);

    const stage = el(this.doc, "div", "playback");
    const selectedId =
      this.state.selection?.kind === "node" ? this.state.selection.id : null;
    const traj = selectedId ? this.trajByAuthor.get(selectedId) : undefined;
    const frame = playbackFrame(traj, this.state.bin);

    this.scene.clear();
    if (frame.available) {
      this.scene.polyline = frame.points;
      for (const [x, y] of frame.points) {
        this.scene.points.push({ x, y, radius: 3, color: "#4ad" });
      }
      const [hx, hy] = frame.points[frame.points.length - 1];
      this.scene.points.push({ x: hx, y: hy, radius: 5, color: "#e15759" });
    }
    const canvas = this.graphCanvas();
    stage.appendChild(canvas);
    this.paintScene(canvas);

    const scrub = el(this.doc, "input", "scrubber") as HTMLInputElement;
    scrub.type = "range";
    scrub.min = "0";
    scrub.max = String(Math.max(frame.binCount - 1, 0));
    scrub.value = String(frame.binIndex);
    scrub.disabled = !frame.available;
    const applyBin = (): void => void this.setState({ bin: Number(scrub.value) });
    scrub.addEventListener("input", applyBin);
    scrub.addEventListener("change", applyBin);
    stage.appendChild(scrub);

    const stats = el(this.doc, "div", "traj-stats");
    if (frame.available) {
      stats.appendChild(el(this.doc, "span", "traj-class", frame.classLabel));
      stats.appendChild(el(this.doc, "span", "traj-eff", `η = ${fmt(frame.efficiency, 3)}`));
      stats.appendChild(el(this.doc, "span", "traj-bin",
        `bin ${frame.binIndex + 1}/${frame.binCount}` +
        (frame.yearStart !== null ? ` (${frame.yearStart})` : "")));
      stats.appendChild(el(this.doc, "span", "traj-path", `path ${fmt(frame.totalPath, 2)}`));
      stats.appendChild(el(this.doc, "span", "traj-net", `net ${fmt(frame.net, 2)}`));
      stats.appendChild(el(this.doc, "span", "traj-span", `${frame.spanYears} years`));
    } else {
      stats.appendChild(
        el(this.doc, "span", "traj-missing",
          selectedId ? "no trajectory for this author" : "select an author"),
      );
    }
    stage.appendChild(stats);
    box.appendChild(stage);
    return box;
  }

  private async renderPanel(): Promise<HTMLElement> {
    const panel = el(this.doc, "aside", "panel");
    if (this.activePair) {
      panel.appendChild(await this.renderPairPanel(this.activePair));
      return panel;
    }
    const selection = this.state.selection;
    if (!selection) {
      panel.appendChild(el(this.doc, "p", "hint", "select a node or paper"));
      return panel;
    }
    if (selection.kind === "paper") {
      const paper = this.paperById.get(selection.id);
      if (paper) {
        panel.appendChild(this.paperCard(paper));
      }
    } else {
      const node = this.nodeById.get(selection.id);
      if (node) {
        panel.appendChild(await this.authorCard(node));
      }
    }
    return panel;
  }

  private paperCard(paper: PaperRow): HTMLElement {
    const card = el(this.doc, "div", "card paper-card");
    card.appendChild(el(this.doc, "h3", "", paper.title));
    card.appendChild(el(this.doc, "p", "", `${paper.venue}, ${paper.year}`));
    card.appendChild(el(this.doc, "p", "", `${paper.citations} citations`));
    const names = paper.authors.map((a) => this.nodeById.get(a)?.label ?? a);
    card.appendChild(el(this.doc, "p", "authors", names.join(", ")));
    return card;
  }

  private async authorCard(node: NodeRow): Promise<HTMLElement> {
    const card = el(this.doc, "div", "card author-card");
    card.dataset.nodeId = node.id;
    card.appendChild(el(this.doc, "h3", "", node.label));
    card.appendChild(
      el(this.doc, "p", "", `${node.papers} papers, ${node.citations} citations`),
    );
    card.appendChild(
      el(this.doc, "p", "", `active ${node.first_year}-${node.last_year}`),
    );
    const memberships = Object.entries(node.communities)
      .map(([layer, cid]) => `${layer} ${cid}`)
      .join(", ");
    card.appendChild(el(this.doc, "p", "communities", memberships));

    const labels = await this.atlas!.labels();
    const layer = this.state.view === "combined" ? "multiplex" : "coauthor";
    const row = labels.find(
      (l) => l.layer === layer && l.community_id === node.communities[layer],
    );
    if (row) {
      const terms = row.top_terms.slice(0, 5).map(([term]) => term).join(", ");
      card.appendChild(el(this.doc, "p", "terms", terms));
    }
    return card;
  }

  private async renderPairPanel(edge: AmberEdge): Promise<HTMLElement> {
    const box = el(this.doc, "div", "pair-panel");
    const detail = pairPanel(edge, this.nodeById);
    box.appendChild(el(this.doc, "h3", "", "suggested collaboration"));
    for (const member of [detail.anchor, detail.partner]) {
      if (member) {
        box.appendChild(await this.authorCard(member));
      }
    }
    const stats = el(this.doc, "div", "pair-stats");
    stats.appendChild(el(this.doc, "span", "pair-cosine", `cosine ${fmt(detail.cosine, 4)}`));
    stats.appendChild(
      el(this.doc, "span", "pair-distance", `train distance ${detail.distanceTag}`),
    );
    stats.appendChild(
      el(this.doc, "span", "pair-realized", detail.realized ? "realized" : "not realized"),
    );
    box.appendChild(stats);
    return box;
  }
}

/** Load the bundle at `bundleUrl` and mount the atlas into `root`. */
export async function boot(
  root: HTMLElement,
  bundleUrl: string,
  options: AppOptions = {},
): Promise<App> {
  const app = new App(root, options);
  await app.load(bundleUrl, options.fetchJson);
  return app;
}
