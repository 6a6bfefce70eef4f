import type { GraphData, ModuleCheck, TreeData } from "./types";
import type { ViewState } from "./state";
import { canAggregate } from "./state";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

const SVG_NS = "http://www.w3.org/2000/svg";

/** Top-down layer assignment from the root; purely structural, no DOM
 * measurement, so it behaves identically in the browser and under jsdom. */
export function layoutLayers(tree: TreeData): Map<number, { depth: number; slot: number; width: number }> {
  const children = new Map<number, number[]>();
  for (const c of tree.clusters) children.set(c.id, []);
  for (const e of tree.edges) children.get(e.b)?.push(e.a);
  const layers: number[][] = [];
  const seen = new Set<number>();
  let frontier = [tree.root];
  while (frontier.length > 0) {
    layers.push(frontier);
    frontier.forEach((id) => seen.add(id));
    frontier = frontier.flatMap((id) => (children.get(id) ?? []).filter((c) => !seen.has(c)));
  }
  // Disconnected safety net: anything unreachable goes on a final layer.
  const missing = tree.clusters.map((c) => c.id).filter((id) => !seen.has(id));
  if (missing.length > 0) layers.push(missing);
  const out = new Map<number, { depth: number; slot: number; width: number }>();
  layers.forEach((layer, depth) =>
    layer.forEach((id, slot) => out.set(id, { depth, slot, width: layer.length })),
  );
  return out;
}

function badge(label: string, ok: boolean, title: string): HTMLElement {
  const node = el("span", { class: `badge ${ok ? "ok" : "bad"}`, title }, label);
  return node;
}

function clusterBadges(check: ModuleCheck | undefined): HTMLElement {
  const wrap = el("span", { class: "badges" });
  if (!check) return wrap;
  wrap.append(
    badge("sep", check.separation_ok, "residual separated from the rest by the separator"),
    badge("cond", check.condition_ok, "shared reactions identified by consumption"),
    badge(
      check.history_equal ? "plain" : "refined",
      check.history_equal,
      check.history_equal
        ? "conditioning may use the separator's own history"
        : "conditioning needs the refined separator history",
    ),
  );
  return wrap;
}

export interface TreeHandlers {
  onClusterClick: (id: number) => void;
}

/** Render the junction tree: layered boxes labeled residual-first, edges
 * labeled by separators, and one badge strip per module. */
export function renderTree(
  container: HTMLElement,
  state: ViewState,
  handlers: TreeHandlers,
): void {
  container.textContent = "";
  const tree = state.tree;
  if (tree === null) return;
  container.dataset.revision = String(state.revision);
  const layout = layoutLayers(tree);
  const depthCount = Math.max(...[...layout.values()].map((p) => p.depth)) + 1;
  const width = 900;
  const layerHeight = 110;
  const height = depthCount * layerHeight + 40;

  const pos = (id: number) => {
    const p = layout.get(id)!;
    return {
      x: ((p.slot + 1) * width) / (p.width + 1),
      y: p.depth * layerHeight + 50,
    };
  };

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "tree-edges");
  for (const e of tree.edges) {
    const a = pos(e.a);
    const b = pos(e.b);
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(a.x));
    line.setAttribute("y1", String(a.y));
    line.setAttribute("x2", String(b.x));
    line.setAttribute("y2", String(b.y));
    svg.appendChild(line);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String((a.x + b.x) / 2));
    label.setAttribute("y", String((a.y + b.y) / 2 - 6));
    label.setAttribute("class", "separator-label");
    label.setAttribute("data-edge", `${e.a}-${e.b}`);
    label.textContent = e.separator.join(", ");
    svg.appendChild(label);
  }
  container.appendChild(svg);

  const checks = new Map<number, ModuleCheck>(
    (state.report?.modules ?? []).map((m) => [m.module, m]),
  );
  const residuals = new Map<number, string[]>(
    (state.modularization?.modules ?? []).map((m) => [m.id, m.residual]),
  );
  for (const cluster of tree.clusters) {
    const p = pos(cluster.id);
    const box = el("button", {
      class: `cluster${state.selection.includes(cluster.id) ? " selected" : ""}`,
      "data-cluster": String(cluster.id),
      style: `left:${(p.x / width) * 100}%; top:${p.y - 24}px;`,
      type: "button",
      "aria-pressed": String(state.selection.includes(cluster.id)),
    });
    const residual = residuals.get(cluster.id) ?? cluster.species;
    box.appendChild(
      el("span", { class: "residual" }, residual.length > 0 ? residual.join(", ") : "(empty residual)"),
    );
    box.appendChild(el("span", { class: "cluster-id" }, `#${cluster.id}`));
    box.appendChild(el("span", { class: "members", title: "all module species" }, cluster.species.join(", ")));
    box.appendChild(clusterBadges(checks.get(cluster.id)));
    box.addEventListener("click", () => handlers.onClusterClick(cluster.id));
    container.appendChild(box);
  }
}

/** Circular layout for the species graph; the UI never computes graph
 * theory, it only draws what the API returned. */
export function renderGraph(container: HTMLElement, graph: GraphData, directed: boolean): void {
  container.textContent = "";
  const size = 360;
  const radius = size / 2 - 50;
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${size} ${size}`);
  svg.setAttribute("class", "kig");
  const angle = (i: number) => (2 * Math.PI * i) / Math.max(graph.vertices.length, 1);
  const coord = (i: number) => ({
    x: size / 2 + radius * Math.cos(angle(i) - Math.PI / 2),
    y: size / 2 + radius * Math.sin(angle(i) - Math.PI / 2),
  });
  const index = new Map(graph.vertices.map((v, i) => [v, i]));
  if (directed) {
    const marker = document.createElementNS(SVG_NS, "marker");
    marker.setAttribute("id", "arrow");
    marker.setAttribute("viewBox", "0 0 10 10");
    marker.setAttribute("refX", "22");
    marker.setAttribute("refY", "5");
    marker.setAttribute("markerWidth", "7");
    marker.setAttribute("markerHeight", "7");
    marker.setAttribute("orient", "auto-start-reverse");
    const tip = document.createElementNS(SVG_NS, "path");
    tip.setAttribute("d", "M 0 0 L 10 5 L 0 10 z");
    marker.appendChild(tip);
    svg.appendChild(marker);
  }
  for (const [tail, head] of graph.edges) {
    const a = coord(index.get(tail) ?? 0);
    const b = coord(index.get(head) ?? 0);
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(a.x));
    line.setAttribute("y1", String(a.y));
    line.setAttribute("x2", String(b.x));
    line.setAttribute("y2", String(b.y));
    if (directed) line.setAttribute("marker-end", "url(#arrow)");
    svg.appendChild(line);
  }
  graph.vertices.forEach((v, i) => {
    const c = coord(i);
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", String(c.x));
    dot.setAttribute("cy", String(c.y));
    dot.setAttribute("r", "14");
    svg.appendChild(dot);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(c.x));
    label.setAttribute("y", String(c.y + 4));
    label.setAttribute("class", "vertex-label");
    label.textContent = v;
    svg.appendChild(label);
  });
  container.appendChild(svg);
}

export function renderControls(
  aggregateButton: HTMLButtonElement,
  undoButton: HTMLButtonElement,
  state: ViewState,
): void {
  aggregateButton.disabled = !canAggregate(state);
  const [i, j] = state.selection;
  aggregateButton.textContent =
    state.selection.length === 2 ? `Aggregate #${i} + #${j}` : "Aggregate (select two adjacent)";
  undoButton.disabled = state.busy || !state.canUndo;
}

export function renderError(container: HTMLElement, state: ViewState): void {
  container.textContent = state.error ?? "";
  container.hidden = state.error === null;
}

export function renderReportTable(container: HTMLElement, state: ViewState): void {
  container.textContent = "";
  const report = state.report;
  if (!report) return;
  container.dataset.revision = String(state.revision);
  const table = el("table", { class: "report" });
  const head = el("tr");
  for (const h of ["module", "residual", "separator", "separation", "condition", "history"]) {
    head.appendChild(el("th", {}, h));
  }
  table.appendChild(head);
  for (const m of report.modules) {
    const row = el("tr", { "data-module": String(m.module) });
    row.appendChild(el("td", {}, `#${m.module}`));
    row.appendChild(el("td", {}, m.residual.join(", ") || "-"));
    row.appendChild(el("td", { class: "separator-cell" }, m.separator.join(", ") || "-"));
    row.appendChild(el("td", {}, m.separation_ok ? "pass" : "FAIL"));
    row.appendChild(el("td", {}, m.condition_ok ? "pass" : "FAIL"));
    row.appendChild(el("td", {}, m.history_equal ? "plain" : "refined"));
    table.appendChild(row);
  }
  container.appendChild(table);
  container.appendChild(
    el("p", { class: "overall" }, `overall: ${report.overall ? "pass" : "FAIL"}`),
  );
}
