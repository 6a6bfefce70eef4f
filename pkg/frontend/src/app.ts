import { ApiClient, ApiError } from "./api";
import {
  acceptPayload,
  checkCopy,
  initialState,
  setBusy,
  setError,
  toggleSelection,
  type ViewState,
} from "./state";
import {
  renderControls,
  renderError,
  renderGraph,
  renderReportTable,
  renderTree,
} from "./render";
import type { SeparationVerdict, TreePayload } from "./types";

export interface AppElements {
  tree: HTMLElement;
  report: HTMLElement;
  graph: HTMLElement;
  error: HTMLElement;
  aggregateButton: HTMLButtonElement;
  undoButton: HTMLButtonElement;
  probeResult: HTMLElement;
  copyStatus: HTMLElement;
}

/**
 * Controller: every view change follows a successful API response carrying a
 * revision at least as new as the displayed one.  There are no optimistic
 * updates, and at most one mutating request is in flight at a time.
 */
export class App {
  state: ViewState = initialState();
  private graphVariant: "directed" | "undirected" | "moral" | "fraternized" = "directed";

  constructor(
    private readonly api: ApiClient,
    private readonly ui: AppElements,
  ) {}

  async load(): Promise<void> {
    try {
      const [tree, mod, report, kig] = await Promise.all([
        this.api.getTree(),
        this.api.getModularization(),
        this.api.getReport(),
        this.api.getKig(this.graphVariant),
      ]);
      this.state = acceptPayload(this.state, {
        ...tree,
        modularization: mod.modularization,
        report: report.report,
      });
      renderGraph(this.ui.graph, kig.graph, this.graphVariant === "directed");
      this.renderAll();
    } catch (err) {
      this.fail(err);
    }
  }

  private renderAll(): void {
    renderTree(this.ui.tree, this.state, {
      onClusterClick: (id) => this.onClusterClick(id),
    });
    renderReportTable(this.ui.report, this.state);
    renderControls(this.ui.aggregateButton, this.ui.undoButton, this.state);
    renderError(this.ui.error, this.state);
  }

  private fail(err: unknown): void {
    const message =
      err instanceof ApiError
        ? `server rejected the request: ${err.message}`
        : `connection problem: ${String(err)}`;
    // Non-destructive: keep the last good view, surface a banner.
    this.state = setError(this.state, message);
    renderError(this.ui.error, this.state);
    renderControls(this.ui.aggregateButton, this.ui.undoButton, this.state);
  }

  onClusterClick(id: number): void {
    this.state = toggleSelection(this.state, id);
    this.renderAll();
  }

  private async mutate(call: () => Promise<TreePayload>): Promise<void> {
    if (this.state.busy) return;
    this.state = setBusy(this.state, true);
    renderControls(this.ui.aggregateButton, this.ui.undoButton, this.state);
    try {
      const payload = await call();
      this.state = acceptPayload(setBusy(this.state, false), payload);
      this.renderAll();
    } catch (err) {
      this.state = setBusy(this.state, false);
      this.fail(err);
    }
  }

  async aggregateSelected(): Promise<void> {
    if (this.state.selection.length !== 2) return;
    const [i, j] = this.state.selection;
    await this.mutate(() => this.api.aggregate(i, j));
  }

  async undo(): Promise<void> {
    await this.mutate(() => this.api.undo());
  }

  async reset(mode: "cliques" | "mpd"): Promise<void> {
    await this.mutate(() => this.api.reset(mode));
  }

  /** Copy dialog submit: invalid moves are blocked before any request. */
  async copySpecies(species: string, from: number, to: number): Promise<boolean> {
    const verdict = checkCopy(this.state.tree, species, from, to);
    if (!verdict.ok) {
      this.ui.copyStatus.textContent = `blocked: ${verdict.reason}`;
      return false;
    }
    this.ui.copyStatus.textContent = "";
    await this.mutate(() => this.api.copy([{ species, from, to }]));
    return this.state.error === null;
  }

  async probeSeparation(a: string[], b: string[], d: string[]): Promise<SeparationVerdict | null> {
    if (a.length === 0 || b.length === 0) {
      this.ui.probeResult.textContent = "blocked: both sides need at least one species";
      return null;
    }
    const all = [...a, ...b, ...d];
    if (new Set(all).size !== all.length) {
      this.ui.probeResult.textContent = "blocked: the three sets must be disjoint";
      return null;
    }
    try {
      const verdict = await this.api.separation(a, b, d);
      this.ui.probeResult.textContent = `graphical: ${verdict.graphical} / chemical: ${verdict.chemical}`;
      this.ui.probeResult.dataset.graphical = String(verdict.graphical);
      this.ui.probeResult.dataset.chemical = String(verdict.chemical);
      return verdict;
    } catch (err) {
      this.fail(err);
      return null;
    }
  }

  async setGraphVariant(variant: "directed" | "undirected" | "moral" | "fraternized"): Promise<void> {
    this.graphVariant = variant;
    try {
      const kig = await this.api.getKig(variant);
      renderGraph(this.ui.graph, kig.graph, variant === "directed");
    } catch (err) {
      this.fail(err);
    }
  }
}
