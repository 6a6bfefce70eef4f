import { ApiClient } from "./api";
import { App, type AppElements } from "./app";
import "./style.css";

function parseList(value: string): string[] {
  return value
    .split(",")
    .map((s) => s.trim())
    .filter((s) => s.length > 0);
}

/** Build the page skeleton and wire the controller; exported so tests can
 * mount the whole app against any server. */
export function mountApp(root: HTMLElement, baseUrl: string): App {
  root.innerHTML = `
    <header>
      <h1>Modularization explorer</h1>
      <nav>
        <button type="button" data-action="reset-cliques">Clique tree</button>
        <button type="button" data-action="reset-mpd">Prime decomposition</button>
        <button type="button" data-action="undo" disabled>Undo</button>
        <button type="button" data-action="aggregate" disabled>Aggregate</button>
      </nav>
    </header>
    <p data-role="error" class="error-banner" hidden></p>
    <main>
      <section class="tree-panel">
        <h2>Junction tree</h2>
        <div data-role="tree" class="tree-canvas"></div>
      </section>
      <section class="side-panel">
        <h2>Module report</h2>
        <div data-role="report"></div>
        <h2>Copy species</h2>
        <form data-role="copy-form">
          <input name="species" placeholder="species" aria-label="species" />
          <input name="from" placeholder="from module" aria-label="from module" size="4" />
          <input name="to" placeholder="to module" aria-label="to module" size="4" />
          <button type="submit">Copy</button>
        </form>
        <p data-role="copy-status" class="status"></p>
        <h2>Separation probe</h2>
        <form data-role="probe-form">
          <input name="a" placeholder="side A (comma separated)" aria-label="side A" />
          <input name="b" placeholder="side B" aria-label="side B" />
          <input name="d" placeholder="separator" aria-label="separator" />
          <button type="submit">Probe</button>
        </form>
        <p data-role="probe-result" class="status"></p>
        <h2>Species graph</h2>
        <label>
          variant
          <select data-role="variant">
            <option value="directed">directed</option>
            <option value="undirected">undirected</option>
            <option value="moral">moral</option>
            <option value="fraternized">fraternized</option>
          </select>
        </label>
        <div data-role="graph"></div>
      </section>
    </main>
  `;

  const q = <T extends Element>(sel: string): T => {
    const node = root.querySelector<T>(sel);
    if (!node) throw new Error(`missing element ${sel}`);
    return node;
  };

  const ui: AppElements = {
    tree: q('[data-role="tree"]'),
    report: q('[data-role="report"]'),
    graph: q('[data-role="graph"]'),
    error: q('[data-role="error"]'),
    aggregateButton: q('[data-action="aggregate"]'),
    undoButton: q('[data-action="undo"]'),
    probeResult: q('[data-role="probe-result"]'),
    copyStatus: q('[data-role="copy-status"]'),
  };

  const app = new App(new ApiClient(baseUrl), ui);

  q<HTMLButtonElement>('[data-action="aggregate"]').addEventListener("click", () => {
    void app.aggregateSelected();
  });
  q<HTMLButtonElement>('[data-action="undo"]').addEventListener("click", () => {
    void app.undo();
  });
  q<HTMLButtonElement>('[data-action="reset-cliques"]').addEventListener("click", () => {
    void app.reset("cliques");
  });
  q<HTMLButtonElement>('[data-action="reset-mpd"]').addEventListener("click", () => {
    void app.reset("mpd");
  });
  q<HTMLFormElement>('[data-role="copy-form"]').addEventListener("submit", (event) => {
    event.preventDefault();
    const form = event.currentTarget as HTMLFormElement;
    const data = new FormData(form);
    void app.copySpecies(
      String(data.get("species") ?? "").trim(),
      Number(data.get("from")),
      Number(data.get("to")),
    );
  });
  q<HTMLFormElement>('[data-role="probe-form"]').addEventListener("submit", (event) => {
    event.preventDefault();
    const form = event.currentTarget as HTMLFormElement;
    const data = new FormData(form);
    void app.probeSeparation(
      parseList(String(data.get("a") ?? "")),
      parseList(String(data.get("b") ?? "")),
      parseList(String(data.get("d") ?? "")),
    );
  });
  q<HTMLSelectElement>('[data-role="variant"]').addEventListener("change", (event) => {
    const select = event.currentTarget as HTMLSelectElement;
    void app.setGraphVariant(select.value as never);
  });

  void app.load();
  return app;
}

if (!import.meta.env?.TEST) {
  const root = document.getElementById("app");
  if (root) {
    // Served by the session API itself, or pointed at one via ?api=.
    const params = new URLSearchParams(window.location.search);
    mountApp(root, params.get("api") ?? "");
  }
}
