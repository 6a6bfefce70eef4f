import type { ModularizationData, ReportData, TreeData, TreePayload } from "./types";

/**
 * Client-side view state.  The server owns all graph theory; this machine
 * only tracks the last accepted revision, the cluster selection and whether
 * a mutation is in flight.  A payload is displayed only if its revision is
 * not older than what is already shown, so stale responses can never
 * overwrite fresher ones.
 */
export interface ViewState {
  revision: number;
  tree: TreeData | null;
  modularization: ModularizationData | null;
  report: ReportData | null;
  canUndo: boolean;
  selection: number[];
  busy: boolean;
  error: string | null;
}

export function initialState(): ViewState {
  return {
    revision: -1,
    tree: null,
    modularization: null,
    report: null,
    canUndo: false,
    selection: [],
    busy: false,
    error: null,
  };
}

/** Accept a payload unless it is older than the displayed revision. */
export function acceptPayload(state: ViewState, payload: TreePayload): ViewState {
  if (payload.revision < state.revision) {
    return state; // out-of-order response; keep the fresher view
  }
  const clusterIds = new Set(payload.tree.clusters.map((c) => c.id));
  return {
    ...state,
    revision: payload.revision,
    tree: payload.tree,
    modularization: payload.modularization ?? state.modularization,
    report: payload.report ?? state.report,
    canUndo: payload.can_undo ?? state.canUndo,
    selection: state.selection.filter((id) => clusterIds.has(id)),
    error: null,
  };
}

export function setError(state: ViewState, message: string): ViewState {
  return { ...state, error: message };
}

export function setBusy(state: ViewState, busy: boolean): ViewState {
  return { ...state, busy };
}

export function toggleSelection(state: ViewState, id: number): ViewState {
  if (state.tree === null || !state.tree.clusters.some((c) => c.id === id)) {
    return state;
  }
  const selection = state.selection.includes(id)
    ? state.selection.filter((s) => s !== id)
    : [...state.selection, id].slice(-2);
  return { ...state, selection };
}

export function areAdjacent(tree: TreeData, i: number, j: number): boolean {
  return tree.edges.some(
    (e) => (e.a === i && e.b === j) || (e.a === j && e.b === i),
  );
}

/** Aggregation is offered only for a selected pair of adjacent clusters. */
export function canAggregate(state: ViewState): boolean {
  if (state.busy || state.tree === null || state.selection.length !== 2) {
    return false;
  }
  const [i, j] = state.selection;
  return areAdjacent(state.tree, i, j);
}

export interface CopyCheck {
  ok: boolean;
  reason: string | null;
}

/** Client-side preconditions for copying a species between modules. */
export function checkCopy(
  tree: TreeData | null,
  species: string,
  from: number,
  to: number,
): CopyCheck {
  if (tree === null) return { ok: false, reason: "no tree loaded" };
  if (!species) return { ok: false, reason: "choose a species" };
  const source = tree.clusters.find((c) => c.id === from);
  const target = tree.clusters.find((c) => c.id === to);
  if (!source || !target) return { ok: false, reason: "unknown module id" };
  if (from === to) return { ok: false, reason: "source and target coincide" };
  if (!source.species.includes(species)) {
    return { ok: false, reason: `${species} is not in module ${from}` };
  }
  if (target.species.includes(species)) {
    return { ok: false, reason: `${species} is already in module ${to}` };
  }
  return { ok: true, reason: null };
}
