export interface TreeCluster {
  id: number;
  species: string[];
}

export interface TreeEdge {
  a: number;
  b: number;
  separator: string[];
}

export interface TreeData {
  clusters: TreeCluster[];
  edges: TreeEdge[];
  root: number;
}

export interface ModuleEntry {
  id: number;
  species: string[];
  separator: string[];
  residual: string[];
}

export interface ModularizationData {
  modules: ModuleEntry[];
  provenance: string;
}

export interface Finding {
  code: string;
  severity: string;
  message: string;
}

export interface ModuleCheck {
  module: number;
  species: string[];
  separator: string[];
  residual: string[];
  separation_ok: boolean;
  condition_ok: boolean;
  history_equal: boolean;
  shared_reactions: string[];
  closure_within_module: boolean;
  findings: Finding[];
}

export interface ReportData {
  overall: boolean;
  modules: ModuleCheck[];
}

export interface GraphData {
  vertices: string[];
  edges: [string, string][];
}

export interface ReactionData {
  name: string;
  reactants: [string, number][];
  products: [string, number][];
  rate: number;
}

export interface NetworkData {
  species: string[];
  reactions: ReactionData[];
}

export interface TreePayload {
  revision: number;
  tree: TreeData;
  modularization?: ModularizationData;
  report?: ReportData;
  can_undo?: boolean;
}

export interface SeparationVerdict {
  revision: number;
  graphical: boolean;
  chemical: boolean;
  agree: boolean;
}

export interface CopyMove {
  species: string;
  from: number;
  to: number;
}
