import type {
  CopyMove,
  GraphData,
  ModularizationData,
  NetworkData,
  ReportData,
  SeparationVerdict,
  TreePayload,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const res = await fetch(url, init);
  let body: unknown;
  try {
    body = await res.json();
  } catch {
    throw new ApiError(res.status, `non-JSON response from ${url}`);
  }
  if (!res.ok) {
    const message =
      typeof body === "object" && body !== null && "error" in body
        ? String((body as { error: unknown }).error)
        : `request failed with status ${res.status}`;
    throw new ApiError(res.status, message);
  }
  return body as T;
}

function post<T>(url: string, payload: unknown): Promise<T> {
  return request<T>(url, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(payload),
  });
}

export class ApiClient {
  constructor(readonly base: string) {}

  getNetwork(): Promise<{ revision: number; network: NetworkData }> {
    return request(`${this.base}/network`);
  }

  getKig(
    variant: "directed" | "undirected" | "moral" | "fraternized" = "directed",
  ): Promise<{ revision: number; variant: string; graph: GraphData }> {
    return request(`${this.base}/kig?variant=${variant}`);
  }

  getTree(): Promise<TreePayload> {
    return request(`${this.base}/tree`);
  }

  getModularization(): Promise<{ revision: number; modularization: ModularizationData }> {
    return request(`${this.base}/modularization`);
  }

  getReport(): Promise<{ revision: number; report: ReportData }> {
    return request(`${this.base}/report`);
  }

  aggregate(i: number, j: number): Promise<TreePayload> {
    return post(`${this.base}/aggregate`, { i, j });
  }

  undo(): Promise<TreePayload> {
    return post(`${this.base}/undo`, {});
  }

  copy(moves: CopyMove[]): Promise<TreePayload> {
    return post(`${this.base}/copy`, { moves });
  }

  reset(mode: "cliques" | "mpd"): Promise<TreePayload> {
    return post(`${this.base}/reset`, { mode });
  }

  separation(a: string[], b: string[], d: string[]): Promise<SeparationVerdict> {
    const q = (xs: string[]) => encodeURIComponent(xs.join(","));
    return request(`${this.base}/separation?a=${q(a)}&b=${q(b)}&d=${q(d)}`);
  }
}
