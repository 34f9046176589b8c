/** Typed read-only client for the project service. Issues GETs only. */

import type {
  ExplanationsDoc,
  IntervalSetDoc,
  LeaderboardEntry,
  NotFoundDoc,
  ProjectDoc,
  SummaryDoc,
} from "./types.js";

export type FetchLike = (url: string) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}>;

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly code?: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url) => fetch(url),
  ) {}

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path);
    if (!response.ok) {
      let code: string | undefined;
      try {
        code = ((await response.json()) as NotFoundDoc).code;
      } catch {
        code = undefined;
      }
      throw new ApiError(`GET ${path} failed (${response.status})`, response.status, code);
    }
    return (await response.json()) as T;
  }

  listProjects(): Promise<string[]> {
    return this.get("/projects");
  }

  getProject(project: string): Promise<ProjectDoc> {
    return this.get(`/projects/${encodeURIComponent(project)}`);
  }

  listIntervalSets(project: string): Promise<string[]> {
    return this.get(`/projects/${encodeURIComponent(project)}/intervals`);
  }

  getIntervalSet(project: string, name: string): Promise<IntervalSetDoc> {
    return this.get(
      `/projects/${encodeURIComponent(project)}/intervals/${encodeURIComponent(name)}`,
    );
  }

  getModels(project: string): Promise<LeaderboardEntry[]> {
    return this.get(`/projects/${encodeURIComponent(project)}/models`);
  }

  getExplanations(
    project: string,
    modelId: string,
    intervalSet?: string,
  ): Promise<ExplanationsDoc> {
    const query = intervalSet === undefined ? "" : `?intervals=${encodeURIComponent(intervalSet)}`;
    return this.get(
      `/projects/${encodeURIComponent(project)}/models/${encodeURIComponent(modelId)}/explanations${query}`,
    );
  }

  getSummary(project: string, modelId: string, intervalSet: string): Promise<SummaryDoc> {
    return this.get(
      `/projects/${encodeURIComponent(project)}/models/${encodeURIComponent(modelId)}/summary` +
        `?intervals=${encodeURIComponent(intervalSet)}`,
    );
  }
}
