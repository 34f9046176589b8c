/** View state and the data controller behind the sidebar.
 *
 * The rendered view is a pure function of (ViewState, served data). Loads are
 * keyed by a generation counter: when selections change while a fetch is in
 * flight, the stale response is dropped (last write wins). Project-level
 * documents (project doc, leaderboard) are cached per project, so switching
 * interval sets re-fetches summaries and explanations but never the
 * leaderboard.
 */

import { ApiClient } from "./api.js";
import type {
  ExplanationsDoc,
  IntervalSetDoc,
  LeaderboardEntry,
  ProjectDoc,
  SummaryDoc,
} from "./types.js";

export interface ViewState {
  project: string;
  intervalSet: string;
  models: string[]; // ordered subset of the project's model ids
  features: string[]; // ordered subset of the dataset's feature names
}

export function validateViewState(project: ProjectDoc, view: ViewState): string | null {
  if (view.project !== project.name) return `view is for project ${view.project}`;
  if (!project.interval_sets.includes(view.intervalSet)) {
    return `unknown interval set ${view.intervalSet}`;
  }
  for (const modelId of view.models) {
    if (!project.models.includes(modelId)) return `unknown model ${modelId}`;
  }
  for (const feature of view.features) {
    if (!project.dataset.feature_names.includes(feature)) return `unknown feature ${feature}`;
  }
  if (view.models.length === 0) return "select at least one model";
  if (view.features.length === 0) return "select at least one feature";
  return null;
}

export interface MatrixData {
  project: ProjectDoc;
  models: LeaderboardEntry[];
  intervals: IntervalSetDoc;
  explanations: Map<string, ExplanationsDoc>;
  summaries: Map<string, SummaryDoc>;
}

interface ProjectCache {
  name: string;
  doc: ProjectDoc;
  models: LeaderboardEntry[];
  intervalSets: Map<string, IntervalSetDoc>;
  // keyed by `${modelId}::${intervalSet}`
  explanations: Map<string, ExplanationsDoc>;
  summaries: Map<string, SummaryDoc>;
}

export class MatrixDataController {
  private generation = 0;
  private cache: ProjectCache | null = null;

  constructor(private readonly api: ApiClient) {}

  /** Load everything the matrix needs; returns null if a newer load started
   * while this one was in flight. */
  async load(view: ViewState): Promise<MatrixData | null> {
    const myGeneration = ++this.generation;
    if (this.cache === null || this.cache.name !== view.project) {
      const [doc, models] = await Promise.all([
        this.api.getProject(view.project),
        this.api.getModels(view.project),
      ]);
      this.cache = {
        name: view.project,
        doc,
        models,
        intervalSets: new Map(),
        explanations: new Map(),
        summaries: new Map(),
      };
    }
    const cache = this.cache;
    if (!cache.intervalSets.has(view.intervalSet)) {
      cache.intervalSets.set(
        view.intervalSet,
        await this.api.getIntervalSet(view.project, view.intervalSet),
      );
    }
    const explanations = new Map<string, ExplanationsDoc>();
    const summaries = new Map<string, SummaryDoc>();
    for (const modelId of view.models) {
      const key = `${modelId}::${view.intervalSet}`;
      if (!cache.explanations.has(key)) {
        cache.explanations.set(
          key,
          await this.api.getExplanations(view.project, modelId, view.intervalSet),
        );
      }
      if (!cache.summaries.has(key)) {
        cache.summaries.set(key, await this.api.getSummary(view.project, modelId, view.intervalSet));
      }
      explanations.set(modelId, cache.explanations.get(key)!);
      summaries.set(modelId, cache.summaries.get(key)!);
    }
    if (myGeneration !== this.generation) {
      return null; // superseded by a newer selection
    }
    return {
      project: cache.doc,
      models: cache.models,
      intervals: cache.intervalSets.get(view.intervalSet)!,
      explanations,
      summaries,
    };
  }
}
