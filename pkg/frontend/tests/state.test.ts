import { describe, expect, it } from "vitest";

import { ApiClient, type FetchLike } from "../src/api.js";
import { MatrixDataController, validateViewState, type ViewState } from "../src/state.js";
import type { ProjectDoc } from "../src/types.js";
import { FIXTURE_MODELS, PROJECT, loadFixture, makeFakeFetch } from "./serve_fixtures.js";

const baseView: ViewState = {
  project: PROJECT,
  intervalSet: "expert",
  models: [...FIXTURE_MODELS],
  features: ["Anth", "BW", "TSS", "TA"],
};

describe("view state validation", () => {
  const project = loadFixture<ProjectDoc>("project");

  it("accepts selections that reference the loaded project", () => {
    expect(validateViewState(project, baseView)).toBeNull();
  });

  it("rejects unknown ids and empty selections", () => {
    expect(validateViewState(project, { ...baseView, models: ["GHOST"] })).toMatch(/GHOST/);
    expect(validateViewState(project, { ...baseView, features: ["nope"] })).toMatch(/nope/);
    expect(validateViewState(project, { ...baseView, models: [] })).toMatch(/at least one model/);
    expect(validateViewState(project, { ...baseView, features: [] })).toMatch(/at least one feature/);
    expect(validateViewState(project, { ...baseView, intervalSet: "zz" })).toMatch(/interval set/);
  });
});

describe("matrix data controller", () => {
  it("loads everything the matrix needs", async () => {
    const { fetchFn } = makeFakeFetch();
    const controller = new MatrixDataController(new ApiClient("", fetchFn));
    const data = await controller.load(baseView);
    expect(data).not.toBeNull();
    expect(data!.project.name).toBe(PROJECT);
    expect([...data!.explanations.keys()]).toEqual([...FIXTURE_MODELS]);
    expect([...data!.summaries.keys()]).toEqual([...FIXTURE_MODELS]);
    expect(data!.intervals.name).toBe("expert");
  });

  it("switching interval sets re-fetches summaries but never the leaderboard", async () => {
    const { fetchFn, log } = makeFakeFetch({ extraIntervalSets: ["expert-b"] });
    const controller = new MatrixDataController(new ApiClient("", fetchFn));
    await controller.load(baseView);
    const before = log.length;
    const data = await controller.load({ ...baseView, intervalSet: "expert-b" });
    expect(data).not.toBeNull();
    const delta = log.slice(before);
    // new interval set, new summaries and explanations for it
    expect(delta.some((url) => url.includes("/intervals/expert-b"))).toBe(true);
    expect(delta.filter((url) => url.includes("/summary?intervals=expert-b"))).toHaveLength(2);
    // leaderboard and project doc stay cached
    expect(delta.some((url) => url.endsWith("/models"))).toBe(false);
    expect(delta.some((url) => url.endsWith(`/projects/${PROJECT}`))).toBe(false);
  });

  it("repeating a selection serves everything from cache", async () => {
    const { fetchFn, log } = makeFakeFetch();
    const controller = new MatrixDataController(new ApiClient("", fetchFn));
    await controller.load(baseView);
    const before = log.length;
    const data = await controller.load(baseView);
    expect(data).not.toBeNull();
    expect(log.length).toBe(before); // zero new requests
  });

  it("drops stale responses: last write wins", async () => {
    const gate: Array<() => void> = [];
    const { fetchFn } = makeFakeFetch();
    const gatedFetch: FetchLike = (url) =>
      new Promise((resolve) => {
        gate.push(() => resolve(fetchFn(url)));
      });
    const controller = new MatrixDataController(new ApiClient("", gatedFetch));
    const first = controller.load(baseView);
    const second = controller.load({ ...baseView, models: [FIXTURE_MODELS[0]] });
    // release all pending requests in arrival order until both settle
    while (gate.length > 0) {
      gate.shift()!();
      await new Promise((resolve) => setTimeout(resolve, 0));
    }
    const [firstResult, secondResult] = await Promise.all([first, second]);
    expect(firstResult).toBeNull(); // superseded
    expect(secondResult).not.toBeNull();
    expect([...secondResult!.explanations.keys()]).toEqual([FIXTURE_MODELS[0]]);
  });
});
