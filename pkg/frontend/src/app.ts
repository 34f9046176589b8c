/** Browser shell: sidebar controls + the plot matrix.
 *
 * Plain DOM, no framework. The service origin defaults to the page origin
 * and can be overridden with ?api=http://host:port.
 */

import { ApiClient, ApiError } from "./api.js";
import { buildMatrix } from "./matrix.js";
import { renderMatrix } from "./svg.js";
import { MatrixDataController, validateViewState, type ViewState } from "./state.js";

interface Selections {
  project: string | null;
  intervalSet: string | null;
  models: string[];
  features: string[];
}

export function bootstrap(root: HTMLElement): void {
  const apiBase =
    new URLSearchParams(window.location.search).get("api") ?? window.location.origin;
  const api = new ApiClient(apiBase);
  const controller = new MatrixDataController(api);

  root.innerHTML = `
    <div class="layout">
      <aside class="sidebar">
        <h1>ahmose</h1>
        <label>project <select id="project"></select></label>
        <label>knowledge intervals <select id="intervals"></select></label>
        <fieldset id="models"><legend>models</legend></fieldset>
        <fieldset id="features"><legend>features</legend></fieldset>
      </aside>
      <main id="panel"><p class="empty">loading projects…</p></main>
    </div>`;

  const projectSelect = root.querySelector<HTMLSelectElement>("#project")!;
  const intervalSelect = root.querySelector<HTMLSelectElement>("#intervals")!;
  const modelsBox = root.querySelector<HTMLFieldSetElement>("#models")!;
  const featuresBox = root.querySelector<HTMLFieldSetElement>("#features")!;
  const panel = root.querySelector<HTMLElement>("#panel")!;

  const selections: Selections = { project: null, intervalSet: null, models: [], features: [] };

  function showMessage(message: string): void {
    panel.innerHTML = `<p class="empty">${message}</p>`;
  }

  function showError(error: unknown): void {
    // surface service errors without tearing down the current controls
    const detail =
      error instanceof ApiError ? `${error.message} (${error.code ?? "no code"})` : String(error);
    panel.innerHTML = `<p class="error">service error: ${detail}</p>`;
  }

  function checkboxList(
    box: HTMLFieldSetElement,
    values: string[],
    selected: string[],
    onChange: (picked: string[]) => void,
  ): void {
    const legend = box.querySelector("legend")!.outerHTML;
    box.innerHTML = legend;
    for (const value of values) {
      const label = document.createElement("label");
      const input = document.createElement("input");
      input.type = "checkbox";
      input.value = value;
      input.checked = selected.includes(value);
      input.addEventListener("change", () => {
        const picked = Array.from(box.querySelectorAll<HTMLInputElement>("input:checked")).map(
          (element) => element.value,
        );
        onChange(picked);
      });
      label.append(input, ` ${value}`);
      box.append(label);
    }
  }

  async function refreshMatrix(): Promise<void> {
    if (!selections.project || !selections.intervalSet) return;
    const view: ViewState = {
      project: selections.project,
      intervalSet: selections.intervalSet,
      models: selections.models,
      features: selections.features,
    };
    if (view.models.length === 0 || view.features.length === 0) {
      showMessage("select at least one model and one feature");
      return;
    }
    try {
      const data = await controller.load(view);
      if (data === null) return; // superseded by a newer selection
      const problem = validateViewState(data.project, view);
      if (problem !== null) {
        showMessage(problem);
        return;
      }
      panel.innerHTML = renderMatrix(
        buildMatrix({
          models: data.models,
          selectedModels: view.models,
          selectedFeatures: view.features,
          intervals: data.intervals,
          explanations: data.explanations,
          summaries: data.summaries,
        }),
      );
    } catch (error) {
      showError(error);
    }
  }

  async function selectProject(name: string): Promise<void> {
    selections.project = name;
    try {
      const [doc, intervalSets] = await Promise.all([
        api.getProject(name),
        api.listIntervalSets(name),
      ]);
      intervalSelect.innerHTML = intervalSets
        .map((value) => `<option value="${value}">${value}</option>`)
        .join("");
      selections.intervalSet = intervalSets[0] ?? null;
      selections.models = doc.models.slice(0, 2);
      selections.features = doc.dataset.feature_names.slice();
      checkboxList(modelsBox, doc.models, selections.models, (picked) => {
        selections.models = picked;
        void refreshMatrix();
      });
      checkboxList(featuresBox, doc.dataset.feature_names, selections.features, (picked) => {
        selections.features = picked;
        void refreshMatrix();
      });
      await refreshMatrix();
    } catch (error) {
      showError(error);
    }
  }

  projectSelect.addEventListener("change", () => void selectProject(projectSelect.value));
  intervalSelect.addEventListener("change", () => {
    selections.intervalSet = intervalSelect.value;
    void refreshMatrix();
  });

  api
    .listProjects()
    .then((projects) => {
      projectSelect.innerHTML = projects
        .map((value) => `<option value="${value}">${value}</option>`)
        .join("");
      if (projects.length > 0) {
        void selectProject(projects[0]);
      } else {
        showMessage("no projects served");
      }
    })
    .catch(showError);
}
