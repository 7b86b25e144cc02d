import { ApiError, LabApi } from "./api.js";
import { render } from "./render.js";
import { applyObservation, initialState, type LabState, type Observation } from "./state.js";

export interface LabApp {
  state(): LabState;
  loadModelDocument(doc: unknown): Promise<void>;
  refresh(): Promise<void>;
}

/** Wire the lab into a container element. All semantics stay server-side;
 * every click turns into one API call and one re-render of its response. */
export function createLab(root: HTMLElement, api: LabApi): LabApp {
  let state: LabState = initialState;

  function draw(): void {
    root.innerHTML = render(state);
    bind();
  }

  function show(obs: Observation): void {
    state = applyObservation(state, obs);
    draw();
  }

  function fail(error: unknown): void {
    const message = error instanceof ApiError ? error.message : String(error);
    state = { ...state, notice: message };
    draw();
  }

  function pickedAssignment(): Record<string, string> {
    const assignment: Record<string, string> = {};
    root.querySelectorAll<HTMLSelectElement>("select[data-picker]").forEach((select) => {
      if (select.value !== "") {
        assignment[select.dataset.picker as string] = select.value;
      }
    });
    return assignment;
  }

  function bind(): void {
    const on = (id: string, handler: () => void) => {
      const el = root.querySelector<HTMLElement>(`#${id}`);
      if (el) el.addEventListener("click", handler);
    };
    on("intervene", () => {
      const assignment = pickedAssignment();
      const allowEmpty = root.querySelector<HTMLInputElement>("#allow-empty")?.checked;
      if (Object.keys(assignment).length === 0 && !allowEmpty) {
        state = { ...state, notice: "pick at least one value (or allow the empty assignment)" };
        draw();
        return;
      }
      api.intervene(assignment).then(show, fail);
    });
    on("undo", () => api.undo().then(show, fail));
    on("reset", () => api.reset().then(show, fail));
    on("announce", () => {
      const input = root.querySelector<HTMLInputElement>("#announce-input");
      if (input && input.value.trim()) {
        api.announce(input.value.trim()).then(show, fail);
      }
    });
    on("query", () => {
      const input = root.querySelector<HTMLInputElement>("#query-input");
      if (!input || !input.value.trim()) return;
      api.evaluate(input.value.trim()).then(
        (payload) => {
          state = {
            ...state,
            query: { formula: payload.formula, result: payload.result },
            notice: null,
          };
          draw();
        },
        fail,
      );
    });
  }

  draw();
  return {
    state: () => state,
    loadModelDocument: (doc: unknown) => api.load(doc).then(show, fail),
    refresh: () => api.state().then(show, fail),
  };
}

export function installFilePicker(input: HTMLInputElement, app: LabApp): void {
  input.addEventListener("change", () => {
    const file = input.files?.[0];
    if (!file) return;
    file.text().then((text) => app.loadModelDocument(JSON.parse(text)));
  });
}

declare global {
  interface Window {
    eclogicLab?: LabApp;
  }
}

/** Browser entry point (tests construct the pieces themselves). */
export function boot(): void {
  const root = document.getElementById("lab-root");
  const picker = document.getElementById("model-file") as HTMLInputElement | null;
  const baseInput = document.getElementById("api-base") as HTMLInputElement | null;
  if (!root) return;
  const base = baseInput?.value || "http://127.0.0.1:8750";
  const api = new LabApi(base);
  const app = createLab(root, api);
  if (picker) installFilePicker(picker, app);
  app.refresh().catch(() => {
    /* no model loaded yet; the placeholder stays up */
  });
  window.eclogicLab = app;
}

if (typeof document !== "undefined" && document.getElementById("lab-root")) {
  boot();
}
