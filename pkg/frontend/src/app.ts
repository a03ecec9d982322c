// Browser entry point: wires the form controls to the engine client and
// repaints the result containers from application state.

import { EngineClient } from "./api.js";
import {
  renderError,
  renderRecommendation,
  renderRulePanel,
  renderSelected,
  renderSuggestions,
  renderTopConditions,
  renderUnresolved,
} from "./render.js";
import {
  initialState,
  runAssessment,
  toggleSymptom,
  updateSuggestions,
  type AppState,
} from "./state.js";

const client = new EngineClient();
let state: AppState = initialState();

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

function repaint(): void {
  byId("suggestions").innerHTML = renderSuggestions(state.suggestions);
  byId("selected").innerHTML = renderSelected(state.form.symptoms);
  byId("error").innerHTML = renderError(state.error);
  byId("unresolved").innerHTML = state.report
    ? renderUnresolved(state.report.unresolved_phrases)
    : "";
  byId("top-conditions").innerHTML = state.report
    ? renderTopConditions(state.report)
    : "";
  byId("rule-panel").innerHTML = renderRulePanel(state.diagnoses);
  byId("recommendation").innerHTML = state.recommendation
    ? renderRecommendation(state.recommendation)
    : "";
  byId<HTMLButtonElement>("assess").disabled =
    state.busy || state.form.symptoms.length === 0;
}

function readForm(): void {
  state.form.id = byId<HTMLInputElement>("patient-id").value || "patient_web";
  state.form.age = Number(byId<HTMLInputElement>("age").value) || 0;
  state.form.sex = byId<HTMLSelectElement>("sex").value;
  state.form.history = byId<HTMLTextAreaElement>("history").value;
}

let searchTimer: ReturnType<typeof setTimeout> | undefined;

function wire(): void {
  const query = byId<HTMLInputElement>("symptom-query");
  query.addEventListener("input", () => {
    clearTimeout(searchTimer);
    searchTimer = setTimeout(async () => {
      state = await updateSuggestions(client, state, query.value);
      repaint();
    }, 150);
  });

  // suggestion and selected chips share one toggle handler
  for (const containerId of ["suggestions", "selected"]) {
    byId(containerId).addEventListener("click", (event) => {
      const target = event.target as HTMLElement;
      const symptom = target.dataset.symptom;
      if (!symptom) return;
      state = { ...state, form: toggleSymptom(state.form, symptom) };
      if (containerId === "suggestions") {
        query.value = "";
        state = { ...state, suggestions: [] };
      }
      repaint();
    });
  }

  byId<HTMLButtonElement>("assess").addEventListener("click", async () => {
    readForm();
    state = { ...state, busy: true };
    repaint();
    state = await runAssessment(client, state);
    repaint();
  });

  client
    .health()
    .then((h) => {
      byId("engine-status").textContent = `engine ${h.version} up`;
    })
    .catch(() => {
      byId("engine-status").textContent = "engine unreachable";
    });

  repaint();
}

document.addEventListener("DOMContentLoaded", wire);
