// HTML string renderers. Every dynamic value goes through escapeHtml; the
// app shell assigns the results to innerHTML of fixed containers.

import type {
  Recommendation,
  ReportDocument,
  RuleDiagnosis,
  SymptomSuggestion,
} from "./types.js";

const ESCAPES: Record<string, string> = {
  "&": "&amp;",
  "<": "&lt;",
  ">": "&gt;",
  '"': "&quot;",
  "'": "&#39;",
};

export function escapeHtml(text: string): string {
  return text.replace(/[&<>"']/g, (ch) => ESCAPES[ch]);
}

/** Vocabulary names use underscores; show them with spaces. */
export function displayName(name: string): string {
  return name.replace(/_/g, " ");
}

export function formatPercent(probability: number): string {
  return `${(100 * probability).toFixed(1)}%`;
}

export function renderSuggestions(suggestions: SymptomSuggestion[]): string {
  if (!suggestions.length) return "";
  const chips = suggestions
    .map(
      (s) =>
        `<button class="chip" data-symptom="${escapeHtml(s.symptom)}">` +
        `${escapeHtml(displayName(s.symptom))}</button>`,
    )
    .join("");
  return `<div class="suggestions">${chips}</div>`;
}

export function renderSelected(symptoms: string[]): string {
  if (!symptoms.length) {
    return `<p class="empty">no symptoms selected</p>`;
  }
  const chips = symptoms
    .map(
      (s) =>
        `<button class="chip chip-selected" data-symptom="${escapeHtml(s)}">` +
        `${escapeHtml(displayName(s))} &times;</button>`,
    )
    .join("");
  return `<div class="selected">${chips}</div>`;
}

export function renderTopConditions(report: ReportDocument): string {
  if (!report.ml_top3.length) {
    return `<p class="empty">no candidate conditions</p>`;
  }
  const widest = Math.max(...report.ml_top3.map((e) => e.probability));
  const rows = report.ml_top3
    .map(({ disease, probability }) => {
      const width = widest > 0 ? (100 * probability) / widest : 0;
      return (
        `<tr class="prob-row">` +
        `<td class="disease">${escapeHtml(displayName(disease))}</td>` +
        `<td class="prob">${formatPercent(probability)}</td>` +
        `<td class="bar"><div class="bar-fill" style="width:${width.toFixed(1)}%"></div></td>` +
        `</tr>`
      );
    })
    .join("");
  const note = report.candidate_fallback
    ? `<p class="note">no disease cleared the symptom-overlap filter; ` +
      `ranking over the full catalog</p>`
    : "";
  return `${note}<table class="top-conditions"><tbody>${rows}</tbody></table>`;
}

export function renderUnresolved(phrases: string[]): string {
  if (!phrases.length) return "";
  const items = phrases
    .map((p) => `<li class="unresolved-phrase">${escapeHtml(p)}</li>`)
    .join("");
  return (
    `<div class="warning">these phrases were not recognized, ` +
    `please re-enter them:<ul>${items}</ul></div>`
  );
}

function renderSupportLine(fact: [string, string, unknown]): string {
  const [individual, predicate, value] = fact;
  const text =
    predicate === "@type"
      ? `${value}(${individual})`
      : `${predicate}(${individual}, ${String(value)})`;
  return `<li class="support-fact">${escapeHtml(text)}</li>`;
}

export function renderRulePanel(diagnoses: RuleDiagnosis[]): string {
  if (!diagnoses.length) return "";
  const panels = diagnoses
    .map((d) => {
      const support = d.support.map(renderSupportLine).join("");
      return (
        `<section class="rule-panel">` +
        `<h3>${escapeHtml(displayName(d.predicate))} = ${escapeHtml(String(d.value))}` +
        ` <span class="rule-id">${escapeHtml(d.rule_id)}</span></h3>` +
        `<ul class="support">${support}</ul>` +
        `<details><summary>full derivation</summary>` +
        `<pre class="explanation">${escapeHtml(d.explanation)}</pre></details>` +
        `</section>`
      );
    })
    .join("");
  return `<div class="rule-panels">${panels}</div>`;
}

export function renderRecommendation(rec: Recommendation): string {
  const badge =
    rec.source === "fallback"
      ? `<span class="badge badge-fallback">offline fallback</span>`
      : `<span class="badge badge-llm">assistant</span>`;
  return (
    `<div class="recommendation">` +
    `<h3>recommendation ${badge}</h3>` +
    `<pre class="recommendation-text">${escapeHtml(rec.text)}</pre>` +
    `</div>`
  );
}

export function renderError(message: string | null): string {
  if (!message) return "";
  return `<div class="error">${escapeHtml(message)}</div>`;
}
