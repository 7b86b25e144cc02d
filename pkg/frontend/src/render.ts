import type { LabState, Observation } from "./state.js";

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function teamTable(obs: Observation): string {
  const head = obs.variables
    .map((v) => {
      const badge = obs.observables.includes(v) ? ' <span class="badge obs">obs</span>' : "";
      return `<th>${esc(v)}${badge}</th>`;
    })
    .join("");
  const rows = obs.team
    .map((row) => {
      const isActual = obs.variables.every((v) => row[v] === obs.actual[v]);
      const cells = obs.variables.map((v) => `<td>${esc(row[v] ?? "?")}</td>`).join("");
      return `<tr class="team-row${isActual ? " actual" : ""}">${cells}<td>${
        isActual ? "actual" : ""
      }</td></tr>`;
    })
    .join("");
  return `<table id="team-table"><thead><tr>${head}<th></th></tr></thead><tbody>${rows}</tbody></table>`;
}

function knownValues(obs: Observation): string {
  const items = obs.variables
    .filter((v) => v in obs.known_values)
    .map(
      (v) =>
        `<li data-var="${esc(v)}" data-value="${esc(obs.known_values[v] ?? "")}">` +
        `${esc(v)} = ${esc(obs.known_values[v] ?? "")}</li>`,
    )
    .join("");
  return `<ul id="known-values">${items || "<li class='empty'>nothing is known</li>"}</ul>`;
}

function pickers(state: LabState, obs: Observation): string {
  const rows = obs.variables
    .map((v) => {
      const options = ['<option value="">-</option>']
        .concat(
          (obs.ranges[v] ?? []).map((x) => `<option value="${esc(x)}">${esc(x)}</option>`),
        )
        .join("");
      const badge = state.intervened.includes(v)
        ? ' <span class="badge intervened">intervened</span>'
        : "";
      return (
        `<label class="picker">${esc(v)}${badge} ` +
        `<select data-picker="${esc(v)}">${options}</select></label>`
      );
    })
    .join("");
  return `<div id="pickers">${rows}</div>`;
}

function graphList(obs: Observation): string {
  const edges = obs.graph
    .map(([src, dst]) => `<li>${esc(src)} &rarr; ${esc(dst)}</li>`)
    .join("");
  return `<ul id="graph-edges">${edges || "<li class='empty'>no edges</li>"}</ul>`;
}

/** Pure render: the whole panel is a function of the lab state alone. */
export function render(state: LabState): string {
  const obs = state.observation;
  const notice = state.notice
    ? `<p id="notice" class="notice">${esc(state.notice)}</p>`
    : `<p id="notice" class="notice empty"></p>`;
  if (!obs) {
    return `<section id="lab">${notice}<p id="placeholder">Load a model to begin.</p></section>`;
  }
  const query = state.query
    ? `<p id="query-result">` +
      `<code>${esc(state.query.formula)}</code> is ` +
      `<span id="truth-badge" class="badge ${state.query.result}">${String(
        state.query.result,
      )}</span></p>`
    : `<p id="query-result" class="empty"></p>`;
  return `<section id="lab">
  ${notice}
  <div class="meta">
    <span id="mode">mode: ${esc(obs.mode)}</span>
    <span id="history-depth">history: ${obs.history_depth}</span>
    <span id="observables">observables: ${
      obs.observables.length ? obs.observables.map(esc).join(", ") : "(none)"
    }</span>
  </div>
  <h2>Intervene</h2>
  ${pickers(state, obs)}
  <div class="controls">
    <button id="intervene">intervene</button>
    <label><input type="checkbox" id="allow-empty"> allow empty assignment</label>
    <button id="undo">undo</button>
    <button id="reset">reset</button>
  </div>
  <h2>Announce</h2>
  <div class="controls">
    <input id="announce-input" placeholder="formula true at the actual world">
    <button id="announce">announce</button>
  </div>
  <h2>Query</h2>
  <div class="controls">
    <input id="query-input" placeholder="e.g. K B=0">
    <button id="query">evaluate</button>
  </div>
  ${query}
  <h2>Team (${obs.team.length})</h2>
  ${teamTable(obs)}
  <h2>Known values</h2>
  ${knownValues(obs)}
  <h2>Causal graph</h2>
  ${graphList(obs)}
</section>`;
}
