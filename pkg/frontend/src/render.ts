/** Render a SessionView to an HTML string.
 *
 * Pure: same view state, same markup. Server-derived facts (winnow
 * keys, history, source, step count) are also mirrored into data-*
 * attributes on the root element so tests can compare the rendered
 * state against the session export without scraping prose.
 */

import type { Pair, StepRecord } from "./api.js";
import type { SessionView } from "./sessionView.js";

export function esc(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

const attr = (value: string): string => `"${esc(value)}"`;
const pairAttr = (p: Pair): string => attr(JSON.stringify(p));
const showPair = (p: Pair): string => `${esc(p[0])} &succ; ${esc(p[1])}`;

function datasetTable(view: SessionView): string {
  const names = view.summary.schema.attributes.map((a) => a.name);
  const winnow = new Set(view.winnowKeys());
  const added = new Set(view.lastCommit?.added ?? []);
  const head = ["key", ...names].map((n) => `<th>${esc(n)}</th>`).join("");
  const body = view
    .rows()
    .map((r) => {
      const classes = ["row"];
      if (winnow.has(r.key)) classes.push("winnow");
      if (added.has(r.key)) classes.push("added");
      const cells = names.map((n) => `<td>${esc(r.values[n] ?? "")}</td>`).join("");
      return `<tr data-key=${attr(r.key)} class="${classes.join(" ")}"><td>${esc(r.key)}</td>${cells}</tr>`;
    })
    .join("");
  return `<section id="dataset"><h2>Rows</h2><table><thead><tr>${head}</tr></thead><tbody>${body}</tbody></table></section>`;
}

function edgeList(view: SessionView): string {
  const { edges, total, collapsed, capped } = view.displayEdges();
  const items = edges
    .map((p) => {
      const classes = ["edge"];
      if (view.staged("con", p)) classes.push("staged-con");
      if (view.staged("protect", p)) classes.push("staged-protect");
      return (
        `<li data-pair=${pairAttr(p)} class="${classes.join(" ")}">${showPair(p)}` +
        ` <button data-action="toggle-discard" data-pair=${pairAttr(p)}>discard</button>` +
        ` <button data-action="toggle-protect" data-pair=${pairAttr(p)}>protect</button></li>`
      );
    })
    .join("");
  const note = collapsed
    ? `${edges.length} of ${total} edges (transitive collapsed)`
    : `${edges.length} of ${total} edges`;
  const cap = capped ? " &middot; list capped at 200" : "";
  return (
    `<section id="edges"><h2>Preference edges</h2>` +
    `<p class="note">${note}${cap} <button data-action="toggle-transitive">` +
    `${collapsed ? "show transitive" : "hide transitive"}</button></p>` +
    `<ul>${items}</ul></section>`
  );
}

function pendingBadges(view: SessionView): string {
  const badge = (p: Pair, kind: string): string =>
    `<li class="pending-${kind}" data-pair=${pairAttr(p)}>${showPair(p)} <em>${kind.toUpperCase()}</em></li>`;
  const items = [
    ...view.pendingCon.map((p) => badge(p, "con")),
    ...view.pendingProtect.map((p) => badge(p, "protect")),
  ].join("");
  return `<section id="pending"><h2>Staged</h2><ul>${items || "<li class='empty'>nothing staged</li>"}</ul></section>`;
}

function controls(view: SessionView): string {
  const opt = (m: string): string =>
    `<option value="${m}"${view.mode === m ? " selected" : ""}>${m}</option>`;
  return (
    `<section id="controls">` +
    `<label>mode <select data-action="mode">${opt("prefix")}${opt("meet")}</select></label> ` +
    `<button data-action="commit"${view.canCommit() ? "" : " disabled"}>commit</button> ` +
    `<button data-action="undo"${view.canUndo() ? "" : " disabled"}>undo</button>` +
    `</section>`
  );
}

function commitPanel(view: SessionView): string {
  const c = view.lastCommit;
  if (!c) return "";
  const added = c.added.map((k) => `<b class="diff-added">${esc(k)}</b>`).join(", ");
  const removed = c.removed.map((k) => `<s class="diff-removed">${esc(k)}</s>`).join(", ");
  const delta = [added && `new: ${added}`, removed && `gone: ${removed}`].filter(Boolean).join("; ");
  return (
    `<section id="diff"><h2>Last change (${esc(c.resultMode)})</h2>` +
    `<p>winnow ${c.before.map(esc).join(", ")} &rarr; ${c.after.map(esc).join(", ")}` +
    `${delta ? ` (${delta})` : ""}</p>` +
    `<p class="note">query path: ${esc(c.strategy.path)}, rescanned ${c.strategy.candidates} candidate rows</p>` +
    `</section>`
  );
}

function errorPanel(view: SessionView): string {
  const e = view.lastError;
  if (!e) return "";
  const edges = Array.isArray(e.details["edges"])
    ? (e.details["edges"] as Pair[])
        .map((p) => `<li class="conflict-edge" data-pair=${pairAttr(p)}>${showPair(p)}</li>`)
        .join("")
    : "";
  const rest = edges ? "" : `<pre>${esc(JSON.stringify(e.details, null, 1))}</pre>`;
  return (
    `<section id="error" class="error" data-code=${attr(e.code)}>` +
    `<h2>${esc(e.code)}</h2><p>${esc(e.message)}</p>` +
    (edges ? `<ul>${edges}</ul>` : Object.keys(e.details).length ? rest : "") +
    `<button data-action="dismiss-error">dismiss</button></section>`
  );
}

function historyList(steps: StepRecord[]): string {
  const describe = (s: StepRecord): string => {
    if (s.type === "undo") return "undo";
    const con = s.con?.kind === "formula" ? s.con.text ?? "" : JSON.stringify(s.con?.edges ?? []);
    const protect = s.protect ? ` protecting ${JSON.stringify(s.protect.edges ?? s.protect.text)}` : "";
    return `contract (${s.result_mode ?? s.mode}) of ${con}${protect}`;
  };
  const items = steps
    .map((s) => `<li data-step-type=${attr(s.type)} data-at=${attr(s.at)}>${esc(describe(s))}</li>`)
    .join("");
  return `<section id="history"><h2>Steps</h2><ol>${items}</ol></section>`;
}

function sourcePanel(view: SessionView): string {
  const text = view.sourceText();
  if (text !== null) {
    return `<section id="source"><h2>Preference</h2><code id="source-text">${esc(text)}</code></section>`;
  }
  const s = view.summary.source;
  const n = s.kind === "finite" ? s.edges.length : 0;
  return `<section id="source"><h2>Preference</h2><p>finite relation, ${n} edges</p></section>`;
}

export function renderSession(view: SessionView): string {
  const s = view.summary;
  const rootAttrs = [
    `data-id=${attr(s.id)}`,
    `data-kind=${attr(s.kind)}`,
    `data-step-count="${s.step_count}"`,
    `data-undoable="${s.undoable}"`,
    `data-busy="${view.busy}"`,
    `data-mode=${attr(view.mode)}`,
    `data-winnow=${attr(JSON.stringify(view.winnowKeys()))}`,
    s.source.kind === "formula"
      ? `data-source-text=${attr(s.source.text)}`
      : `data-source-edges=${attr(JSON.stringify(s.source.edges))}`,
  ].join(" ");
  return (
    `<div id="session" ${rootAttrs}>` +
    `<header><h1>session ${esc(s.id)}</h1>` +
    `<p class="note">${esc(s.kind)} preference &middot; ${s.step_count} steps &middot; updated ${esc(s.updated)}</p></header>` +
    sourcePanel(view) +
    datasetTable(view) +
    edgeList(view) +
    pendingBadges(view) +
    controls(view) +
    errorPanel(view) +
    commitPanel(view) +
    historyList(s.history) +
    `</div>`
  );
}
