/** Browser entry point: wire one SessionView to the page.
 *
 * `?session=<id>` opens an existing session; without it a demo car
 * session is created (or reopened) so the page works against a fresh
 * server. All clicks funnel through data-action attributes and every
 * handler ends with a full re-render from the view state.
 */

import { ApiError, SessionApi, type CreateSessionDoc, type Pair } from "./api.js";
import { renderSession } from "./render.js";
import { SessionView } from "./sessionView.js";

const DEMO_ID = "demo-cars";

const DEMO: CreateSessionDoc = {
  id: DEMO_ID,
  schema: {
    attributes: [
      { name: "make", domain: "C" },
      { name: "year", domain: "Q" },
      { name: "price", domain: "Q" },
    ],
  },
  dataset: [
    { key: "t1", values: { make: "VW", year: "2007", price: "15000" } },
    { key: "t2", values: { make: "VW", year: "2007", price: "20000" } },
    { key: "t3", values: { make: "Kia", year: "2006", price: "15000" } },
    { key: "t4", values: { make: "Kia", year: "2007", price: "12000" } },
  ],
  source: {
    kind: "formula",
    text: "L.year > R.year or (L.year = R.year and L.price < R.price)",
  },
};

async function openView(api: SessionApi): Promise<SessionView> {
  const wanted = new URLSearchParams(location.search).get("session");
  if (wanted) return SessionView.open(api, wanted);
  try {
    return await SessionView.create(api, DEMO);
  } catch (err) {
    if (err instanceof ApiError && err.code === "SESSION_EXISTS") {
      return SessionView.open(api, DEMO_ID);
    }
    throw err;
  }
}

function pairOf(el: Element): Pair | null {
  const raw = el.getAttribute("data-pair");
  if (!raw) return null;
  const p = JSON.parse(raw) as unknown;
  return Array.isArray(p) && p.length === 2 ? (p as Pair) : null;
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const api = new SessionApi(location.origin);
  const view = await openView(api);
  const rerender = (): void => {
    root.innerHTML = renderSession(view);
  };

  root.addEventListener("click", (ev) => {
    const el = (ev.target as Element | null)?.closest("[data-action]");
    if (!el) return;
    const action = el.getAttribute("data-action");
    const pair = pairOf(el);
    const done = (): void => rerender();
    switch (action) {
      case "toggle-discard":
        if (pair) view.toggleDiscard(pair);
        return done();
      case "toggle-protect":
        if (pair) view.toggleProtect(pair);
        return done();
      case "toggle-transitive":
        view.toggleTransitive();
        return done();
      case "dismiss-error":
        view.lastError = null;
        return done();
      case "commit":
        rerender(); // busy state
        void view.commit().then(done);
        return;
      case "undo":
        rerender();
        void view.undo().then(done);
        return;
    }
  });

  root.addEventListener("change", (ev) => {
    const el = ev.target as HTMLSelectElement | null;
    if (el?.getAttribute("data-action") === "mode") {
      view.setMode(el.value === "meet" ? "meet" : "prefix");
      rerender();
    }
  });

  rerender();
}

if (typeof document !== "undefined") {
  boot().catch((err) => {
    const root = document.getElementById("app");
    if (root) root.textContent = `failed to start: ${String(err)}`;
  });
}
