/** Client-side session state: the latest server summary plus the
 * not-yet-committed staging (discard / protect pair selections, mode).
 *
 * The view never contracts anything itself. Commits post the staged
 * pairs and then re-read the session, so everything rendered afterwards
 * is what the server says; the only local math is evaluating the
 * current formula on row pairs to know which edges exist at all.
 */

import {
  ApiError,
  SessionApi,
  type ContractRequest,
  type CreateSessionDoc,
  type Pair,
  type RowJson,
  type SessionSummary,
  type StepRecord,
  type StrategyJson,
} from "./api.js";
import { holdsPair, parseSource, type FormulaText } from "./formulaText.js";

export interface CommitDiff {
  resultMode: string;
  before: string[];
  after: string[];
  added: string[];
  removed: string[];
  strategy: StrategyJson;
}

export interface UiError {
  code: string;
  message: string;
  details: Record<string, unknown>;
}

const pairKey = (p: Pair): string => JSON.stringify(p);

/** Drop edges implied by a path of two others; the collapsed graph the
 * figures use. Display-only. */
export function reduceEdges(edges: Pair[]): Pair[] {
  const present = new Set(edges.map(pairKey));
  const bySource = new Map<string, string[]>();
  for (const [a, b] of edges) {
    const outs = bySource.get(a);
    if (outs) outs.push(b);
    else bySource.set(a, [b]);
  }
  return edges.filter(([a, b]) =>
    !(bySource.get(a) ?? []).some((c) => c !== b && present.has(pairKey([c, b]))),
  );
}

export class SessionView {
  pendingCon: Pair[] = [];
  pendingProtect: Pair[] = [];
  mode: "prefix" | "meet" = "prefix";
  showTransitive = false;
  busy = false;
  lastError: UiError | null = null;
  lastCommit: CommitDiff | null = null;

  private formula: FormulaText | null = null;
  private finiteEdges: Set<string> | null = null;
  private edgeCache: Pair[] | null = null;

  private constructor(
    readonly api: SessionApi,
    private summaryState: SessionSummary,
  ) {
    this.rebuildSource();
  }

  static async create(api: SessionApi, doc: CreateSessionDoc): Promise<SessionView> {
    return new SessionView(api, await api.createSession(doc));
  }

  static async open(api: SessionApi, id: string): Promise<SessionView> {
    return new SessionView(api, await api.getSession(id));
  }

  // -- server state ---------------------------------------------------

  get summary(): SessionSummary {
    return this.summaryState;
  }

  get id(): string {
    return this.summaryState.id;
  }

  rows(): RowJson[] {
    return this.summaryState.dataset;
  }

  winnowKeys(): string[] {
    return this.summaryState.winnow.keys;
  }

  historySteps(): StepRecord[] {
    return this.summaryState.history;
  }

  stepCount(): number {
    return this.summaryState.step_count;
  }

  sourceText(): string | null {
    const s = this.summaryState.source;
    return s.kind === "formula" ? s.text : null;
  }

  private rebuildSource(): void {
    this.edgeCache = null;
    const s = this.summaryState.source;
    if (s.kind === "finite") {
      this.finiteEdges = new Set(s.edges.map(pairKey));
      this.formula = null;
    } else {
      this.finiteEdges = null;
      this.formula = parseSource(this.summaryState.schema, s.text);
    }
  }

  // -- displayed relation ----------------------------------------------

  private rowValues(key: string): Record<string, string> | null {
    const row = this.summaryState.dataset.find((r) => r.key === key);
    return row ? row.values : null;
  }

  /** Does the current (server-supplied) relation rank `a` above `b`? */
  holds(a: string, b: string): boolean {
    if (a === b) return false;
    if (this.finiteEdges) return this.finiteEdges.has(pairKey([a, b]));
    const left = this.rowValues(a);
    const right = this.rowValues(b);
    if (!left || !right || !this.formula) return false;
    return holdsPair(this.formula, this.summaryState.schema, left, right);
  }

  /** All holding ordered pairs over the dataset keys, in dataset order. */
  allEdges(): Pair[] {
    if (this.edgeCache) return this.edgeCache;
    if (this.finiteEdges) {
      const s = this.summaryState.source;
      this.edgeCache = s.kind === "finite" ? s.edges.slice() : [];
    } else {
      const keys = this.summaryState.dataset.map((r) => r.key);
      const out: Pair[] = [];
      for (const a of keys) {
        for (const b of keys) {
          if (a !== b && this.holds(a, b)) out.push([a, b]);
        }
      }
      this.edgeCache = out;
    }
    return this.edgeCache;
  }

  /** Edge list for the graph view: transitive edges collapsed unless
   * toggled on, capped at 200 rows. */
  displayEdges(): { edges: Pair[]; total: number; collapsed: boolean; capped: boolean } {
    const all = this.allEdges();
    const chosen = this.showTransitive ? all : reduceEdges(all);
    return {
      edges: chosen.slice(0, 200),
      total: all.length,
      collapsed: !this.showTransitive,
      capped: chosen.length > 200,
    };
  }

  // -- staging ----------------------------------------------------------

  staged(kind: "con" | "protect", pair: Pair): boolean {
    const list = kind === "con" ? this.pendingCon : this.pendingProtect;
    return list.some((p) => pairKey(p) === pairKey(pair));
  }

  private toggleIn(list: Pair[], pair: Pair): Pair[] {
    const key = pairKey(pair);
    const kept = list.filter((p) => pairKey(p) !== key);
    if (kept.length === list.length) kept.push(pair);
    return kept;
  }

  /** Stage a pair for discarding; re-staging toggles it off. Pairs that
   * do not hold in the displayed relation are refused. */
  toggleDiscard(pair: Pair): boolean {
    if (this.busy || !this.holds(pair[0], pair[1])) return false;
    this.pendingCon = this.toggleIn(this.pendingCon, pair);
    if (this.staged("con", pair) && this.staged("protect", pair)) {
      this.pendingProtect = this.toggleIn(this.pendingProtect, pair);
    }
    return true;
  }

  toggleProtect(pair: Pair): boolean {
    if (this.busy || !this.holds(pair[0], pair[1])) return false;
    this.pendingProtect = this.toggleIn(this.pendingProtect, pair);
    if (this.staged("protect", pair) && this.staged("con", pair)) {
      this.pendingCon = this.toggleIn(this.pendingCon, pair);
    }
    return true;
  }

  toggleTransitive(): void {
    this.showTransitive = !this.showTransitive;
  }

  setMode(mode: "prefix" | "meet"): void {
    this.mode = mode;
  }

  // -- server actions ----------------------------------------------------

  canCommit(): boolean {
    return this.pendingCon.length > 0 && !this.busy;
  }

  canUndo(): boolean {
    return this.summaryState.undoable && !this.busy;
  }

  /** Post the staged discards (and protects) and wait for the server;
   * on success the summary is re-read so the view shows server state
   * only. Returns false and keeps the staging when the server refuses. */
  async commit(): Promise<boolean> {
    if (!this.canCommit()) return false;
    const req: ContractRequest = { mode: this.mode, con: { edges: this.pendingCon } };
    if (this.pendingProtect.length) req.protect = { edges: this.pendingProtect };
    this.busy = true;
    try {
      const res = await this.api.contract(this.id, req);
      const before = res.winnow_before.keys;
      const after = res.winnow_after.keys;
      this.lastCommit = {
        resultMode: res.result.mode,
        before,
        after,
        added: after.filter((k) => !before.includes(k)),
        removed: before.filter((k) => !after.includes(k)),
        strategy: res.strategy,
      };
      this.pendingCon = [];
      this.pendingProtect = [];
      this.lastError = null;
      await this.refresh();
      return true;
    } catch (err) {
      this.lastError = toUiError(err);
      return false;
    } finally {
      this.busy = false;
    }
  }

  async undo(): Promise<boolean> {
    if (!this.canUndo()) return false;
    this.busy = true;
    try {
      this.summaryState = await this.api.undo(this.id);
      this.rebuildSource();
      this.lastCommit = null;
      this.lastError = null;
      return true;
    } catch (err) {
      this.lastError = toUiError(err);
      return false;
    } finally {
      this.busy = false;
    }
  }

  async refresh(): Promise<void> {
    this.summaryState = await this.api.getSession(this.id);
    this.rebuildSource();
  }
}

function toUiError(err: unknown): UiError {
  if (err instanceof ApiError) {
    return { code: err.code, message: err.message, details: err.details };
  }
  return { code: "NETWORK", message: String(err), details: {} };
}
