/** Mirror of the server's session observation. The lab never re-computes
 * semantics: everything rendered comes verbatim from the last response. */

export type Row = Record<string, string>;

export interface Observation {
  status?: "ok" | "refused" | "error";
  message?: string;
  action?: { type: string; assignment?: Row; formula?: string };
  result?: boolean;
  formula?: string;
  mode: string;
  variables: string[];
  ranges: Record<string, string[]>;
  observables: string[];
  team: Row[];
  actual: Row;
  known_values: Row;
  history_depth: number;
  graph: [string, string][];
}

export interface EvalResponse {
  status: "ok";
  formula: string;
  result: boolean;
}

export interface LabState {
  observation: Observation | null;
  /** variables touched by the most recent intervention, for badging */
  intervened: string[];
  /** last query outcome, displayed byte-for-byte as the server sent it */
  query: { formula: string; result: boolean } | null;
  notice: string | null;
}

export const initialState: LabState = {
  observation: null,
  intervened: [],
  query: null,
  notice: null,
};

export function applyObservation(state: LabState, obs: Observation): LabState {
  // a /state or /load response carries no status and counts as accepted
  const accepted = obs.status === "ok" || obs.status === undefined;
  const intervened =
    accepted && obs.action?.type === "intervene"
      ? Object.keys(obs.action.assignment ?? {})
      : accepted
        ? []
        : state.intervened;
  return {
    observation: accepted ? obs : state.observation,
    intervened,
    // a stale truth badge would misreport the new state; queries re-ask
    query: accepted ? null : state.query,
    notice: accepted ? null : obs.message ?? null,
  };
}
