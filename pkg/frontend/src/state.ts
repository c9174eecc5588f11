/**
 * Dashboard view state and its URL query-string form, so any view can be
 * shared as a link and restored exactly.
 */

import { FAMILIES } from "./data.js";

export type Correctness = "all" | "correct" | "incorrect";

export interface ViewState {
  /** Filter text as typed; empty string means no filter. */
  filter: string;
  /** Selected owner; empty string until the owners list loads. */
  owner: string;
  /** Selected model family or "all". */
  model: string;
  correctness: Correctness;
}

export const DEFAULT_STATE: ViewState = {
  filter: "",
  owner: "",
  model: "all",
  correctness: "all",
};

/** Serializes view state to a query string, omitting default values. */
export function stateToQuery(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.filter !== "") {
    params.set("f", state.filter);
  }
  if (state.owner !== "") {
    params.set("o", state.owner);
  }
  if (state.model !== "all") {
    params.set("m", state.model);
  }
  if (state.correctness !== "all") {
    params.set("c", state.correctness);
  }
  return params.toString();
}

/** Parses a query string back into view state. Unknown keys are ignored;
 * out-of-range model or correctness values fall back to "all". */
export function queryToState(query: string): ViewState {
  const params = new URLSearchParams(query);
  const model = params.get("m") ?? "all";
  const correctness = params.get("c") ?? "all";
  return {
    filter: params.get("f") ?? "",
    owner: params.get("o") ?? "",
    model: model === "all" || FAMILIES.includes(model) ? model : "all",
    correctness:
      correctness === "correct" || correctness === "incorrect"
        ? correctness
        : "all",
  };
}
