// Client-side view state. Every displayed value originates in a server
// frame; this store only records what arrived and what the user selected.

import type { ChoroplethFrame, ErrorFrame, FiresFrame, LayerId, ServerFrame } from "./protocol.js";

export const DATE_MIN = "1992-01-01";
export const DATE_MAX = "2015-12-31";

export interface UiState {
  date: string;
  layer: LayerId;
  firesEnabled: boolean;
  controlsDisabled: boolean;
  lastChoropleth: ChoroplethFrame | null;
  lastFires: FiresFrame | null;
  lastError: ErrorFrame | null;
}

export function initialState(): UiState {
  return {
    date: DATE_MIN,
    layer: "temperature",
    firesEnabled: true,
    controlsDisabled: false,
    lastChoropleth: null,
    lastFires: null,
    lastError: null,
  };
}

export function applyFrame(state: UiState, frame: ServerFrame): UiState {
  switch (frame.type) {
    case "choropleth":
      return { ...state, lastChoropleth: frame, lastError: null };
    case "fires":
      return { ...state, lastFires: frame, lastError: null };
    case "mode":
      return { ...state, controlsDisabled: frame.controls_disabled };
    case "error":
      return { ...state, lastError: frame };
  }
}

export function clampDate(date: string): string {
  if (date < DATE_MIN) return DATE_MIN;
  if (date > DATE_MAX) return DATE_MAX;
  return date;
}

export function selectDate(state: UiState, date: string): UiState {
  return { ...state, date: clampDate(date) };
}

export function selectLayer(state: UiState, layer: LayerId): UiState {
  return { ...state, layer };
}

export function setFiresEnabled(state: UiState, enabled: boolean): UiState {
  return { ...state, firesEnabled: enabled };
}

/** Days between the slider origin and a date, for range-input mapping. */
export function dateToOffset(date: string): number {
  const ms = Date.parse(date + "T00:00:00Z") - Date.parse(DATE_MIN + "T00:00:00Z");
  return Math.round(ms / 86_400_000);
}

export function offsetToDate(offset: number): string {
  const ms = Date.parse(DATE_MIN + "T00:00:00Z") + offset * 86_400_000;
  return new Date(ms).toISOString().slice(0, 10);
}

export const SLIDER_MAX_OFFSET = dateToOffset(DATE_MAX);
