// Wire types for the firecast socket protocol. The server is the single
// source of truth; the client never computes map values locally.

export type LayerId =
  | "temperature"
  | "precipitation"
  | "wind"
  | "fuel"
  | "ml_prediction"
  | "realtime_prediction";

export const LAYERS: { id: LayerId; label: string }[] = [
  { id: "temperature", label: "Temperature" },
  { id: "precipitation", label: "Precipitation" },
  { id: "wind", label: "Wind" },
  { id: "fuel", label: "Fuel moisture" },
  { id: "ml_prediction", label: "Machine learning prediction" },
  { id: "realtime_prediction", label: "Real-time prediction" },
];

export const PREDICTION_LAYERS: ReadonlySet<string> = new Set([
  "ml_prediction",
  "realtime_prediction",
]);

export interface ChoroplethFrame {
  type: "choropleth";
  layer: LayerId;
  date: string | null;
  unit: string;
  min: number | null;
  max: number | null;
  values: Record<string, number>;
  classes?: Record<string, string>;
}

export interface FiresFrame {
  type: "fires";
  date: string;
  events: { lat: number; lon: number; acres: number }[];
}

export interface ModeFrame {
  type: "mode";
  controls_disabled: boolean;
}

export interface ErrorFrame {
  type: "error";
  code: string;
  message: string;
}

export type ServerFrame = ChoroplethFrame | FiresFrame | ModeFrame | ErrorFrame;

export type ClientMessage =
  | { op: "set_date"; date: string }
  | { op: "set_layer"; layer: LayerId }
  | { op: "set_fires"; enabled: boolean };

export function parseFrame(raw: string): ServerFrame | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null || !("type" in data)) {
    return null;
  }
  const type = (data as { type: unknown }).type;
  if (type === "choropleth" || type === "fires" || type === "mode" || type === "error") {
    return data as ServerFrame;
  }
  return null;
}
