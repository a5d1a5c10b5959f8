// Color scales: one sequential ramp for numeric layers and the ordered
// A-G severity palette for prediction layers.

export const NEUTRAL_FILL = "#d9d9d9";

// Light straw to dark red, interpolated in RGB.
const RAMP_LO: [number, number, number] = [255, 247, 188];
const RAMP_HI: [number, number, number] = [153, 10, 13];

export function rampColor(t: number): string {
  const k = Math.min(1, Math.max(0, t));
  const c = RAMP_LO.map((lo, i) => Math.round(lo + (RAMP_HI[i]! - lo) * k));
  return `rgb(${c[0]},${c[1]},${c[2]})`;
}

/** Position of a value on the [min, max] ramp; degenerate scales sit at
 * the ramp midpoint. */
export function rampPosition(value: number, min: number, max: number): number {
  if (max <= min) return 0.5;
  return (value - min) / (max - min);
}

// Severity letters in published order, green (mild) through purple (extreme).
export const CLASS_COLORS: Record<string, string> = {
  A: "#2ca25f",
  B: "#41b6c4",
  C: "#fed976",
  D: "#f768a1",
  E: "#fd8d3c",
  F: "#e31a1c",
  G: "#6a3d9a",
};

export const CLASS_ORDER = ["A", "B", "C", "D", "E", "F", "G"];
