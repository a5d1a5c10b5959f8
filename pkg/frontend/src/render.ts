// Pure view: paint county fills, the legend, fire circles, and the
// tooltip from server frames. Nothing here mutates data or talks to the
// socket.

import { CLASS_COLORS, CLASS_ORDER, NEUTRAL_FILL, rampColor, rampPosition } from "./color.js";
import type { ChoroplethFrame, FiresFrame } from "./protocol.js";
import { PREDICTION_LAYERS } from "./protocol.js";
import type { Projector } from "./projection.js";

export const FIRE_RADIUS_SCALE = 0.6; // px per sqrt(acre)
export const FIRE_RADIUS_FLOOR = 2; // px

export function fireRadius(acres: number): number {
  return Math.max(FIRE_RADIUS_FLOOR, FIRE_RADIUS_SCALE * Math.sqrt(acres));
}

export function countyFill(frame: ChoroplethFrame, gid: string): string {
  if (frame.classes) {
    const letter = frame.classes[gid];
    if (letter === undefined) return NEUTRAL_FILL;
    return CLASS_COLORS[letter] ?? NEUTRAL_FILL;
  }
  const value = frame.values[gid];
  if (value === undefined || frame.min === null || frame.max === null) {
    return NEUTRAL_FILL;
  }
  return rampColor(rampPosition(value, frame.min, frame.max));
}

export function renderMap(
  countyEls: Map<string, SVGPathElement>,
  frame: ChoroplethFrame,
  missingGeometry?: (gid: string) => void,
): void {
  for (const [gid, el] of countyEls) {
    el.setAttribute("fill", countyFill(frame, gid));
  }
  for (const gid of Object.keys(frame.values)) {
    if (!countyEls.has(gid)) missingGeometry?.(gid);
  }
}

export function renderLegend(legendEl: HTMLElement, frame: ChoroplethFrame): void {
  legendEl.replaceChildren();
  if (PREDICTION_LAYERS.has(frame.layer) && frame.classes) {
    for (const letter of CLASS_ORDER) {
      const item = legendEl.ownerDocument.createElement("span");
      item.className = "legend-class";
      const swatch = legendEl.ownerDocument.createElement("i");
      swatch.style.background = CLASS_COLORS[letter]!;
      item.append(swatch, letter);
      legendEl.append(item);
    }
    return;
  }
  const lo = legendEl.ownerDocument.createElement("span");
  lo.className = "legend-min";
  lo.textContent = frame.min === null ? "-" : String(frame.min);
  const bar = legendEl.ownerDocument.createElement("span");
  bar.className = "legend-bar";
  const hi = legendEl.ownerDocument.createElement("span");
  hi.className = "legend-max";
  hi.textContent = frame.max === null ? "-" : String(frame.max);
  const unit = legendEl.ownerDocument.createElement("span");
  unit.className = "legend-unit";
  unit.textContent = frame.unit;
  legendEl.append(lo, bar, hi, unit);
}

export function renderFires(overlayEl: SVGGElement, frame: FiresFrame | null, proj: Projector): void {
  overlayEl.replaceChildren();
  if (frame === null) return;
  for (const event of frame.events) {
    const [x, y] = proj.toXY(event.lon, event.lat);
    const circle = overlayEl.ownerDocument.createElementNS("http://www.w3.org/2000/svg", "circle");
    circle.setAttribute("cx", x.toFixed(2));
    circle.setAttribute("cy", y.toFixed(2));
    circle.setAttribute("r", fireRadius(event.acres).toFixed(2));
    circle.setAttribute("class", "fire-circle");
    overlayEl.append(circle);
  }
}

export interface TooltipData {
  name: string;
  value: string | null;
}

export function tooltipFor(
  frame: ChoroplethFrame | null,
  gid: string,
  name: string,
): TooltipData {
  if (frame === null) return { name, value: null };
  const value = frame.values[gid];
  if (value === undefined) return { name, value: null };
  const letter = frame.classes?.[gid];
  const text = letter === undefined ? `${value} ${frame.unit}` : `${value} ${frame.unit} (${letter})`;
  return { name, value: text };
}

export function renderTooltip(el: HTMLElement, data: TooltipData | null, x = 0, y = 0): void {
  if (data === null) {
    el.style.display = "none";
    el.replaceChildren();
    return;
  }
  el.style.display = "block";
  el.style.left = `${x + 12}px`;
  el.style.top = `${y + 12}px`;
  const name = el.ownerDocument.createElement("b");
  name.textContent = data.name;
  el.replaceChildren(name);
  if (data.value !== null) {
    el.append(el.ownerDocument.createElement("br"), data.value);
  }
}
