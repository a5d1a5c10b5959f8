import { App, AppElements, buildControls } from "../src/app.js";
import type { CountyShape } from "../src/projection.js";
import type { ChoroplethFrame } from "../src/protocol.js";
import { StubServer } from "./stub.js";

export function squareShape(gid: string, lat0: number, lon0: number, name?: string): CountyShape {
  return {
    gid,
    name: name ?? gid,
    rings: [[
      [lon0, lat0], [lon0 + 1, lat0], [lon0 + 1, lat0 + 1], [lon0, lat0 + 1], [lon0, lat0],
    ]],
  };
}

export const SHAPES: CountyShape[] = [
  squareShape("00001", 30, -100, "Alder"),
  squareShape("00002", 31, -100, "Basalt"),
];

export interface Harness {
  app: App;
  els: AppElements;
  server: StubServer;
}

export function makeApp(shapes: CountyShape[] = SHAPES): Harness {
  const root = document.createElement("div");
  document.body.append(root);
  const els = buildControls(root);
  const server = new StubServer();
  const app = new App(els, shapes, server.factory);
  return { app, els, server };
}

export function choropleth(partial: Partial<ChoroplethFrame> = {}): ChoroplethFrame {
  return {
    type: "choropleth",
    layer: "temperature",
    date: "2000-06-01",
    unit: "°C",
    min: 5.0,
    max: 25.0,
    values: { "00001": 5.0, "00002": 25.0 },
    ...partial,
  };
}
