// Bootstrap: build the control panel and SVG map, connect the socket,
// and keep the DOM in sync with server frames.

import { MapClient, SocketFactory, defaultSocketFactory } from "./client.js";
import { LAYERS, type LayerId, type ServerFrame } from "./protocol.js";
import {
  CountyShape,
  GeoJsonFeatureCollection,
  Projector,
  fitProjector,
  parseCounties,
  shapePath,
} from "./projection.js";
import { renderFires, renderLegend, renderMap, renderTooltip, tooltipFor } from "./render.js";
import { DebouncedSlider } from "./slider.js";
import {
  SLIDER_MAX_OFFSET,
  UiState,
  applyFrame,
  dateToOffset,
  initialState,
  offsetToDate,
  selectDate,
  selectLayer,
  setFiresEnabled,
} from "./state.js";

export interface AppElements {
  map: SVGSVGElement;
  legend: HTMLElement;
  tooltip: HTMLElement;
  slider: HTMLInputElement;
  dateLabel: HTMLElement;
  firesCheckbox: HTMLInputElement;
  layerRadios: Map<LayerId, HTMLInputElement>;
  status: HTMLElement;
}

export class App {
  state: UiState = initialState();
  private countyEls = new Map<string, SVGPathElement>();
  private countyNames = new Map<string, string>();
  private firesLayer!: SVGGElement;
  private proj!: Projector;
  private client: MapClient;
  private slider: DebouncedSlider;

  constructor(
    private readonly els: AppElements,
    shapes: CountyShape[],
    socketFactory: SocketFactory = defaultSocketFactory,
  ) {
    this.buildMap(shapes);
    this.slider = new DebouncedSlider((date) => {
      this.state = selectDate(this.state, date);
      this.client.setDate(this.state.date);
    });
    this.client = new MapClient(socketFactory, (frame) => this.onFrame(frame), () => {
      this.client.setDate(this.state.date);
    });
    this.wireControls();
    this.syncControls();
  }

  private buildMap(shapes: CountyShape[]): void {
    const doc = this.els.map.ownerDocument;
    this.proj = fitProjector(shapes);
    this.els.map.setAttribute("viewBox", `0 0 ${this.proj.width} ${this.proj.height}`);
    const counties = doc.createElementNS("http://www.w3.org/2000/svg", "g");
    counties.setAttribute("class", "counties");
    for (const shape of shapes) {
      const path = doc.createElementNS("http://www.w3.org/2000/svg", "path");
      path.setAttribute("d", shapePath(shape, this.proj));
      path.setAttribute("class", "county");
      path.dataset["gid"] = shape.gid;
      counties.append(path);
      this.countyEls.set(shape.gid, path);
      this.countyNames.set(shape.gid, shape.name);
    }
    this.firesLayer = doc.createElementNS("http://www.w3.org/2000/svg", "g");
    this.firesLayer.setAttribute("class", "fires");
    this.els.map.append(counties, this.firesLayer);
  }

  private wireControls(): void {
    this.els.slider.min = "0";
    this.els.slider.max = String(SLIDER_MAX_OFFSET);
    this.els.slider.addEventListener("input", () => {
      if (this.state.controlsDisabled) return;
      const date = offsetToDate(Number(this.els.slider.value));
      this.els.dateLabel.textContent = date;
      this.slider.input(date);
    });
    this.els.slider.addEventListener("change", () => {
      if (this.state.controlsDisabled) return;
      this.slider.flush();
    });
    this.els.firesCheckbox.addEventListener("change", () => {
      if (this.state.controlsDisabled) return;
      this.state = setFiresEnabled(this.state, this.els.firesCheckbox.checked);
      this.client.setFires(this.state.firesEnabled);
      if (!this.state.firesEnabled) {
        // removing the overlay needs no round trip
        this.state = { ...this.state, lastFires: null };
        renderFires(this.firesLayer, null, this.proj);
      }
    });
    for (const [layer, radio] of this.els.layerRadios) {
      radio.addEventListener("change", () => {
        if (!radio.checked) return;
        this.state = selectLayer(this.state, layer);
        this.client.setLayer(layer);
      });
    }
  }

  onFrame(frame: ServerFrame): void {
    this.state = applyFrame(this.state, frame);
    switch (frame.type) {
      case "choropleth":
        renderMap(this.countyEls, frame, (gid) => console.warn(`no geometry for ${gid}`));
        renderLegend(this.els.legend, frame);
        break;
      case "fires":
        if (this.state.firesEnabled) {
          renderFires(this.firesLayer, frame, this.proj);
        }
        break;
      case "mode":
        this.syncControls();
        break;
      case "error":
        this.els.status.textContent = `${frame.code}: ${frame.message}`;
        break;
    }
    if (frame.type !== "error") {
      this.els.status.textContent = "";
    }
  }

  private syncControls(): void {
    const disabled = this.state.controlsDisabled;
    this.els.slider.disabled = disabled;
    this.els.firesCheckbox.disabled = disabled;
    this.els.slider.closest(".time-bar")?.classList.toggle("dimmed", disabled);
    if (disabled) {
      this.slider.cancel();
      renderFires(this.firesLayer, null, this.proj);
    }
    this.els.slider.value = String(dateToOffset(this.state.date));
    this.els.dateLabel.textContent = this.state.date;
  }

  hoverCounty(gid: string | null, x = 0, y = 0): void {
    if (gid === null) {
      renderTooltip(this.els.tooltip, null);
      return;
    }
    const name = this.countyNames.get(gid) ?? gid;
    renderTooltip(this.els.tooltip, tooltipFor(this.state.lastChoropleth, gid, name), x, y);
  }
}

export function buildControls(root: HTMLElement): AppElements {
  const doc = root.ownerDocument;
  root.innerHTML = `
    <div class="layout">
      <div class="map-pane">
        <svg id="map" xmlns="http://www.w3.org/2000/svg"></svg>
        <div id="tooltip" class="tooltip" style="display:none"></div>
        <div class="time-bar">
          <input id="slider" type="range" value="0" step="1">
          <span id="date-label"></span>
        </div>
        <div id="legend" class="legend"></div>
        <div id="status" class="status"></div>
      </div>
      <div class="controls">
        <label class="fires-toggle">
          <input id="fires" type="checkbox" checked> Display wildfires
        </label>
        <fieldset id="layers"><legend>Layers</legend></fieldset>
      </div>
    </div>`;
  const layersEl = root.querySelector("#layers") as HTMLElement;
  const layerRadios = new Map<LayerId, HTMLInputElement>();
  for (const { id, label } of LAYERS) {
    const wrap = doc.createElement("label");
    const radio = doc.createElement("input");
    radio.type = "radio";
    radio.name = "layer";
    radio.value = id;
    radio.checked = id === "temperature";
    wrap.append(radio, ` ${label}`);
    layersEl.append(wrap);
    layerRadios.set(id, radio);
  }
  return {
    map: root.querySelector("#map") as unknown as SVGSVGElement,
    legend: root.querySelector("#legend") as HTMLElement,
    tooltip: root.querySelector("#tooltip") as HTMLElement,
    slider: root.querySelector("#slider") as HTMLInputElement,
    dateLabel: root.querySelector("#date-label") as HTMLElement,
    firesCheckbox: root.querySelector("#fires") as HTMLInputElement,
    layerRadios,
    status: root.querySelector("#status") as HTMLElement,
  };
}

export async function start(root: HTMLElement): Promise<App> {
  const response = await fetch("/counties.geojson");
  const doc = (await response.json()) as GeoJsonFeatureCollection;
  const shapes = parseCounties(doc);
  const els = buildControls(root);
  const app = new App(els, shapes);
  els.map.addEventListener("mousemove", (event) => {
    const target = event.target as Element | null;
    const gid = target instanceof SVGPathElement ? target.dataset["gid"] ?? null : null;
    app.hoverCounty(gid, (event as MouseEvent).pageX, (event as MouseEvent).pageY);
  });
  els.map.addEventListener("mouseleave", () => app.hoverCounty(null));
  return app;
}
