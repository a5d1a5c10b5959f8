"""Map backend: loads the joined table, fire events, trained model, and
latest prediction artifact, then answers per-session map queries over a
WebSocket and serves static assets plus county geometry over HTTP GET.

Protocol (one JSON text frame per message):
    client -> server  {"op":"set_date","date":"YYYY-MM-DD"}
                      {"op":"set_layer","layer":"<layer>"}
                      {"op":"set_fires","enabled":true|false}
    server -> client  {"type":"choropleth","layer":..,"date":..,"unit":..,
                       "min":..,"max":..,"values":{fips:v},"classes":{..}?}
                      {"type":"fires","date":..,"events":[{lat,lon,acres}]}
                      {"type":"mode","controls_disabled":bool}
                      {"type":"error","code":..,"message":..}

Session state (current date, layer, fire toggle) lives server-side per
connection; data tables are loaded once and shared read-only.
"""

from __future__ import annotations

import datetime as dt
import json
import logging
from dataclasses import dataclass
from pathlib import Path

from aiohttp import WSCloseCode, WSMsgType, web

from .dataset import JoinedDailyRecord, read_joined_csv
from .ingest import STUDY_RANGE, parse_fire_csv
from .ml import classify_fire_size, load_model
from .realtime import read_artifact

log = logging.getLogger(__name__)

HISTORICAL_LAYERS = {
    "temperature": ("tavg", "°C"),
    "precipitation": ("prcp", "mm"),
    "wind": ("wind", "m/s"),
    "fuel": ("fmc", "%"),
}
PREDICTION_LAYERS = {"ml_prediction", "realtime_prediction"}
ALL_LAYERS = set(HISTORICAL_LAYERS) | PREDICTION_LAYERS

WINDOW_DAYS = 21


def _error(code: str, message: str) -> dict:
    return {"type": "error", "code": code, "message": message}


def _mode(disabled: bool) -> dict:
    return {"type": "mode", "controls_disabled": disabled}


@dataclass
class ServiceConfig:
    counties_path: Path
    joined_path: Path
    fires_path: Path | None = None
    model_path: Path | None = None
    artifact_path: Path | None = None
    static_dir: Path | None = None
    port: int = 8080
    date_range: tuple[dt.date, dt.date] = STUDY_RANGE


class DataStore:
    """Immutable shared tables plus a reloadable prediction artifact."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        if not config.counties_path.is_file():
            raise FileNotFoundError(f"counties file not found: {config.counties_path}")
        if not config.joined_path.is_file():
            raise FileNotFoundError(f"joined table not found: {config.joined_path}")

        with open(config.joined_path, encoding="utf-8") as f:
            rows = read_joined_csv(f)
        self.rows_by_date: dict[dt.date, list[JoinedDailyRecord]] = {}
        self.rows_by_fips: dict[str, dict[dt.date, JoinedDailyRecord]] = {}
        for r in rows:
            self.rows_by_date.setdefault(r.date, []).append(r)
            self.rows_by_fips.setdefault(r.fips, {})[r.date] = r

        self.events_by_date: dict[dt.date, list[dict]] = {}
        if config.fires_path is not None and config.fires_path.is_file():
            with open(config.fires_path, encoding="utf-8") as f:
                events, _ = parse_fire_csv(f)
            for e in events:
                end = e.end_date or e.start_date
                day = e.start_date
                while day <= end:
                    self.events_by_date.setdefault(day, []).append(
                        {"lat": e.location.lat, "lon": e.location.lon, "acres": e.size_acres}
                    )
                    day += dt.timedelta(days=1)

        self.model = None
        if config.model_path is not None and config.model_path.is_file():
            self.model = load_model(config.model_path)

        self._artifact_sig: tuple | None = None
        self._artifact: dict | None = None

    def artifact(self) -> dict | None:
        """Current prediction artifact, re-read when the file changes."""
        path = self.config.artifact_path
        if path is None or not path.is_file():
            return None
        stat = path.stat()
        sig = (stat.st_mtime_ns, stat.st_size)
        if sig != self._artifact_sig:
            self._artifact = read_artifact(path)
            self._artifact_sig = sig
        return self._artifact

    def numeric_frame(self, layer: str, date: dt.date) -> dict:
        column, unit = HISTORICAL_LAYERS[layer]
        values = {r.fips: getattr(r, column) for r in self.rows_by_date.get(date, [])}
        return self._frame(layer, date.isoformat(), unit, values, classes=None)

    def ml_prediction_frame(self, date: dt.date) -> dict:
        """Predict the trailing 21-day window ending at ``date`` per county;
        counties without a complete window are omitted."""
        values: dict[str, float] = {}
        classes: dict[str, str] = {}
        for fips, by_date in self.rows_by_fips.items():
            window = [by_date.get(date - dt.timedelta(days=i)) for i in range(WINDOW_DAYS - 1, -1, -1)]
            if any(r is None for r in window):
                continue
            w = float(WINDOW_DAYS)
            tail = window[-1]
            x = [
                sum(r.wind for r in window) / w,
                sum(r.tmax for r in window) / w,
                sum(r.tmin for r in window) / w,
                sum(r.tavg for r in window) / w,
                sum(r.fmc for r in window) / w,
                sum(r.prcp for r in window) / w,
                float(date.month),
                tail.longitude,
                tail.latitude,
            ]
            pred = max(0.0, float(self.model.predict([x])[0]))
            values[fips] = pred
            classes[fips] = classify_fire_size(pred)
        return self._frame("ml_prediction", date.isoformat(), "acres", values, classes)

    def realtime_frame(self) -> dict:
        doc = self.artifact()
        if doc is None:
            raise FileNotFoundError("no prediction artifact available")
        values = {row["fips"]: row["predicted_sum_acres"] for row in doc["rows"]}
        classes = {row["fips"]: row["class"] for row in doc["rows"]}
        return self._frame("realtime_prediction", None, "acres", values, classes)

    def fires_frame(self, date: dt.date) -> dict:
        return {
            "type": "fires",
            "date": date.isoformat(),
            "events": self.events_by_date.get(date, []),
        }

    @staticmethod
    def _frame(layer: str, date_iso: str | None, unit: str, values: dict, classes: dict | None) -> dict:
        frame = {
            "type": "choropleth",
            "layer": layer,
            "date": date_iso,
            "unit": unit,
            "min": min(values.values()) if values else None,
            "max": max(values.values()) if values else None,
            "values": values,
        }
        if classes is not None:
            frame["classes"] = classes
        return frame


class Session:
    """Per-connection controller; handle() maps one client message to the
    frames pushed back on that connection."""

    def __init__(self, store: DataStore):
        self.store = store
        self.date = store.config.date_range[0]
        self.layer = "temperature"
        self.fires_enabled = True

    @property
    def controls_disabled(self) -> bool:
        return self.layer == "realtime_prediction"

    def handle_text(self, raw: str) -> list[dict]:
        try:
            msg = json.loads(raw)
        except json.JSONDecodeError:
            return [_error("bad_request", "message is not valid JSON")]
        if not isinstance(msg, dict) or "op" not in msg:
            return [_error("bad_request", "expected an object with an 'op' field")]
        op = msg["op"]
        if op == "set_date":
            return self.set_date(msg.get("date"))
        if op == "set_layer":
            return self.set_layer(msg.get("layer"))
        if op == "set_fires":
            return self.set_fires(msg.get("enabled"))
        return [_error("unknown_op", f"unknown op {op!r}")]

    def _layer_frame(self) -> dict:
        if self.layer == "realtime_prediction":
            try:
                return self.store.realtime_frame()
            except (FileNotFoundError, ValueError, KeyError) as e:
                return _error("no_artifact", str(e))
        if self.layer == "ml_prediction":
            if self.store.model is None:
                return _error("no_model", "no trained model loaded")
            return self.store.ml_prediction_frame(self.date)
        return self.store.numeric_frame(self.layer, self.date)

    def set_date(self, date_s) -> list[dict]:
        try:
            date = dt.date.fromisoformat(str(date_s))
        except ValueError:
            return [_error("bad_request", f"not a date: {date_s!r}")]
        lo, hi = self.store.config.date_range
        if not lo <= date <= hi:
            return [_error("date_out_of_range",
                           f"{date.isoformat()} outside {lo.isoformat()}..{hi.isoformat()}")]
        if self.controls_disabled:
            return [_error("controls_disabled", "time bar is disabled in realtime mode")]
        self.date = date
        frames = [self._layer_frame()]
        if self.fires_enabled:
            frames.append(self.store.fires_frame(date))
        return frames

    def set_layer(self, layer) -> list[dict]:
        if layer not in ALL_LAYERS:
            return [_error("unknown_layer", f"unknown layer {layer!r}")]
        self.layer = layer
        return [self._layer_frame(), _mode(self.controls_disabled)]

    def set_fires(self, enabled) -> list[dict]:
        if not isinstance(enabled, bool):
            return [_error("bad_request", "'enabled' must be a boolean")]
        self.fires_enabled = enabled
        if enabled and not self.controls_disabled:
            return [self.store.fires_frame(self.date)]
        return []


async def _ws_handler(request: web.Request) -> web.WebSocketResponse:
    ws = web.WebSocketResponse()
    await ws.prepare(request)
    request.app["websockets"].add(ws)
    session = Session(request.app["store"])
    try:
        async for msg in ws:
            if msg.type == WSMsgType.TEXT:
                for frame in session.handle_text(msg.data):
                    await ws.send_str(json.dumps(frame))
            elif msg.type == WSMsgType.ERROR:
                break
    finally:
        request.app["websockets"].discard(ws)
    return ws


async def _healthz(_request: web.Request) -> web.Response:
    return web.Response(text="ok")


def build_app(store: DataStore) -> web.Application:
    app = web.Application()
    app["store"] = store
    app["websockets"] = set()

    async def counties(_request):
        return web.FileResponse(store.config.counties_path,
                                headers={"Content-Type": "application/geo+json"})

    app.router.add_get("/healthz", _healthz)
    app.router.add_get("/counties.geojson", counties)
    app.router.add_get("/ws", _ws_handler)
    static = store.config.static_dir
    if static is not None and static.is_dir():
        async def index(_request):
            raise web.HTTPFound("/static/index.html")

        app.router.add_get("/", index)
        app.router.add_static("/static/", static)

    async def on_shutdown(app: web.Application):
        for ws in set(app["websockets"]):
            await ws.close(code=WSCloseCode.GOING_AWAY, message=b"shutdown")

    app.on_shutdown.append(on_shutdown)
    return app


def serve(config: ServiceConfig) -> None:
    """Run the service until interrupted; returns after graceful shutdown."""
    store = DataStore(config)
    app = build_app(store)
    log.info("serving on port %d", config.port)
    web.run_app(app, port=config.port, print=None)
