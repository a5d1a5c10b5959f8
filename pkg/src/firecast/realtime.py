"""Build 21-day prediction windows from pluggable weather/geocoding
providers and emit the daily prediction artifact.

Providers are small duck-typed objects; the fixture implementations replay
recorded JSON so the whole module runs deterministically with no network.
The window is 14 strictly-past days of history plus 7 forecast days
starting at the anchor date itself.
"""

from __future__ import annotations

import concurrent.futures
import csv
import datetime as dt
import json
import math
import os
import time
import urllib.parse
import urllib.request
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import IO, Callable, Iterable

import numpy as np

from .dataset import FEATURE_NAMES, JoinedDailyRecord
from .geo import FipsUnit, GeoPoint, locate_fips
from .ml import classify_fire_size, load_model, model_fingerprint

HISTORY_DAYS = 14
FORECAST_DAYS = 7
WINDOW_DAYS = HISTORY_DAYS + FORECAST_DAYS

ARTIFACT_SCHEMA_VERSION = 1


class ProviderUnavailable(RuntimeError):
    """Provider could not answer after retries."""


class UnknownCity(ValueError):
    def __init__(self, city: str):
        self.city = city
        super().__init__(f"unknown city: {city!r}")


class IncompleteWindow(ValueError):
    def __init__(self, missing: list[dt.date]):
        self.missing = missing
        days = ", ".join(d.isoformat() for d in missing)
        super().__init__(f"window missing {len(missing)} day(s): {days}")


class AllLocationsFailed(RuntimeError):
    """Every requested location was skipped."""


class ObservationKind(str, Enum):
    HISTORY = "history"
    FORECAST = "forecast"


@dataclass(frozen=True)
class WeatherObservation:
    date: dt.date
    tmax: float
    tmin: float
    tavg: float
    prcp: float
    wind_speed: float
    kind: ObservationKind

    def __post_init__(self):
        for v in (self.tmax, self.tmin, self.tavg):
            if not math.isfinite(v):
                raise ValueError(f"non-finite temperature: {v!r}")
        if not (math.isfinite(self.prcp) and self.prcp >= 0):
            raise ValueError(f"invalid precipitation: {self.prcp!r}")
        if not (math.isfinite(self.wind_speed) and self.wind_speed >= 0):
            raise ValueError(f"invalid wind speed: {self.wind_speed!r}")


@dataclass(frozen=True)
class PredictionLocation:
    city: str
    point: GeoPoint
    fips: str
    latest_fmc: float


def _point_key(point: GeoPoint) -> str:
    return f"{point.lat:.4f},{point.lon:.4f}"


class FixtureWeatherProvider:
    """Replays observations recorded in <dir>/weather.json, keyed by
    '<lat>,<lon>' at 4 decimals and ISO date."""

    def __init__(self, fixtures_dir: str | Path):
        with open(Path(fixtures_dir) / "weather.json", encoding="utf-8") as f:
            self._data = json.load(f)

    def observe(self, point: GeoPoint, date: dt.date) -> dict | None:
        return self._data.get(_point_key(point), {}).get(date.isoformat())


class FixtureGeocodeProvider:
    """Replays city lookups recorded in <dir>/geocode.json."""

    def __init__(self, fixtures_dir: str | Path):
        with open(Path(fixtures_dir) / "geocode.json", encoding="utf-8") as f:
            self._data = json.load(f)

    def resolve(self, city: str) -> tuple[GeoPoint, str | None]:
        entry = self._data.get(city)
        if entry is None:
            raise UnknownCity(city)
        return GeoPoint(lat=entry["lat"], lon=entry["lon"]), entry.get("fips")


class HttpWeatherProvider:
    """Minimal JSON-over-HTTP weather source.

    Reads WEATHER_API_BASE_URL and WEATHER_API_KEY from the environment and
    issues GET <base>?lat=..&lon=..&date=..&key=.., expecting a JSON object
    with tmax/tmin/tavg/prcp/wind_speed or null for a missing day.
    """

    def __init__(self, base_url: str | None = None, api_key: str | None = None, timeout: float = 10.0):
        self.base_url = base_url or os.environ.get("WEATHER_API_BASE_URL")
        self.api_key = api_key or os.environ.get("WEATHER_API_KEY", "")
        self.timeout = timeout
        if not self.base_url:
            raise ProviderUnavailable("WEATHER_API_BASE_URL is not set")

    def observe(self, point: GeoPoint, date: dt.date) -> dict | None:
        query = urllib.parse.urlencode({
            "lat": point.lat, "lon": point.lon, "date": date.isoformat(), "key": self.api_key,
        })
        try:
            with urllib.request.urlopen(f"{self.base_url}?{query}", timeout=self.timeout) as resp:
                return json.loads(resp.read().decode("utf-8"))
        except (OSError, ValueError) as e:
            raise ProviderUnavailable(str(e)) from None


def fetch_window(
    provider,
    point: GeoPoint,
    anchor_date: dt.date,
    retries: int = 3,
    backoff_s: float = 0.5,
    sleep: Callable[[float], None] = time.sleep,
) -> list[WeatherObservation]:
    """Fetch the 21-day window around the anchor: 14 days of history, then
    7 forecast days starting at the anchor itself.

    Provider failures are retried with exponential backoff; days the
    provider does not know raise IncompleteWindow rather than being filled.
    """
    observations: list[WeatherObservation] = []
    missing: list[dt.date] = []
    for offset in range(-HISTORY_DAYS, FORECAST_DAYS):
        day = anchor_date + dt.timedelta(days=offset)
        kind = ObservationKind.HISTORY if offset < 0 else ObservationKind.FORECAST
        last_err = None
        raw = None
        for attempt in range(retries):
            try:
                raw = provider.observe(point, day)
                last_err = None
                break
            except ProviderUnavailable as e:
                last_err = e
                if attempt + 1 < retries:
                    sleep(backoff_s * (2 ** attempt))
        if last_err is not None:
            raise ProviderUnavailable(f"{day.isoformat()}: {last_err}")
        if raw is None:
            missing.append(day)
            continue
        observations.append(
            WeatherObservation(
                date=day, tmax=float(raw["tmax"]), tmin=float(raw["tmin"]),
                tavg=float(raw["tavg"]), prcp=float(raw["prcp"]),
                wind_speed=float(raw["wind_speed"]), kind=kind,
            )
        )
    if missing:
        raise IncompleteWindow(missing)
    return observations


def geocode(provider, city: str, units: list[FipsUnit] | None = None) -> tuple[GeoPoint, str]:
    """Resolve a city to its point and county; falls back to point-in-county
    lookup when the provider has no county."""
    point, fips = provider.resolve(city)
    if fips is None:
        if not units:
            raise ValueError(f"provider gave no county for {city!r} and no units to locate in")
        fips = locate_fips(point, units).code
    return point, fips


def build_prediction_features(
    observations: list[WeatherObservation],
    location: PredictionLocation,
    anchor_date: dt.date,
    centroid: GeoPoint,
) -> np.ndarray:
    """Assemble the feature vector in training order (FEATURE_NAMES):
    window means, the location's latest fuel moisture, the anchor month,
    and the county centroid."""
    if len(observations) != WINDOW_DAYS:
        raise IncompleteWindow([])
    n = float(WINDOW_DAYS)
    return np.array([
        sum(o.wind_speed for o in observations) / n,
        sum(o.tmax for o in observations) / n,
        sum(o.tmin for o in observations) / n,
        sum(o.tavg for o in observations) / n,
        location.latest_fmc,
        sum(o.prcp for o in observations) / n,
        float(anchor_date.month),
        centroid.lon,
        centroid.lat,
    ])


def parse_locations_csv(stream: IO[str]) -> list[tuple[str, GeoPoint | None]]:
    """Read the operator locations file: city,lat,lon with optional coords."""
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != ["city", "lat", "lon"]:
        raise ValueError(f"expected header city,lat,lon, got {header}")
    out = []
    for row in reader:
        if not row:
            continue
        city, lat_s, lon_s = row
        point = None
        if lat_s != "" and lon_s != "":
            point = GeoPoint(lat=float(lat_s), lon=float(lon_s))
        out.append((city, point))
    return out


def latest_fmc_by_fips(rows: Iterable[JoinedDailyRecord]) -> dict[str, float]:
    """Final forward-filled fuel value per county, from the joined table."""
    latest: dict[str, tuple[dt.date, float]] = {}
    for r in rows:
        cur = latest.get(r.fips)
        if cur is None or r.date > cur[0]:
            latest[r.fips] = (r.date, r.fmc)
    return {fips: fmc for fips, (_, fmc) in latest.items()}


def resolve_locations(
    entries: list[tuple[str, GeoPoint | None]],
    geocode_provider,
    units: list[FipsUnit],
    fuel_latest: dict[str, float],
) -> tuple[list[PredictionLocation], list[dict]]:
    """Turn raw location entries into PredictionLocations; entries that
    cannot be resolved are reported, not fatal."""
    locations: list[PredictionLocation] = []
    skipped: list[dict] = []
    for city, point in entries:
        try:
            fips = None
            if geocode_provider is not None:
                point, fips = geocode(geocode_provider, city, units)
            if point is None:
                raise ValueError("no coordinates and geocoding disabled")
            if fips is None:
                fips = locate_fips(point, units).code
            fmc = fuel_latest.get(fips)
            if fmc is None:
                raise ValueError(f"no fuel history for county {fips}")
            locations.append(PredictionLocation(city=city, point=point, fips=fips, latest_fmc=fmc))
        except (UnknownCity, ValueError) as e:
            skipped.append({"city": city, "reason": str(e)})
    return locations, skipped


@dataclass
class PredictionArtifact:
    generated_at: str
    model_fingerprint: str
    rows: list[dict]
    skipped: list[dict]
    schema_version: int = ARTIFACT_SCHEMA_VERSION

    def to_document(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "generated_at": self.generated_at,
            "model_fingerprint": self.model_fingerprint,
            "rows": self.rows,
            "skipped": self.skipped,
        }


def read_artifact(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as f:
        doc = json.load(f)
    if doc.get("schema_version") != ARTIFACT_SCHEMA_VERSION:
        raise ValueError(f"unsupported artifact schema: {doc.get('schema_version')!r}")
    return doc


def run_daily_job(
    locations: list[PredictionLocation],
    model_path: str | Path,
    weather_provider,
    out_path: str | Path,
    anchor_date: dt.date,
    units_by_code: dict[str, FipsUnit],
    pre_skipped: list[dict] | None = None,
    clock: Callable[[], dt.datetime] | None = None,
    parallelism: int = 4,
    sleep: Callable[[float], None] = time.sleep,
) -> PredictionArtifact:
    """Fetch, featurize, predict, and classify each location, then write
    the artifact atomically. Locations with incomplete data are skipped
    with a reason; predictions are clamped at zero before classification.
    """
    if not locations and not pre_skipped:
        raise AllLocationsFailed("no locations given")
    model = load_model(model_path)
    names = getattr(model, "feature_names", None)
    if names is not None and list(names) != FEATURE_NAMES:
        raise ValueError(f"model feature order {names} != training order {FEATURE_NAMES}")

    def process(loc: PredictionLocation) -> tuple[str, dict | None, dict | None]:
        try:
            obs = fetch_window(weather_provider, loc.point, anchor_date, sleep=sleep)
            unit = units_by_code.get(loc.fips)
            centroid = unit.centroid if unit is not None else loc.point
            x = build_prediction_features(obs, loc, anchor_date, centroid)
            pred = max(0.0, float(model.predict(x.reshape(1, -1))[0]))
            return loc.fips, {
                "fips": loc.fips,
                "city": loc.city,
                "predicted_sum_acres": pred,
                "class": classify_fire_size(pred),
            }, None
        except (ProviderUnavailable, IncompleteWindow, ValueError) as e:
            return loc.fips, None, {"city": loc.city, "reason": str(e)}

    rows: list[dict] = []
    skipped: list[dict] = list(pre_skipped or [])
    if locations:
        workers = max(1, min(parallelism, len(locations)))
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            for _, row, skip in pool.map(process, locations):
                if row is not None:
                    rows.append(row)
                if skip is not None:
                    skipped.append(skip)
    if not rows:
        raise AllLocationsFailed(f"all {len(locations) + len(skipped)} locations failed")

    rows.sort(key=lambda r: (r["fips"], r["city"]))
    skipped.sort(key=lambda s: s["city"])
    now = clock() if clock is not None else dt.datetime.now(dt.timezone.utc)
    artifact = PredictionArtifact(
        generated_at=now.isoformat(),
        model_fingerprint=model_fingerprint(model_path),
        rows=rows,
        skipped=skipped,
    )
    out_path = Path(out_path)
    tmp = out_path.with_name(out_path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as f:
        json.dump(artifact.to_document(), f, sort_keys=True, indent=1)
        f.write("\n")
    os.replace(tmp, out_path)
    return artifact
