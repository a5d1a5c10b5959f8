"""Deterministic synthetic corpus generator.

Builds a grid of square counties with one station of each kind, seasonal
weather, sparsely sampled fuel moisture, and fire events whose daily
ignition probability rises with heat and falls with rain and fuel
moisture. Sizes are heavy-tailed. The generator's parameters are recorded
alongside the corpus so tests can reason about ground truth.

The corpus is emitted as raw CSV rows (tenths units for temperature and
precipitation, u/v components for wind) so the full ingest path is
exercised, plus county geometry, prediction locations, and record/replay
fixtures for the realtime providers.
"""

from __future__ import annotations

import datetime as dt
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geo import FipsUnit, GeoPoint, Station, StationKind

DEFAULT_END = dt.date(2015, 12, 31)

GRID_LAT0 = 32.0
GRID_LON0 = -120.0
CELL_DEG = 0.5


@dataclass
class SyntheticCorpus:
    seed: int
    start: dt.date
    end: dt.date
    units: list[FipsUnit]
    stations: list[Station]
    station_rows: list[tuple]
    tp_rows: list[tuple]
    wind_rows: list[tuple]
    fuel_rows: list[tuple]
    fire_rows: list[tuple]
    locations: list[tuple]  # (city, lat, lon, fips)
    weather_fixture: dict
    geocode_fixture: dict
    anchor: dt.date
    truth: dict = field(default_factory=dict)


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def _unit_code(i: int) -> str:
    return f"{i + 1:05d}"


def _square_unit(i: int, cols: int) -> FipsUnit:
    row, col = divmod(i, cols)
    lat0 = GRID_LAT0 + row * CELL_DEG
    lon0 = GRID_LON0 + col * CELL_DEG
    ring = (
        GeoPoint(lat0, lon0),
        GeoPoint(lat0, lon0 + CELL_DEG),
        GeoPoint(lat0 + CELL_DEG, lon0 + CELL_DEG),
        GeoPoint(lat0 + CELL_DEG, lon0),
        GeoPoint(lat0, lon0),
    )
    centroid = GeoPoint(lat0 + CELL_DEG / 2, lon0 + CELL_DEG / 2)
    return FipsUnit(code=_unit_code(i), centroid=centroid, boundary=(ring,))


def generate_synthetic_corpus(
    seed: int,
    n_units: int,
    n_days: int,
    noise: float = 1.0,
    ignition_weights: tuple[float, float, float] = (1.7, 1.1, 1.0),
    end: dt.date = DEFAULT_END,
) -> SyntheticCorpus:
    """Generate a reproducible corpus; identical inputs give identical output.

    ``ignition_weights`` are the (heat, rain, fuel-moisture) coefficients of
    the daily ignition probability; all zeros decouples fire from weather.
    ``noise`` scales the Gaussian perturbations on the weather signals.
    """
    rng = np.random.default_rng(seed)
    start = end - dt.timedelta(days=n_days - 1)
    dates = [start + dt.timedelta(days=i) for i in range(n_days)]
    doy = np.array([d.timetuple().tm_yday for d in dates], dtype=float)

    cols = max(1, math.ceil(math.sqrt(n_units)))
    units = [_square_unit(i, cols) for i in range(n_units)]

    wt, wp, wf = ignition_weights
    p_min, p_max = 0.002, 0.50
    size_mu, size_sigma = math.log(8.0), 0.75
    size_coupling = 2.0
    region_amplitude = 0.7
    # Region and size couplings ride on the weather gates, so zeroed
    # weights leave fire occurrence flat in every feature the model sees.
    region_exp = 0.0 if (wt == 0 and wp == 0 and wf == 0) else 1.0
    truth = {
        "seed": seed,
        "n_units": n_units,
        "n_days": n_days,
        "noise": noise,
        "ignition_weights": [wt, wp, wf],
        "p_range": [p_min, p_max],
        "size_lognormal": [size_mu, size_sigma],
        "size_coupling": size_coupling,
        "region_amplitude": region_amplitude,
        "heat_gate": [24.0, 4.0],
        "dry_gate": [95.0, 10.0],
        "rain_damp_mm": 6.0,
        "start": start.isoformat(),
        "end": end.isoformat(),
    }

    stations: list[Station] = []
    station_rows: list[tuple] = []
    tp_rows: list[tuple] = []
    wind_rows: list[tuple] = []
    fuel_rows: list[tuple] = []
    fire_rows: list[tuple] = []
    weather_by_unit: dict[str, dict] = {}

    event_no = 0
    season = np.sin(2 * np.pi * (doy - 110.0) / 365.25)
    fmc_season = np.cos(2 * np.pi * (doy - 230.0) / 365.25)

    for i, unit in enumerate(units):
        code = unit.code
        c = unit.centroid
        row, col = divmod(i, cols)
        region = 1.0 + region_amplitude * math.sin(2 * math.pi * col / 7.0) * math.cos(2 * math.pi * row / 5.0)
        temp_off = rng.normal(0.0, 2.0)
        wet_factor = float(np.clip(rng.normal(1.0, 0.25), 0.4, 1.8))

        tmax = 17.0 + 13.0 * season + temp_off + noise * rng.normal(0.0, 2.5, n_days)
        gap = 8.0 + noise * np.abs(rng.normal(0.0, 2.0, n_days))
        tmin = tmax - gap
        tmax_tenths = np.rint(np.clip(tmax, -80, 55) * 10).astype(int)
        tmin_tenths = np.rint(np.clip(tmin, -85, 50) * 10).astype(int)

        wet = rng.random(n_days) < 0.22 * wet_factor
        prcp = np.where(wet, rng.exponential(5.0, n_days), 0.0)
        prcp_tenths = np.rint(prcp * 10).astype(int)

        u = 2.5 + rng.normal(0.0, 1.5, n_days)
        v = rng.normal(0.0, 1.5, n_days)
        u = np.round(u, 2)
        v = np.round(v, 2)

        walk = np.cumsum(rng.normal(0.0, 0.6 * noise, n_days))
        fmc_true = np.clip(105.0 + 30.0 * fmc_season + walk, 35.0, None)
        fmc_true = np.round(fmc_true, 1)

        # Station trio sits slightly off-centroid inside the county square.
        tp_st = Station(f"T{i:04d}", StationKind.TP, GeoPoint(c.lat + 0.05, c.lon + 0.05))
        wind_st = Station(f"W{i:04d}", StationKind.WIND, GeoPoint(c.lat - 0.05, c.lon + 0.05))
        fuel_st = Station(f"F{i:04d}", StationKind.FUEL, GeoPoint(c.lat + 0.05, c.lon - 0.05))
        stations.extend([tp_st, wind_st, fuel_st])

        for st in (tp_st, wind_st, fuel_st):
            station_rows.append((st.id, st.kind.value, round(st.location.lat, 4), round(st.location.lon, 4)))

        # A nearer but low-coverage TP station; the coverage filter must
        # remove it or most of this county's rows would drop on its gaps.
        sparse_st = Station(f"T{i:04d}X", StationKind.TP, GeoPoint(c.lat + 0.01, c.lon + 0.01))
        stations.append(sparse_st)
        station_rows.append((sparse_st.id, sparse_st.kind.value,
                             round(sparse_st.location.lat, 4), round(sparse_st.location.lon, 4)))
        sparse_days = rng.random(n_days) < 0.3

        for t, day in enumerate(dates):
            iso = day.isoformat()
            tp_rows.append((tp_st.id, iso, int(tmax_tenths[t]), int(tmin_tenths[t]), "", int(prcp_tenths[t])))
            if sparse_days[t]:
                tp_rows.append((sparse_st.id, iso, int(tmax_tenths[t]), int(tmin_tenths[t]), "", int(prcp_tenths[t])))
            wind_rows.append((wind_st.id, iso, float(u[t]), float(v[t])))

        # Sparse fuel sampling: every 10-30 days, live always, sometimes a
        # dead companion reading at 15-30% of the live value.
        t = int(rng.integers(0, 15))
        while t < n_days:
            fuel_rows.append((fuel_st.id, dates[t].isoformat(), "live", float(fmc_true[t])))
            if rng.random() < 0.28:
                dead = round(float(fmc_true[t]) * float(rng.uniform(0.15, 0.30)), 1)
                fuel_rows.append((fuel_st.id, dates[t].isoformat(), "dead", dead))
            t += int(rng.integers(10, 31))

        # AND-like ignition: hot gate x dry-fuel gate x rain damping, each
        # raised to its weight, modulated by a fixed regional regime.
        heat_gate = _sigmoid((tmax - 24.0) / 4.0)
        dry_gate = _sigmoid((95.0 - fmc_true) / 10.0)
        rain_damp = np.exp(-prcp / 6.0)
        gates = heat_gate ** wt * dry_gate ** wf * rain_damp ** wp
        p = np.clip(p_min + (p_max - p_min) * gates * region ** region_exp, 0.0, 0.85)
        ignite = rng.random(n_days) < p
        size_mult = 1.0 + size_coupling * heat_gate ** wt * dry_gate ** wf

        for t in np.flatnonzero(ignite):
            day = dates[int(t)]
            event_no += 1
            size = max(0.01, round(float(rng.lognormal(size_mu, size_sigma)) * float(size_mult[t]), 2))
            if rng.random() < 0.90:
                duration = 1
            else:
                duration = 2 + int(rng.integers(0, 4))
            end_day = min(day + dt.timedelta(days=duration - 1), end)
            one_day = end_day == day
            end_s = ""
            if not (one_day and rng.random() < 0.40):
                end_s = end_day.isoformat()
            lat = float(c.lat + rng.uniform(-0.2, 0.2))
            lon = float(c.lon + rng.uniform(-0.2, 0.2))
            state_s, county_s = code[:2], code[2:]
            roll = rng.random()
            if roll < 0.02 and n_units > 1:
                other = units[(i + 1) % n_units].code
                state_s, county_s = other[:2], other[2:]
            elif roll < 0.22:
                if rng.random() < 0.5:
                    state_s = ""
                else:
                    county_s = ""
            fire_rows.append((f"E{event_no:06d}", day.isoformat(), end_s, size,
                              round(lat, 4), round(lon, 4), state_s, county_s))

        weather_by_unit[code] = {
            "tmax": tmax_tenths / 10.0,
            "tmin": tmin_tenths / 10.0,
            "prcp": prcp_tenths / 10.0,
            "u": u,
            "v": v,
        }

    # Prediction locations and provider fixtures over the trailing 21 days.
    anchor = end - dt.timedelta(days=6)
    n_cities = min(10, n_units)
    step = max(1, n_units // n_cities)
    locations: list[tuple] = []
    weather_fixture: dict = {}
    geocode_fixture: dict = {}
    for k in range(n_cities):
        idx = (k * step) % n_units
        unit = units[idx]
        city = f"City{k:02d}"
        lat, lon = unit.centroid.lat, unit.centroid.lon
        locations.append((city, lat, lon, unit.code))
        geocode_fixture[city] = {"lat": lat, "lon": lon, "fips": unit.code}
        wx = weather_by_unit[unit.code]
        per_day = {}
        for off in range(-14, 7):
            day = anchor + dt.timedelta(days=off)
            t = (day - start).days
            if not 0 <= t < n_days:
                continue
            tmax_v = float(wx["tmax"][t])
            tmin_v = float(wx["tmin"][t])
            per_day[day.isoformat()] = {
                "tmax": tmax_v,
                "tmin": tmin_v,
                "tavg": (tmax_v + tmin_v) / 2.0,
                "prcp": float(wx["prcp"][t]),
                "wind_speed": math.sqrt(float(wx["u"][t]) ** 2 + float(wx["v"][t]) ** 2),
            }
        weather_fixture[f"{lat:.4f},{lon:.4f}"] = per_day

    return SyntheticCorpus(
        seed=seed, start=start, end=end, units=units, stations=stations,
        station_rows=station_rows, tp_rows=tp_rows, wind_rows=wind_rows,
        fuel_rows=fuel_rows, fire_rows=fire_rows, locations=locations,
        weather_fixture=weather_fixture, geocode_fixture=geocode_fixture,
        anchor=anchor, truth=truth,
    )


def units_to_geojson(units: list[FipsUnit]) -> dict:
    features = []
    for u in units:
        rings = [[[p.lon, p.lat] for p in ring] for ring in u.boundary]
        features.append({
            "type": "Feature",
            "properties": {"GEOID": u.code},
            "geometry": {"type": "Polygon", "coordinates": rings},
        })
    return {"type": "FeatureCollection", "features": features}


def _write_csv_rows(path: Path, header: list[str], rows: list[tuple]) -> None:
    import csv

    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_corpus(corpus: SyntheticCorpus, out_dir: str | Path) -> list[Path]:
    """Write the corpus to disk; returns the paths written."""
    from . import ingest

    out = Path(out_dir)
    raw = out / "raw"
    fixtures = out / "fixtures"
    raw.mkdir(parents=True, exist_ok=True)
    fixtures.mkdir(parents=True, exist_ok=True)

    paths = []

    def _json_dump(path: Path, obj) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(obj, f, indent=2, sort_keys=True)
            f.write("\n")
        paths.append(path)

    _write_csv_rows(raw / "tp.csv", ingest.TP_HEADER, corpus.tp_rows)
    _write_csv_rows(raw / "wind.csv", ingest.WIND_UV_HEADER, corpus.wind_rows)
    _write_csv_rows(raw / "fuel.csv", ingest.FUEL_HEADER, corpus.fuel_rows)
    _write_csv_rows(raw / "fires.csv", ingest.FIRE_HEADER, corpus.fire_rows)
    _write_csv_rows(raw / "stations.csv", ingest.STATION_HEADER, corpus.station_rows)
    paths.extend([raw / n for n in ("tp.csv", "wind.csv", "fuel.csv", "fires.csv", "stations.csv")])

    _json_dump(out / "counties.geojson", units_to_geojson(corpus.units))
    _write_csv_rows(out / "locations.csv", ["city", "lat", "lon"],
                    [(c, lat, lon) for c, lat, lon, _ in corpus.locations])
    paths.append(out / "locations.csv")
    _json_dump(fixtures / "weather.json", corpus.weather_fixture)
    _json_dump(fixtures / "geocode.json", corpus.geocode_fixture)
    _json_dump(fixtures / "meta.json", {"anchor": corpus.anchor.isoformat()})
    _json_dump(out / "truth.json", corpus.truth)
    return paths
