"""Impute, aggregate, and join cleaned records into the unified per-county
daily table, then engineer windowed training samples.

The joined table is keyed by (fips, date) and carries exactly eleven
columns; window samples average the six environmental features over a
fixed-length run of days and sum the burned area over the same run.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass, replace
from typing import IO, Iterable

import numpy as np

from .geo import FipsUnit, SiteAssignment, StationKind
from .ingest import STUDY_RANGE, DailyEnvRecord, FireEvent, FuelClass, _fmt_num

JOINED_HEADER = [
    "fips", "longitude", "latitude", "date", "wind",
    "tmax", "tmin", "tavg", "fmc", "prcp", "fire_size_day_sum",
]

FEATURE_NAMES = [
    "wind_avg", "tmax_avg", "tmin_avg", "tavg_avg", "fmc_avg", "prcp_avg",
    "month", "longitude", "latitude",
]

WINDOW_HEADER = ["fips", "window_end_date"] + FEATURE_NAMES + ["y_sum"]


class NoFuelRecords(ValueError):
    def __init__(self, station_id: str):
        self.station_id = station_id
        super().__init__(f"station {station_id!r} has no live fuel records")


@dataclass(frozen=True, slots=True)
class DailyFireAggregate:
    fips: str
    date: dt.date
    fire_size_day_sum: float


@dataclass(frozen=True, slots=True)
class JoinedDailyRecord:
    fips: str
    longitude: float
    latitude: float
    date: dt.date
    wind: float
    tmax: float
    tmin: float
    tavg: float
    fmc: float
    prcp: float
    fire_size_day_sum: float


@dataclass(frozen=True, slots=True)
class WindowSample:
    """One training sample: feature means over a w-day window plus the
    burned-area sum over the same window. ``x`` follows FEATURE_NAMES."""

    fips: str
    window_end_date: dt.date
    x: tuple[float, ...]
    y: float


def select_live_fuel(records: Iterable[DailyEnvRecord]) -> list[DailyEnvRecord]:
    """Keep only live fuel-moisture records."""
    return [r for r in records if r.fuel_class == FuelClass.LIVE]


def forward_fill_fuel(
    records: list[DailyEnvRecord],
    date_range: tuple[dt.date, dt.date] = STUDY_RANGE,
) -> dict[dt.date, float]:
    """Expand one station's sparse fuel records into one value per day.

    Days between two records take the earlier record's value; days before
    the first record take the first value, days after the last record take
    the last value. Multiple records on one day resolve to the latest in
    input order.
    """
    if not records:
        raise NoFuelRecords("<empty>")
    station_ids = {r.station_id for r in records}
    if len(station_ids) != 1:
        raise ValueError(f"records span multiple stations: {sorted(station_ids)}")
    by_date: dict[dt.date, float] = {}
    for r in sorted(records, key=lambda r: r.date):
        by_date[r.date] = r.fmc
    days = sorted(by_date)
    start, end = date_range
    series: dict[dt.date, float] = {}
    value = by_date[days[0]]
    i = 0
    d = start
    while d <= end:
        while i < len(days) and days[i] <= d:
            value = by_date[days[i]]
            i += 1
        series[d] = value
        d += dt.timedelta(days=1)
    return series


def forward_fill_all(
    records: Iterable[DailyEnvRecord],
    date_range: tuple[dt.date, dt.date] = STUDY_RANGE,
) -> dict[str, dict[dt.date, float]]:
    """Forward-fill every station that has at least one live record."""
    by_station: dict[str, list[DailyEnvRecord]] = {}
    for r in select_live_fuel(records):
        by_station.setdefault(r.station_id, []).append(r)
    return {sid: forward_fill_fuel(recs, date_range) for sid, recs in sorted(by_station.items())}


def impute_end_date(event: FireEvent) -> FireEvent:
    """Fill a missing end date with the start date; idempotent."""
    if event.end_date is not None:
        return event
    return replace(event, end_date=event.start_date)


def daily_fire_sum(events: Iterable[FireEvent]) -> list[DailyFireAggregate]:
    """Spread each event's size evenly over its days, then sum per (fips, date).

    Every event must already carry a fips code and an end date.
    """
    acc: dict[tuple[str, dt.date], float] = {}
    for e in events:
        if e.fips is None:
            raise ValueError(f"event {e.event_id!r} has no fips assigned")
        if e.end_date is None:
            raise ValueError(f"event {e.event_id!r} has no end date")
        d = (e.end_date - e.start_date).days + 1
        per_day = e.size_acres / d
        day = e.start_date
        while day <= e.end_date:
            key = (e.fips, day)
            acc[key] = acc.get(key, 0.0) + per_day
            day += dt.timedelta(days=1)
    return [DailyFireAggregate(fips, date, total) for (fips, date), total in sorted(acc.items())]


@dataclass
class JoinResult:
    rows: list[JoinedDailyRecord]
    dropped: int


def build_joined_table(
    units: list[FipsUnit],
    assignments: list[SiteAssignment],
    tp_records: Iterable[DailyEnvRecord],
    wind_records: Iterable[DailyEnvRecord],
    fuel_series: dict[str, dict[dt.date, float]],
    fire_aggregates: Iterable[DailyFireAggregate],
    date_range: tuple[dt.date, dt.date] = STUDY_RANGE,
) -> JoinResult:
    """Join per-station data onto (fips, date) rows via station assignments.

    Longitude/latitude come from the unit centroid; the fire sum defaults
    to 0.0 on fire-free days. A row missing any of the six environmental
    values is dropped and counted, so the output table is dense.
    """
    units_by_code = {u.code: u for u in units}
    tp_by: dict[tuple[str, dt.date], DailyEnvRecord] = {(r.station_id, r.date): r for r in tp_records}
    wind_by: dict[tuple[str, dt.date], float] = {(r.station_id, r.date): r.wind_speed for r in wind_records}
    fire_by: dict[tuple[str, dt.date], float] = {(a.fips, a.date): a.fire_size_day_sum for a in fire_aggregates}

    start, end = date_range
    n_days = (end - start).days + 1
    rows: list[JoinedDailyRecord] = []
    dropped = 0
    for assignment in sorted(assignments, key=lambda a: a.fips_code):
        unit = units_by_code[assignment.fips_code]
        tp_sid = assignment.station_ids.get(StationKind.TP)
        wind_sid = assignment.station_ids.get(StationKind.WIND)
        fuel_sid = assignment.station_ids.get(StationKind.FUEL)
        fuel = fuel_series.get(fuel_sid, {}) if fuel_sid else {}
        if tp_sid is None or wind_sid is None or fuel_sid is None:
            dropped += n_days
            continue
        for offset in range(n_days):
            day = start + dt.timedelta(days=offset)
            tp = tp_by.get((tp_sid, day))
            wind = wind_by.get((wind_sid, day))
            fmc = fuel.get(day)
            if (
                tp is None or tp.tmax is None or tp.tmin is None
                or tp.tavg is None or tp.prcp is None
                or wind is None or fmc is None
            ):
                dropped += 1
                continue
            rows.append(
                JoinedDailyRecord(
                    fips=unit.code,
                    longitude=unit.centroid.lon,
                    latitude=unit.centroid.lat,
                    date=day,
                    wind=wind,
                    tmax=tp.tmax,
                    tmin=tp.tmin,
                    tavg=tp.tavg,
                    fmc=fmc,
                    prcp=tp.prcp,
                    fire_size_day_sum=fire_by.get((unit.code, day), 0.0),
                )
            )
    return JoinResult(rows=rows, dropped=dropped)


def window_aggregate(
    rows: Iterable[JoinedDailyRecord],
    w: int = 21,
    stride: int = 21,
) -> list[WindowSample]:
    """Aggregate the joined table into per-county windows of ``w`` days.

    Windows step by ``stride`` from each county's earliest date and are
    emitted only when all ``w`` consecutive calendar days are present.
    Features are per-window means plus the month of the window's last day
    and the county centroid; the target is the burned-area sum.
    """
    if w < 1 or stride < 1:
        raise ValueError("w and stride must be >= 1")
    by_fips: dict[str, dict[dt.date, JoinedDailyRecord]] = {}
    for r in rows:
        by_fips.setdefault(r.fips, {})[r.date] = r
    samples: list[WindowSample] = []
    for fips in sorted(by_fips):
        table = by_fips[fips]
        first = min(table)
        last = max(table)
        t = first
        while t + dt.timedelta(days=w - 1) <= last:
            window = [table.get(t + dt.timedelta(days=i)) for i in range(w)]
            if all(r is not None for r in window):
                end_day = t + dt.timedelta(days=w - 1)
                tail = window[-1]
                x = (
                    sum(r.wind for r in window) / w,
                    sum(r.tmax for r in window) / w,
                    sum(r.tmin for r in window) / w,
                    sum(r.tavg for r in window) / w,
                    sum(r.fmc for r in window) / w,
                    sum(r.prcp for r in window) / w,
                    float(end_day.month),
                    tail.longitude,
                    tail.latitude,
                )
                samples.append(
                    WindowSample(fips=fips, window_end_date=end_day, x=x,
                                 y=sum(r.fire_size_day_sum for r in window))
                )
            t += dt.timedelta(days=stride)
    return samples


def to_matrix(samples: list[WindowSample]) -> tuple[np.ndarray, np.ndarray]:
    """Stack window samples into (X, y) arrays following FEATURE_NAMES."""
    X = np.array([s.x for s in samples], dtype=float).reshape(len(samples), len(FEATURE_NAMES))
    y = np.array([s.y for s in samples], dtype=float)
    return X, y


def write_joined_csv(rows: Iterable[JoinedDailyRecord], stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(JOINED_HEADER)
    for r in rows:
        w.writerow([
            r.fips, _fmt_num(r.longitude), _fmt_num(r.latitude), r.date.isoformat(),
            _fmt_num(r.wind), _fmt_num(r.tmax), _fmt_num(r.tmin), _fmt_num(r.tavg),
            _fmt_num(r.fmc), _fmt_num(r.prcp), _fmt_num(r.fire_size_day_sum),
        ])


def read_joined_csv(stream: IO[str]) -> list[JoinedDailyRecord]:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != JOINED_HEADER:
        raise ValueError(f"expected joined-table header {JOINED_HEADER}, got {header}")
    rows = []
    for row in reader:
        if not row:
            continue
        fips, lon, lat, date_s, wind, tmax, tmin, tavg, fmc, prcp, fire = row
        rows.append(
            JoinedDailyRecord(
                fips=fips, longitude=float(lon), latitude=float(lat),
                date=dt.date.fromisoformat(date_s), wind=float(wind),
                tmax=float(tmax), tmin=float(tmin), tavg=float(tavg),
                fmc=float(fmc), prcp=float(prcp), fire_size_day_sum=float(fire),
            )
        )
    return rows


def write_window_csv(samples: Iterable[WindowSample], stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(WINDOW_HEADER)
    for s in samples:
        w.writerow([s.fips, s.window_end_date.isoformat()]
                   + [_fmt_num(v) for v in s.x] + [_fmt_num(s.y)])


def read_window_csv(stream: IO[str]) -> list[WindowSample]:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != WINDOW_HEADER:
        raise ValueError(f"expected window header {WINDOW_HEADER}, got {header}")
    samples = []
    for row in reader:
        if not row:
            continue
        fips, end_s, *values = row
        samples.append(
            WindowSample(
                fips=fips,
                window_end_date=dt.date.fromisoformat(end_s),
                x=tuple(float(v) for v in values[:-1]),
                y=float(values[-1]),
            )
        )
    return samples
