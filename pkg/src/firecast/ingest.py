"""Parsers and cleaners turning the four raw CSV families into canonical
per-station daily records.

Parsing is total: a malformed header raises, but every data row either
becomes a record or lands in the reject list with its line number and a
reason. Canonical schemas (UTF-8, comma-separated, LF, header first):

    tp.csv       station_id,date,tmax_tenths_c,tmin_tenths_c,tavg_tenths_c,prcp_tenths_mm
    wind.csv     station_id,date,u_ms,v_ms   or   station_id,date,wind_speed_ms
    fuel.csv     station_id,date,fuel_class,fmc_percent
    fires.csv    event_id,start_date,end_date,size_acres,lat,lon,state_fips,county_fips
    stations.csv station_id,kind,lat,lon
    rejects.csv  file,row,reason

Raw temperature and precipitation values are carried in tenths (0.1 degC,
0.1 mm); canonical records hold whole degC and mm.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable

from .geo import GeoPoint, Station, StationKind

TEMP_MIN_C = -90.0
TEMP_MAX_C = 100.0

STUDY_RANGE = (dt.date(1992, 1, 1), dt.date(2015, 12, 31))

TP_HEADER = ["station_id", "date", "tmax_tenths_c", "tmin_tenths_c", "tavg_tenths_c", "prcp_tenths_mm"]
WIND_UV_HEADER = ["station_id", "date", "u_ms", "v_ms"]
WIND_SPEED_HEADER = ["station_id", "date", "wind_speed_ms"]
FUEL_HEADER = ["station_id", "date", "fuel_class", "fmc_percent"]
FIRE_HEADER = ["event_id", "start_date", "end_date", "size_acres", "lat", "lon", "state_fips", "county_fips"]
STATION_HEADER = ["station_id", "kind", "lat", "lon"]


class MalformedHeader(ValueError):
    """First line of a CSV does not match the expected schema."""


class FuelClass(str, Enum):
    LIVE = "live"
    DEAD = "dead"


@dataclass(frozen=True, slots=True)
class DailyEnvRecord:
    """One cleaned per-station, per-date environmental observation.

    Exactly the fields for its kind are populated. Temperatures are only
    checked for finiteness here; the physical range filter is a separate
    cleaning step so out-of-range records stay observable until dropped.
    """

    station_id: str
    date: dt.date
    kind: StationKind
    tmax: float | None = None
    tmin: float | None = None
    tavg: float | None = None
    prcp: float | None = None
    wind_speed: float | None = None
    fmc: float | None = None
    fuel_class: FuelClass | None = None

    def __post_init__(self):
        if self.kind == StationKind.TP:
            extra = (self.wind_speed, self.fmc, self.fuel_class)
        elif self.kind == StationKind.WIND:
            extra = (self.tmax, self.tmin, self.tavg, self.prcp, self.fmc, self.fuel_class)
            if self.wind_speed is None:
                raise ValueError("wind record without wind_speed")
        else:
            extra = (self.tmax, self.tmin, self.tavg, self.prcp, self.wind_speed)
            if self.fmc is None or self.fuel_class is None:
                raise ValueError("fuel record without fmc or fuel_class")
        if any(v is not None for v in extra):
            raise ValueError(f"fields not valid for kind {self.kind.value!r}")
        for v in (self.tmax, self.tmin, self.tavg):
            if v is not None and not math.isfinite(v):
                raise ValueError(f"non-finite temperature: {v!r}")
        if self.prcp is not None and not (math.isfinite(self.prcp) and self.prcp >= 0):
            raise ValueError(f"invalid precipitation: {self.prcp!r}")
        if self.wind_speed is not None and not (math.isfinite(self.wind_speed) and self.wind_speed >= 0):
            raise ValueError(f"invalid wind speed: {self.wind_speed!r}")
        if self.fmc is not None and not (math.isfinite(self.fmc) and self.fmc >= 0):
            raise ValueError(f"invalid fmc: {self.fmc!r}")


@dataclass(frozen=True, slots=True)
class FireEvent:
    """A raw fire incident; ``fips`` is attached later by the pipeline."""

    event_id: str
    start_date: dt.date
    end_date: dt.date | None
    size_acres: float
    location: GeoPoint
    reported_state: str | None = None
    reported_county: str | None = None
    fips: str | None = None
    fips_conflict: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.size_acres) and self.size_acres > 0):
            raise ValueError(f"size_acres must be > 0: {self.size_acres!r}")
        if self.end_date is not None and self.end_date < self.start_date:
            raise ValueError("end_date before start_date")


@dataclass(frozen=True)
class RowReject:
    row: int  # 1-based physical line number (header is line 1)
    reason: str


def wind_speed(u: float, v: float) -> float:
    """Absolute wind speed from u/v components."""
    if not (math.isfinite(u) and math.isfinite(v)):
        raise ValueError(f"non-finite wind components: {u!r}, {v!r}")
    return math.sqrt(u * u + v * v)


def _read_header(reader, expected: list[list[str]]) -> list[str]:
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedHeader("empty file") from None
    except csv.Error as e:
        raise MalformedHeader(f"unreadable header: {e}") from None
    for candidate in expected:
        if header == candidate:
            return header
    raise MalformedHeader(f"expected one of {expected}, got {header}")


def _robust_rows(reader):
    """Yield (line_number, row, error) so one mangled physical line becomes
    a reject instead of aborting the parse."""
    while True:
        try:
            row = next(reader)
        except StopIteration:
            return
        except csv.Error as e:
            yield reader.line_num, None, str(e)
            continue
        yield reader.line_num, row, None


def _parse_date(text: str) -> dt.date:
    return dt.date.fromisoformat(text)


def _parse_float(text: str, what: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"non-numeric {what}: {text!r}") from None
    if not math.isfinite(value):
        raise ValueError(f"non-finite {what}: {text!r}")
    return value


def _opt_tenths(text: str, what: str) -> float | None:
    return None if text == "" else _parse_float(text, what) / 10.0


def parse_tp_csv(stream: IO[str]) -> tuple[list[DailyEnvRecord], list[RowReject]]:
    """Parse temperature/precipitation rows. Tenths become whole degC/mm;
    a missing tavg is the tmax/tmin midpoint when both are present."""
    reader = csv.reader(stream)
    _read_header(reader, [TP_HEADER])
    records: list[DailyEnvRecord] = []
    rejects: list[RowReject] = []
    for lineno, row, err in _robust_rows(reader):
        if err is not None:
            rejects.append(RowReject(lineno, err))
            continue
        if not row:
            continue
        try:
            if len(row) != len(TP_HEADER):
                raise ValueError(f"expected {len(TP_HEADER)} fields, got {len(row)}")
            sid, date_s, tmax_s, tmin_s, tavg_s, prcp_s = row
            date = _parse_date(date_s)
            tmax = _opt_tenths(tmax_s, "tmax")
            tmin = _opt_tenths(tmin_s, "tmin")
            tavg = _opt_tenths(tavg_s, "tavg")
            prcp = _opt_tenths(prcp_s, "prcp")
            if tavg is None and tmax is not None and tmin is not None:
                tavg = (tmax + tmin) / 2.0
            records.append(
                DailyEnvRecord(sid, date, StationKind.TP, tmax=tmax, tmin=tmin, tavg=tavg, prcp=prcp)
            )
        except ValueError as e:
            rejects.append(RowReject(lineno, str(e)))
    return records, rejects


def parse_wind_csv(stream: IO[str]) -> tuple[list[DailyEnvRecord], list[RowReject]]:
    """Parse wind rows in either u/v-component or precomputed-speed form."""
    reader = csv.reader(stream)
    header = _read_header(reader, [WIND_UV_HEADER, WIND_SPEED_HEADER])
    uv_form = header == WIND_UV_HEADER
    records: list[DailyEnvRecord] = []
    rejects: list[RowReject] = []
    for lineno, row, err in _robust_rows(reader):
        if err is not None:
            rejects.append(RowReject(lineno, err))
            continue
        if not row:
            continue
        try:
            if len(row) != len(header):
                raise ValueError(f"expected {len(header)} fields, got {len(row)}")
            if uv_form:
                sid, date_s, u_s, v_s = row
                speed = wind_speed(_parse_float(u_s, "u"), _parse_float(v_s, "v"))
            else:
                sid, date_s, speed_s = row
                speed = _parse_float(speed_s, "wind_speed")
                if speed < 0:
                    raise ValueError(f"negative wind speed: {speed_s!r}")
            records.append(DailyEnvRecord(sid, _parse_date(date_s), StationKind.WIND, wind_speed=speed))
        except ValueError as e:
            rejects.append(RowReject(lineno, str(e)))
    return records, rejects


def parse_fuel_csv(stream: IO[str]) -> tuple[list[DailyEnvRecord], list[RowReject]]:
    """Parse fuel-moisture rows; ``fuel_class`` is live/dead, case-insensitive."""
    reader = csv.reader(stream)
    _read_header(reader, [FUEL_HEADER])
    records: list[DailyEnvRecord] = []
    rejects: list[RowReject] = []
    for lineno, row, err in _robust_rows(reader):
        if err is not None:
            rejects.append(RowReject(lineno, err))
            continue
        if not row:
            continue
        try:
            if len(row) != len(FUEL_HEADER):
                raise ValueError(f"expected {len(FUEL_HEADER)} fields, got {len(row)}")
            sid, date_s, class_s, fmc_s = row
            try:
                fuel_class = FuelClass(class_s.lower())
            except ValueError:
                raise ValueError(f"unknown fuel class: {class_s!r}") from None
            fmc = _parse_float(fmc_s, "fmc")
            if fmc < 0:
                raise ValueError(f"negative fmc: {fmc_s!r}")
            records.append(
                DailyEnvRecord(sid, _parse_date(date_s), StationKind.FUEL, fmc=fmc, fuel_class=fuel_class)
            )
        except ValueError as e:
            rejects.append(RowReject(lineno, str(e)))
    return records, rejects


def parse_fire_csv(stream: IO[str]) -> tuple[list[FireEvent], list[RowReject]]:
    """Parse fire incidents. Duplicate event ids collapse to the first
    occurrence; non-positive sizes and inverted date ranges are rejected."""
    reader = csv.reader(stream)
    _read_header(reader, [FIRE_HEADER])
    events: list[FireEvent] = []
    rejects: list[RowReject] = []
    seen: set[str] = set()
    for lineno, row, err in _robust_rows(reader):
        if err is not None:
            rejects.append(RowReject(lineno, err))
            continue
        if not row:
            continue
        try:
            if len(row) != len(FIRE_HEADER):
                raise ValueError(f"expected {len(FIRE_HEADER)} fields, got {len(row)}")
            eid, start_s, end_s, size_s, lat_s, lon_s, state_s, county_s = row
            if eid in seen:
                continue
            start = _parse_date(start_s)
            end = None if end_s == "" else _parse_date(end_s)
            if end is not None and end < start:
                raise ValueError(f"end_date {end_s} before start_date {start_s}")
            size = _parse_float(size_s, "size_acres")
            if size <= 0:
                raise ValueError(f"size_acres must be > 0: {size_s!r}")
            location = GeoPoint(lat=_parse_float(lat_s, "lat"), lon=_parse_float(lon_s, "lon"))
            events.append(
                FireEvent(
                    event_id=eid,
                    start_date=start,
                    end_date=end,
                    size_acres=size,
                    location=location,
                    reported_state=state_s or None,
                    reported_county=county_s or None,
                )
            )
            seen.add(eid)
        except ValueError as e:
            rejects.append(RowReject(lineno, str(e)))
    return events, rejects


def parse_stations_csv(stream: IO[str]) -> tuple[list[Station], list[RowReject]]:
    """Parse the station inventory (id, kind, coordinates)."""
    reader = csv.reader(stream)
    _read_header(reader, [STATION_HEADER])
    stations: list[Station] = []
    rejects: list[RowReject] = []
    for lineno, row, err in _robust_rows(reader):
        if err is not None:
            rejects.append(RowReject(lineno, err))
            continue
        if not row:
            continue
        try:
            if len(row) != len(STATION_HEADER):
                raise ValueError(f"expected {len(STATION_HEADER)} fields, got {len(row)}")
            sid, kind_s, lat_s, lon_s = row
            try:
                kind = StationKind(kind_s.lower())
            except ValueError:
                raise ValueError(f"unknown station kind: {kind_s!r}") from None
            point = GeoPoint(lat=_parse_float(lat_s, "lat"), lon=_parse_float(lon_s, "lon"))
            stations.append(Station(id=sid, kind=kind, location=point))
        except ValueError as e:
            rejects.append(RowReject(lineno, str(e)))
    return stations, rejects


def clean_temperature(records: Iterable[DailyEnvRecord]) -> tuple[list[DailyEnvRecord], int]:
    """Drop whole records carrying any temperature outside [-90, 100] degC
    (bounds inclusive: world-record extremes survive, impossibilities do not)."""
    kept = []
    rejected = 0
    for r in records:
        temps = [t for t in (r.tmax, r.tmin, r.tavg) if t is not None]
        if any(t < TEMP_MIN_C or t > TEMP_MAX_C for t in temps):
            rejected += 1
        else:
            kept.append(r)
    return kept, rejected


def coverage_fraction(
    dates: Iterable[dt.date],
    date_range: tuple[dt.date, dt.date] = STUDY_RANGE,
) -> float:
    """Fraction of days in the inclusive range having at least one record."""
    start, end = date_range
    total = (end - start).days + 1
    distinct = {d for d in dates if start <= d <= end}
    return len(distinct) / total


def filter_coverage(
    stations: list[Station],
    records: Iterable[DailyEnvRecord],
    date_range: tuple[dt.date, dt.date] = STUDY_RANGE,
    threshold: float = 0.5,
) -> list[str]:
    """Keep stations whose record coverage strictly exceeds ``threshold``.

    Coverage counts distinct record dates of the station's own kind within
    the inclusive range.
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold out of (0,1]: {threshold!r}")
    dates_by_station: dict[tuple[str, StationKind], set[dt.date]] = {}
    for r in records:
        dates_by_station.setdefault((r.station_id, r.kind), set()).add(r.date)
    kept = []
    for s in stations:
        cov = coverage_fraction(dates_by_station.get((s.id, s.kind), ()), date_range)
        if cov > threshold:
            kept.append(s.id)
    return kept


def _fmt_num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(x)


def _fmt_tenths(x: float | None) -> str:
    return "" if x is None else _fmt_num(x * 10.0)


def write_tp_csv(records: Iterable[DailyEnvRecord], stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(TP_HEADER)
    for r in records:
        tavg = _fmt_tenths(r.tavg)
        if (r.tavg is not None and r.tmax is not None and r.tmin is not None
                and r.tavg == (r.tmax + r.tmin) / 2.0):
            # The parser recomputes this exact midpoint; omitting it keeps
            # the round trip bit-identical (tenths quantization is lossy).
            tavg = ""
        w.writerow([r.station_id, r.date.isoformat(), _fmt_tenths(r.tmax),
                    _fmt_tenths(r.tmin), tavg, _fmt_tenths(r.prcp)])


def write_wind_csv(records: Iterable[DailyEnvRecord], stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(WIND_SPEED_HEADER)
    for r in records:
        w.writerow([r.station_id, r.date.isoformat(), _fmt_num(r.wind_speed)])


def write_fuel_csv(records: Iterable[DailyEnvRecord], stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(FUEL_HEADER)
    for r in records:
        w.writerow([r.station_id, r.date.isoformat(), r.fuel_class.value, _fmt_num(r.fmc)])


def write_fire_csv(events: Iterable[FireEvent], stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(FIRE_HEADER)
    for e in events:
        w.writerow([
            e.event_id,
            e.start_date.isoformat(),
            e.end_date.isoformat() if e.end_date else "",
            _fmt_num(e.size_acres),
            _fmt_num(e.location.lat),
            _fmt_num(e.location.lon),
            e.reported_state or "",
            e.reported_county or "",
        ])


def write_stations_csv(stations: Iterable[Station], stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(STATION_HEADER)
    for s in stations:
        w.writerow([s.id, s.kind.value, _fmt_num(s.location.lat), _fmt_num(s.location.lon)])


def write_rejects_csv(rejects: Iterable[tuple[str, int, str]], stream: IO[str]) -> None:
    """Write the reject report; rows are (file, row, reason)."""
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["file", "row", "reason"])
    for file, row, reason in rejects:
        w.writerow([file, row, reason])
