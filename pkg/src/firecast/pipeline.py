"""Composition of the build steps: clean, filter, fill, assign, locate,
aggregate, and join. Used by the CLI and by test harnesses that need the
same path without going through files."""

from __future__ import annotations

import dataclasses
import datetime as dt
from dataclasses import dataclass

from . import dataset, geo, ingest


@dataclass
class BuildOutput:
    rows: list[dataset.JoinedDailyRecord]
    dropped: int
    date_range: tuple[dt.date, dt.date]
    assignments: list[geo.SiteAssignment]
    events: list[ingest.FireEvent]
    temp_rejected: int
    fips_conflicts: int
    fips_fallbacks: int
    tp_stations_total: int
    tp_stations_kept: int
    fuel_stations_filled: int


def run_build(
    tp_records: list[ingest.DailyEnvRecord],
    wind_records: list[ingest.DailyEnvRecord],
    fuel_records: list[ingest.DailyEnvRecord],
    fire_events: list[ingest.FireEvent],
    stations: list[geo.Station],
    units: list[geo.FipsUnit],
    date_range: tuple[dt.date, dt.date] | None = None,
    coverage_threshold: float = 0.5,
) -> BuildOutput:
    """Assemble the joined table from cleaned canonical records.

    ``date_range`` defaults to the span of the TP records. The coverage
    filter applies to TP stations; fuel stations participate only if they
    have at least one live record to fill from.
    """
    if date_range is None:
        if not tp_records:
            raise ValueError("no TP records and no explicit date range")
        date_range = (min(r.date for r in tp_records), max(r.date for r in tp_records))

    tp_clean, temp_rejected = ingest.clean_temperature(tp_records)

    tp_stations = [s for s in stations if s.kind == geo.StationKind.TP]
    kept_ids = set(ingest.filter_coverage(tp_stations, tp_clean, date_range, coverage_threshold))
    tp_kept = [r for r in tp_clean if r.station_id in kept_ids]

    fuel_series = dataset.forward_fill_all(fuel_records, date_range)

    usable = (
        [s for s in tp_stations if s.id in kept_ids]
        + [s for s in stations if s.kind == geo.StationKind.WIND]
        + [s for s in stations if s.kind == geo.StationKind.FUEL and s.id in fuel_series]
    )
    assignments = geo.assign_stations(units, usable)

    conflicts = 0
    fallbacks = 0
    located_events = []
    for event in fire_events:
        event = dataset.impute_end_date(event)
        located = geo.locate_fips(event.location, units)
        if located.fallback:
            fallbacks += 1
        try:
            final, conflict = geo.reconcile_fips(located.code, event.reported_state,
                                                 event.reported_county)
        except geo.InvalidReportedCode:
            final, conflict = located.code, False
        if conflict:
            conflicts += 1
        located_events.append(dataclasses.replace(event, fips=final, fips_conflict=conflict))

    aggregates = dataset.daily_fire_sum(located_events)
    result = dataset.build_joined_table(
        units, assignments, tp_kept, wind_records, fuel_series, aggregates, date_range,
    )
    return BuildOutput(
        rows=result.rows,
        dropped=result.dropped,
        date_range=date_range,
        assignments=assignments,
        events=located_events,
        temp_rejected=temp_rejected,
        fips_conflicts=conflicts,
        fips_fallbacks=fallbacks,
        tp_stations_total=len(tp_stations),
        tp_stations_kept=len(kept_ids),
        fuel_stations_filled=len(fuel_series),
    )
