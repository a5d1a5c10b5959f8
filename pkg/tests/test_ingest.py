import datetime as dt
import io

import numpy as np
import pytest

from firecast.geo import GeoPoint, Station, StationKind
from firecast.ingest import (
    FIRE_HEADER,
    FUEL_HEADER,
    STATION_HEADER,
    TP_HEADER,
    WIND_SPEED_HEADER,
    WIND_UV_HEADER,
    DailyEnvRecord,
    FireEvent,
    FuelClass,
    MalformedHeader,
    clean_temperature,
    coverage_fraction,
    filter_coverage,
    parse_fire_csv,
    parse_fuel_csv,
    parse_stations_csv,
    parse_tp_csv,
    parse_wind_csv,
    wind_speed,
    write_fire_csv,
    write_fuel_csv,
    write_rejects_csv,
    write_tp_csv,
    write_wind_csv,
)
from conftest import rows_to_stream


class TestWindSpeed:
    def test_three_four_five(self):
        assert wind_speed(3, 4) == 5.0

    def test_zero(self):
        assert wind_speed(0, 0) == 0.0

    def test_sign_invariance(self):
        assert wind_speed(-3, 4) == 5.0

    def test_symmetry_property(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            u, v = rng.normal(0, 10, 2)
            s = wind_speed(u, v)
            assert s >= 0
            for su, sv in ((u, v), (-u, v), (u, -v), (-u, -v), (v, u)):
                assert wind_speed(su, sv) == pytest.approx(s, abs=1e-12)

    def test_non_finite_raises(self):
        with pytest.raises(ValueError):
            wind_speed(float("nan"), 1.0)


class TestParseTp:
    def test_tenths_conversion_and_midpoint(self):
        recs, rejects = parse_tp_csv(rows_to_stream(TP_HEADER, [("S1", "2000-07-01", 305, 150, "", 12)]))
        assert rejects == []
        (r,) = recs
        assert (r.tmax, r.tmin, r.tavg, r.prcp) == (30.5, 15.0, 22.75, 1.2)
        assert r.kind == StationKind.TP and r.date == dt.date(2000, 7, 1)

    def test_explicit_tavg_kept(self):
        recs, _ = parse_tp_csv(rows_to_stream(TP_HEADER, [("S1", "2000-07-01", 305, 150, 200, 12)]))
        assert recs[0].tavg == 20.0

    def test_invalid_month_rejected(self):
        recs, rejects = parse_tp_csv(rows_to_stream(TP_HEADER, [("S1", "2000-13-01", 305, 150, "", 12)]))
        assert recs == [] and len(rejects) == 1
        assert rejects[0].row == 2 and "month" in rejects[0].reason

    def test_empty_file_with_header(self):
        recs, rejects = parse_tp_csv(rows_to_stream(TP_HEADER, []))
        assert recs == [] and rejects == []

    def test_malformed_header(self):
        with pytest.raises(MalformedHeader):
            parse_tp_csv(io.StringIO("a,b,c\n"))
        with pytest.raises(MalformedHeader):
            parse_tp_csv(io.StringIO(""))

    def test_non_numeric_and_nan_rejected(self):
        rows = [("S1", "2000-01-01", "abc", 1, "", 0), ("S1", "2000-01-02", "nan", 1, "", 0)]
        recs, rejects = parse_tp_csv(rows_to_stream(TP_HEADER, rows))
        assert recs == [] and len(rejects) == 2

    def test_missing_temps_leave_tavg_absent(self):
        recs, _ = parse_tp_csv(rows_to_stream(TP_HEADER, [("S1", "2000-01-01", 100, "", "", 0)]))
        assert recs[0].tmax == 10.0 and recs[0].tmin is None and recs[0].tavg is None


class TestParseWind:
    def test_uv_form(self):
        recs, rejects = parse_wind_csv(rows_to_stream(WIND_UV_HEADER, [("W1", "2000-01-01", 3, 4)]))
        assert rejects == [] and recs[0].wind_speed == 5.0

    def test_speed_form_passthrough(self):
        recs, _ = parse_wind_csv(rows_to_stream(WIND_SPEED_HEADER, [("W1", "2000-01-01", 5)]))
        assert recs[0].wind_speed == 5.0

    def test_negative_speed_rejected(self):
        recs, rejects = parse_wind_csv(rows_to_stream(WIND_SPEED_HEADER, [("W1", "2000-01-01", -1)]))
        assert recs == [] and len(rejects) == 1

    def test_unknown_header(self):
        with pytest.raises(MalformedHeader):
            parse_wind_csv(io.StringIO("station_id,date,knots\n"))


class TestParseFuel:
    def test_live_case_insensitive(self):
        recs, _ = parse_fuel_csv(rows_to_stream(FUEL_HEADER, [("F1", "2000-03-15", "LIVE", 112.0)]))
        assert recs[0].fuel_class == FuelClass.LIVE and recs[0].fmc == 112.0

    def test_dead_parsed(self):
        recs, _ = parse_fuel_csv(rows_to_stream(FUEL_HEADER, [("F1", "2000-03-15", "dead", 18.0)]))
        assert recs[0].fuel_class == FuelClass.DEAD

    def test_unknown_class_rejected(self):
        recs, rejects = parse_fuel_csv(rows_to_stream(FUEL_HEADER, [("F1", "2000-03-15", "Shrub", 10)]))
        assert recs == [] and "Shrub" in rejects[0].reason

    def test_negative_fmc_rejected(self):
        _, rejects = parse_fuel_csv(rows_to_stream(FUEL_HEADER, [("F1", "2000-03-15", "live", -1)]))
        assert len(rejects) == 1


class TestParseFire:
    BASE = ("E1", "2001-08-03", "2001-08-05", 30, 37.5, -120.5, "06", "001")

    def test_parses_event(self):
        events, rejects = parse_fire_csv(rows_to_stream(FIRE_HEADER, [self.BASE]))
        assert rejects == []
        (e,) = events
        assert e.size_acres == 30 and e.end_date == dt.date(2001, 8, 5)
        assert e.reported_state == "06" and e.reported_county == "001"

    def test_duplicate_ids_collapse_to_first(self):
        rows = [self.BASE, ("E1", "2002-01-01", "", 5, 30.0, -100.0, "", "")]
        events, rejects = parse_fire_csv(rows_to_stream(FIRE_HEADER, rows))
        assert len(events) == 1 and events[0].start_date == dt.date(2001, 8, 3)
        assert rejects == []

    def test_zero_size_rejected(self):
        rows = [("E2", "2001-08-03", "", 0, 37.5, -120.5, "", "")]
        events, rejects = parse_fire_csv(rows_to_stream(FIRE_HEADER, rows))
        assert events == [] and len(rejects) == 1

    def test_end_before_start_rejected(self):
        rows = [("E3", "2001-08-03", "2001-08-01", 5, 37.5, -120.5, "", "")]
        events, rejects = parse_fire_csv(rows_to_stream(FIRE_HEADER, rows))
        assert events == [] and len(rejects) == 1

    def test_missing_end_and_report(self):
        rows = [("E4", "2001-08-03", "", 5, 37.5, -120.5, "", "")]
        events, _ = parse_fire_csv(rows_to_stream(FIRE_HEADER, rows))
        assert events[0].end_date is None and events[0].reported_state is None


class TestCleanTemperature:
    def _tp(self, **kw):
        return DailyEnvRecord("S", dt.date(2000, 1, 1), StationKind.TP, **kw)

    def test_above_range_dropped(self):
        kept, rejected = clean_temperature([self._tp(tmax=105.0)])
        assert kept == [] and rejected == 1

    def test_lower_bound_inclusive(self):
        kept, rejected = clean_temperature([self._tp(tmin=-90.0)])
        assert len(kept) == 1 and rejected == 0

    def test_upper_bound_inclusive(self):
        kept, _ = clean_temperature([self._tp(tmax=100.0)])
        assert len(kept) == 1

    def test_normal_kept(self):
        kept, _ = clean_temperature([self._tp(tmax=25.0, tmin=10.0, tavg=17.5)])
        assert len(kept) == 1

    def test_survivors_all_in_range(self):
        rng = np.random.default_rng(9)
        records = [self._tp(tmax=float(rng.uniform(-150, 150))) for _ in range(200)]
        kept, rejected = clean_temperature(records)
        assert rejected == 200 - len(kept)
        for r in kept:
            assert -90.0 <= r.tmax <= 100.0


class TestFilterCoverage:
    RANGE = (dt.date(2000, 1, 1), dt.date(2000, 1, 10))

    def _station(self, sid):
        return Station(id=sid, kind=StationKind.TP, location=GeoPoint(0, 0))

    def _records(self, sid, days):
        return [DailyEnvRecord(sid, dt.date(2000, 1, d), StationKind.TP, tmax=1.0)
                for d in days]

    def test_full_coverage_kept(self):
        kept = filter_coverage([self._station("A")], self._records("A", range(1, 11)), self.RANGE)
        assert kept == ["A"]

    def test_exactly_half_dropped(self):
        kept = filter_coverage([self._station("A")], self._records("A", range(1, 6)), self.RANGE)
        assert kept == []

    def test_six_of_ten_kept(self):
        kept = filter_coverage([self._station("A")], self._records("A", range(1, 7)), self.RANGE)
        assert kept == ["A"]  # 6/10 = 0.6, strictly above the 0.5 threshold

    def test_duplicate_dates_count_once(self):
        records = self._records("A", [1, 1, 2, 2, 3])
        assert coverage_fraction([r.date for r in records], self.RANGE) == pytest.approx(0.3)

    def test_kind_must_match(self):
        station = Station(id="A", kind=StationKind.WIND, location=GeoPoint(0, 0))
        kept = filter_coverage([station], self._records("A", range(1, 11)), self.RANGE)
        assert kept == []

    def test_threshold_validation(self):
        with pytest.raises(ValueError):
            filter_coverage([], [], self.RANGE, threshold=0.0)


class TestRoundTrip:
    def test_tp_round_trip(self):
        rng = np.random.default_rng(4)
        rows = []
        for i in range(50):
            tmax = int(rng.integers(-400, 450))
            tmin = tmax - int(rng.integers(0, 120))
            rows.append((f"S{i % 5}", (dt.date(2000, 1, 1) + dt.timedelta(days=i)).isoformat(),
                         tmax, tmin, "", int(rng.integers(0, 300))))
        records, rejects = parse_tp_csv(rows_to_stream(TP_HEADER, rows))
        assert rejects == []
        buf = io.StringIO()
        write_tp_csv(records, buf)
        buf.seek(0)
        again, rejects = parse_tp_csv(buf)
        assert rejects == [] and again == records

    def test_wind_round_trip(self):
        recs, _ = parse_wind_csv(rows_to_stream(WIND_UV_HEADER, [("W1", "2000-01-01", 3, 4),
                                                                 ("W2", "2000-01-02", 1.5, -2.5)]))
        buf = io.StringIO()
        write_wind_csv(recs, buf)
        buf.seek(0)
        again, rejects = parse_wind_csv(buf)
        assert rejects == [] and again == recs

    def test_fuel_round_trip(self):
        rows = [("F1", "2000-03-15", "live", 112.5), ("F1", "2000-04-01", "dead", 18.1)]
        recs, _ = parse_fuel_csv(rows_to_stream(FUEL_HEADER, rows))
        buf = io.StringIO()
        write_fuel_csv(recs, buf)
        buf.seek(0)
        again, rejects = parse_fuel_csv(buf)
        assert rejects == [] and again == recs

    def test_fire_round_trip(self):
        rows = [
            ("E1", "2001-08-03", "2001-08-05", 30.25, 37.5, -120.5, "06", "001"),
            ("E2", "2001-09-01", "", 5, 30.0, -100.0, "", ""),
        ]
        events, _ = parse_fire_csv(rows_to_stream(FIRE_HEADER, rows))
        buf = io.StringIO()
        write_fire_csv(events, buf)
        buf.seek(0)
        again, rejects = parse_fire_csv(buf)
        assert rejects == [] and again == events

    def test_stations_parse(self):
        rows = [("T1", "tp", 37.5, -120.0), ("W1", "wind", 38.0, -121.0), ("F1", "fuel", 36.0, -119.0)]
        stations, rejects = parse_stations_csv(rows_to_stream(STATION_HEADER, rows))
        assert rejects == []
        assert [s.kind for s in stations] == [StationKind.TP, StationKind.WIND, StationKind.FUEL]


class TestRecordValidation:
    def test_kind_field_mismatch(self):
        with pytest.raises(ValueError):
            DailyEnvRecord("S", dt.date(2000, 1, 1), StationKind.TP, wind_speed=1.0)
        with pytest.raises(ValueError):
            DailyEnvRecord("S", dt.date(2000, 1, 1), StationKind.WIND)
        with pytest.raises(ValueError):
            DailyEnvRecord("S", dt.date(2000, 1, 1), StationKind.FUEL, fmc=10.0)

    def test_fire_event_validation(self):
        with pytest.raises(ValueError):
            FireEvent("E", dt.date(2000, 1, 2), dt.date(2000, 1, 1), 5.0, GeoPoint(0, 0))
        with pytest.raises(ValueError):
            FireEvent("E", dt.date(2000, 1, 1), None, 0.0, GeoPoint(0, 0))


def test_rejects_csv_format():
    buf = io.StringIO()
    write_rejects_csv([("tp.csv", 2, "bad date"), ("wind.csv", 3, "negative wind speed: '-1'")], buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "file,row,reason"
    assert lines[1] == "tp.csv,2,bad date"


class TestParserTotality:
    def test_nul_byte_line_becomes_reject(self):
        raw = "station_id,date,fuel_class,fmc_percent\nF1,2000-03-15,live,100\nF\x002,bad\nF3,2000-03-16,live,90\n"
        records, rejects = parse_fuel_csv(io.StringIO(raw))
        assert len(records) == 2
        assert len(rejects) == 1

    def test_unbalanced_quote_does_not_crash(self):
        raw = 'station_id,date,wind_speed_ms\nW1,2000-01-01,3\n"W2,2000-01-02,4\nW3,2000-01-03,5\n'
        records, rejects = parse_wind_csv(io.StringIO(raw))
        # the stray quote swallows the rest of the stream into one field;
        # every surviving byte is either a record or a reject
        assert len(records) + len(rejects) >= 2
        assert records[0].station_id == "W1"
