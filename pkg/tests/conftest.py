"""Shared fixtures: tiny geographic fixtures and the seed-42 synthetic
corpus run through the real parse/build pipeline once per session."""

from __future__ import annotations

import csv
import io

import pytest

from firecast import dataset, ingest, pipeline, synth
from firecast.geo import FipsUnit, GeoPoint


def rows_to_stream(header, rows) -> io.StringIO:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    buf.seek(0)
    return buf


def corpus_records(corpus):
    """Parse a synthetic corpus's raw rows through the real parsers,
    asserting zero rejects."""
    tp, r1 = ingest.parse_tp_csv(rows_to_stream(ingest.TP_HEADER, corpus.tp_rows))
    wind, r2 = ingest.parse_wind_csv(rows_to_stream(ingest.WIND_UV_HEADER, corpus.wind_rows))
    fuel, r3 = ingest.parse_fuel_csv(rows_to_stream(ingest.FUEL_HEADER, corpus.fuel_rows))
    fires, r4 = ingest.parse_fire_csv(rows_to_stream(ingest.FIRE_HEADER, corpus.fire_rows))
    stations, r5 = ingest.parse_stations_csv(rows_to_stream(ingest.STATION_HEADER, corpus.station_rows))
    assert not (r1 or r2 or r3 or r4 or r5), "synthetic corpus must parse clean"
    return tp, wind, fuel, fires, stations


def corpus_joined_rows(corpus):
    tp, wind, fuel, fires, stations = corpus_records(corpus)
    return pipeline.run_build(tp, wind, fuel, fires, stations, corpus.units).rows


def square_unit(code: str, lat0: float, lon0: float, size: float = 1.0) -> FipsUnit:
    ring = (
        GeoPoint(lat0, lon0),
        GeoPoint(lat0, lon0 + size),
        GeoPoint(lat0 + size, lon0 + size),
        GeoPoint(lat0 + size, lon0),
        GeoPoint(lat0, lon0),
    )
    return FipsUnit(code=code, boundary=(ring,),
                    centroid=GeoPoint(lat0 + size / 2, lon0 + size / 2))


@pytest.fixture(scope="session")
def corpus42():
    """The acceptance corpus: seed 42, 200 units, 3 years."""
    return synth.generate_synthetic_corpus(seed=42, n_units=200, n_days=1095)


@pytest.fixture(scope="session")
def joined42(corpus42):
    return corpus_joined_rows(corpus42)


@pytest.fixture(scope="session")
def windows42(corpus42, joined42):
    samples = dataset.window_aggregate(joined42, w=21, stride=21)
    return dataset.to_matrix(samples)
