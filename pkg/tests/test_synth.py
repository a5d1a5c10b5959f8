import datetime as dt
from collections import defaultdict

import numpy as np

from firecast import dataset, ml, synth
from conftest import corpus_joined_rows


class TestDeterminism:
    def test_same_seed_identical(self):
        a = synth.generate_synthetic_corpus(seed=5, n_units=6, n_days=90)
        b = synth.generate_synthetic_corpus(seed=5, n_units=6, n_days=90)
        assert a.tp_rows == b.tp_rows
        assert a.wind_rows == b.wind_rows
        assert a.fuel_rows == b.fuel_rows
        assert a.fire_rows == b.fire_rows
        assert a.station_rows == b.station_rows
        assert a.weather_fixture == b.weather_fixture

    def test_different_seed_differs(self):
        a = synth.generate_synthetic_corpus(seed=5, n_units=6, n_days=90)
        b = synth.generate_synthetic_corpus(seed=6, n_units=6, n_days=90)
        assert a.tp_rows != b.tp_rows

    def test_write_corpus_byte_identical(self, tmp_path):
        a_dir, b_dir = tmp_path / "a", tmp_path / "b"
        synth.write_corpus(synth.generate_synthetic_corpus(seed=9, n_units=4, n_days=60), a_dir)
        synth.write_corpus(synth.generate_synthetic_corpus(seed=9, n_units=4, n_days=60), b_dir)
        for rel in ("raw/tp.csv", "raw/wind.csv", "raw/fuel.csv", "raw/fires.csv",
                    "raw/stations.csv", "counties.geojson", "locations.csv",
                    "fixtures/weather.json", "fixtures/geocode.json", "truth.json"):
            assert (a_dir / rel).read_bytes() == (b_dir / rel).read_bytes(), rel


class TestCorpusShape:
    def test_parses_clean_and_joins_dense(self):
        corpus = synth.generate_synthetic_corpus(seed=11, n_units=5, n_days=75)
        rows = corpus_joined_rows(corpus)
        assert len(rows) == 5 * 75  # full coverage after the sparse-station filter
        dates = {r.date for r in rows}
        assert min(dates) == corpus.start and max(dates) == corpus.end

    def test_range_ends_at_default_end(self):
        corpus = synth.generate_synthetic_corpus(seed=2, n_units=3, n_days=30)
        assert corpus.end == dt.date(2015, 12, 31)
        assert (corpus.end - corpus.start).days + 1 == 30

    def test_fire_sizes_positive_and_dates_in_range(self):
        corpus = synth.generate_synthetic_corpus(seed=13, n_units=6, n_days=120)
        assert corpus.fire_rows, "corpus should contain fires"
        for _, start_s, end_s, size, lat, lon, st, ct in corpus.fire_rows:
            assert size > 0
            start = dt.date.fromisoformat(start_s)
            assert corpus.start <= start <= corpus.end
            if end_s:
                assert dt.date.fromisoformat(end_s) >= start

    def test_fixtures_cover_prediction_window(self):
        corpus = synth.generate_synthetic_corpus(seed=17, n_units=8, n_days=90)
        anchor = corpus.anchor
        assert anchor == corpus.end - dt.timedelta(days=6)
        for key, per_day in corpus.weather_fixture.items():
            days = sorted(per_day)
            assert days[0] == (anchor - dt.timedelta(days=14)).isoformat()
            assert days[-1] == (anchor + dt.timedelta(days=6)).isoformat()
            assert len(days) == 21

    def test_truth_records_parameters(self):
        corpus = synth.generate_synthetic_corpus(seed=19, n_units=3, n_days=40, noise=0.5)
        assert corpus.truth["seed"] == 19 and corpus.truth["noise"] == 0.5
        assert corpus.truth["ignition_weights"] == [1.7, 1.1, 1.0]


class TestGroundTruthBehavior:
    def test_zero_weights_decouple_weather(self):
        corpus = synth.generate_synthetic_corpus(seed=42, n_units=40, n_days=365,
                                                 ignition_weights=(0, 0, 0))
        rows = corpus_joined_rows(corpus)
        X, y = dataset.to_matrix(dataset.window_aggregate(rows, 21, 21))
        X_tr, X_te, y_tr, y_te = ml.train_test_split(X, y, 0.2, seed=0)
        model = ml.fit_gbr(X_tr, y_tr, n_estimators=40, learning_rate=0.1, max_depth=4)
        assert ml.r2_score(y_te, model.predict(X_te)) < 0.05

    def test_noise_zero_monthly_correlation(self):
        corpus = synth.generate_synthetic_corpus(seed=7, n_units=40, n_days=730, noise=0.0)
        tmax_by = defaultdict(list)
        fire_by = defaultdict(float)
        for sid, iso, tmax_tenths, *_ in corpus.tp_rows:
            if not sid.endswith("X"):
                tmax_by[iso[:7]].append(tmax_tenths / 10.0)
        for _, start_s, *_rest in corpus.fire_rows:
            fire_by[start_s[:7]] += _rest[1]
        months = sorted(tmax_by)
        xs = [float(np.mean(tmax_by[m])) for m in months]
        ys = [fire_by.get(m, 0.0) for m in months]
        r = float(np.corrcoef(xs, ys)[0, 1])
        assert r > 0.3
