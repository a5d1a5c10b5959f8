"""Acceptance suite: one test per criterion, each printing a PASS line
(run with -s or -rP to see them). The heavy criteria share the session-
scoped seed-42 corpus (200 units x 3 years) built through the real
parse/clean/join pipeline.
"""

import asyncio
import datetime as dt
import json
import signal
import socket
import subprocess
import sys
import time

import numpy as np
import pytest

from firecast import dataset, ml
from firecast.dataset import FEATURE_NAMES
from firecast.geo import GeoPoint
from firecast.ingest import FireEvent
from conftest import corpus_records
from test_dataset import _window_oracle, _random_table
from test_ml_tree import exhaustive_best_split, oracle_boost_predict, tree_sse

D = dt.date


@pytest.fixture(scope="module")
def gbr150(windows42):
    """Paper-default GBR (150 trees, lr 0.01, depth 7) on the seed-42
    corpus with a fixed holdout; shared by criteria 3 and 5."""
    X, y = windows42
    X_tr, X_te, y_tr, y_te = ml.train_test_split(X, y, test_fraction=0.2, seed=0)
    model = ml.fit_gbr(X_tr, y_tr, n_estimators=150, learning_rate=0.01, max_depth=7,
                       feature_names=FEATURE_NAMES)
    return model, X_tr, X_te, y_tr, y_te


def test_criterion_1_split_optimality_oracle():
    start = time.monotonic()
    rng = np.random.default_rng(1001)
    for _ in range(200):
        n = int(rng.integers(4, 51))
        X = rng.uniform(0.0, 10.0, size=(n, 3))
        y = rng.uniform(0.0, 10.0, size=n)
        tree = ml.fit_tree(X, y, max_depth=1)
        oracle = exhaustive_best_split(X, y)
        assert oracle is not None
        assert abs(tree_sse(tree, X, y) - oracle[0]) <= 1e-9
    elapsed = time.monotonic() - start
    assert elapsed < 30.0
    print(f"PASS criterion 1: depth-1 split SSE equals exhaustive oracle on "
          f"200 datasets ({elapsed:.1f}s)")


def test_criterion_2_boosting_oracle():
    rng = np.random.default_rng(1002)
    X = rng.uniform(0.0, 10.0, size=(12, 3))
    y = rng.uniform(0.0, 40.0, size=12)
    configs = [(1, 1.0, 1), (3, 0.5, 2), (5, 0.3, 2), (4, 1.0, 1)]
    for n_estimators, lr, depth in configs:
        model = ml.fit_gbr(X, y, n_estimators=n_estimators, learning_rate=lr, max_depth=depth)
        expected = oracle_boost_predict(X, y, X, n_estimators, lr, depth)
        assert np.max(np.abs(model.predict(X) - expected)) <= 1e-9
    print(f"PASS criterion 2: boosting matches hand-rolled residual oracle "
          f"for {len(configs)} configs on the 12-sample fixture")


def test_criterion_3_monotone_training_loss(gbr150):
    model, _, _, y_tr, _ = gbr150
    sse = model.stage_train_sse
    assert len(sse) == 150
    violations = [(i, a, b) for i, (a, b) in enumerate(zip(sse, sse[1:])) if b > a]
    assert violations == []
    print(f"PASS criterion 3: training SSE non-increasing across all 150 stages "
          f"({sse[0]:.3g} -> {sse[-1]:.3g})")


def test_criterion_4_window_trend(joined42):
    start = time.monotonic()
    scores = {}
    for w in (21, 1):
        samples = dataset.window_aggregate(joined42, w=w, stride=w)
        X, y = dataset.to_matrix(samples)
        X_tr, X_te, y_tr, y_te = ml.train_test_split(X, y, test_fraction=0.2, seed=0)
        model = ml.fit_gbr(X_tr, y_tr, n_estimators=60, learning_rate=0.1, max_depth=5)
        scores[w] = ml.r2_score(y_te, model.predict(X_te))
    elapsed = time.monotonic() - start
    assert scores[21] - scores[1] >= 0.05
    assert elapsed < 300.0
    print(f"PASS criterion 4: held-out R2 w=21 ({scores[21]:.3f}) exceeds w=1 "
          f"({scores[1]:.3f}) by {scores[21] - scores[1]:.3f} ({elapsed:.0f}s)")


def test_criterion_5_gbr_beats_linear(gbr150):
    model, X_tr, X_te, y_tr, y_te = gbr150
    r2_gbr = ml.r2_score(y_te, model.predict(X_te))
    linear = ml.fit_linear(X_tr, y_tr)
    r2_lin = ml.r2_score(y_te, linear.predict(X_te))
    assert r2_gbr > r2_lin
    print(f"PASS criterion 5: GBR R2 {r2_gbr:.3f} strictly exceeds linear {r2_lin:.3f}")


def test_criterion_6_conservation():
    rng = np.random.default_rng(1006)
    worst = 0.0
    for _ in range(1000):
        n_events = int(rng.integers(1, 30))
        events = []
        for i in range(n_events):
            start = D(2000, 1, 1) + dt.timedelta(days=int(rng.integers(0, 350)))
            end = start + dt.timedelta(days=int(rng.integers(0, 12)))
            events.append(FireEvent(
                event_id=f"E{i}", start_date=start, end_date=end,
                size_acres=float(rng.lognormal(2.0, 1.5)),
                location=GeoPoint(35.0, -100.0),
                fips=f"{int(rng.integers(1, 8)):05d}",
            ))
        out = dataset.daily_fire_sum(events)
        total = sum(a.fire_size_day_sum for a in out)
        expected = sum(e.size_acres for e in events)
        rel = abs(total - expected) / expected
        worst = max(worst, rel)
        assert rel <= 1e-6
    print(f"PASS criterion 6: acres conserved across 1000 event sets "
          f"(worst relative error {worst:.2e})")


def test_criterion_7_forward_fill_totality(corpus42):
    tp, wind, fuel, fires, stations = corpus_records(corpus42)
    live = dataset.select_live_fuel(fuel)
    series = dataset.forward_fill_all(live, (corpus42.start, corpus42.end))
    n_days = (corpus42.end - corpus42.start).days + 1
    fuel_station_ids = {r.station_id for r in live}
    assert set(series) == fuel_station_ids
    by_station = {}
    for r in sorted(live, key=lambda r: r.date):
        by_station.setdefault(r.station_id, []).append(r)
    for sid, filled in series.items():
        assert len(filled) == n_days
        # day-by-day oracle: carry the latest record value forward
        recs = {r.date: r.fmc for r in by_station[sid]}
        first_day = min(recs)
        carry = recs[first_day]
        day = corpus42.start
        while day <= corpus42.end:
            if day in recs:
                carry = recs[day]
            expected = recs[first_day] if day < first_day else carry
            assert filled[day] == expected, (sid, day)
            day += dt.timedelta(days=1)
    print(f"PASS criterion 7: forward fill total over {len(series)} stations x "
          f"{n_days} days, exact match to the day-by-day oracle")


def test_criterion_8_window_oracle():
    rng = np.random.default_rng(1008)
    for i in range(50):
        w = int(rng.integers(1, 25))
        stride = int(rng.integers(1, 25))
        rows = _random_table(rng, n_fips=int(rng.integers(1, 4)),
                             n_days=int(rng.integers(w, 80)),
                             missing=float(rng.uniform(0, 0.15)))
        got = dataset.window_aggregate(rows, w=w, stride=stride)
        want = _window_oracle(rows, w, stride)
        assert len(got) == len(want)
        for s, (fips, end, feats, y) in zip(got, want):
            assert s.fips == fips and s.window_end_date == end
            assert np.max(np.abs(np.array(s.x) - np.array(feats))) <= 1e-12
            assert abs(s.y - y) <= 1e-12
    print("PASS criterion 8: window aggregation equals naive per-window oracle "
          "on 50 random tables (1e-12)")


@pytest.fixture(scope="module")
def e2e(tmp_path_factory):
    """synth -> ingest -> build -> train -> predict through the CLI."""
    from firecast.cli import main

    tmp = tmp_path_factory.mktemp("acceptance_e2e")
    corpus_dir = tmp / "corpus"
    assert main(["synth", "--seed", "42", "--units", "12", "--days", "400",
                 "--out", str(corpus_dir)]) == 0
    canonical = tmp / "canonical"
    assert main(["ingest", "--raw-dir", str(corpus_dir / "raw"),
                 "--out-dir", str(canonical)]) == 0
    joined = tmp / "joined.csv"
    assert main(["build", "--canonical-dir", str(canonical),
                 "--counties", str(corpus_dir / "counties.geojson"),
                 "--out", str(joined)]) == 0
    model = tmp / "model.json"
    assert main(["train", "--joined", str(joined), "--window", "21", "--model", "gbr",
                 "--n-estimators", "20", "--learning-rate", "0.1", "--max-depth", "4",
                 "--out", str(model)]) == 0
    prediction = tmp / "prediction.json"
    assert main(["predict", "--model-path", str(model),
                 "--locations", str(corpus_dir / "locations.csv"),
                 "--joined", str(joined),
                 "--counties", str(corpus_dir / "counties.geojson"),
                 "--fixtures", str(corpus_dir / "fixtures"),
                 "--now", "2021-04-01T00:00:00Z",
                 "--out", str(prediction)]) == 0
    return tmp, corpus_dir, canonical, joined, model, prediction


def test_criterion_9_schema(e2e):
    _, _, _, joined, _, _ = e2e
    with open(joined, "rb") as f:
        header = f.readline().rstrip(b"\n")
    assert header == b"fips,longitude,latitude,date,wind,tmax,tmin,tavg,fmc,prcp,fire_size_day_sum"
    print("PASS criterion 9: joined-table header is byte-exact")


def test_criterion_10_size_classes():
    assert ml.classify_fire_size(0.1) == "A"
    assert ml.classify_fire_size(500) == "E"
    assert ml.classify_fire_size(6000) == "G"
    rng = np.random.default_rng(1010)
    acres = np.sort(np.concatenate([
        rng.uniform(0, 10000, size=60_000),
        rng.lognormal(3, 2, size=40_000),
    ]))
    letters = [ml.classify_fire_size(float(a)) for a in acres]
    assert all(a <= b for a, b in zip(letters, letters[1:]))
    assert set(letters) <= set("ABCDEFG")
    print("PASS criterion 10: class mapping exact; total and monotone over "
          "100000 random inputs")


def test_criterion_11_determinism(e2e, tmp_path):
    from firecast.cli import main

    tmp, corpus_dir, _, joined, model, prediction = e2e
    runs = [prediction.read_bytes()]
    for i in range(2):
        out = tmp_path / f"rerun{i}.json"
        assert main(["predict", "--model-path", str(model),
                     "--locations", str(corpus_dir / "locations.csv"),
                     "--joined", str(joined),
                     "--counties", str(corpus_dir / "counties.geojson"),
                     "--fixtures", str(corpus_dir / "fixtures"),
                     "--now", "2021-04-01T00:00:00Z",
                     "--out", str(out)]) == 0
        runs.append(out.read_bytes())
    assert runs[0] == runs[1] == runs[2]

    loaded = ml.load_model(model)
    original = ml.load_model(model)  # independent handle
    rng = np.random.default_rng(1011)
    q = rng.uniform(-5, 50, size=(100, len(FEATURE_NAMES)))
    assert np.max(np.abs(loaded.predict(q) - original.predict(q))) == 0.0

    # round trip through a fresh save
    saved = tmp_path / "resaved.json"
    ml.save_model(loaded, saved)
    resaved = ml.load_model(saved)
    assert np.max(np.abs(loaded.predict(q) - resaved.predict(q))) <= 1e-12
    print("PASS criterion 11: prediction artifacts byte-identical across 3 runs; "
          "save/load round trip predicts identically")


def _free_port() -> int:
    s = socket.socket()
    s.bind(("127.0.0.1", 0))
    port = s.getsockname()[1]
    s.close()
    return port


async def _drive_socket(port: int) -> dict:
    import aiohttp

    results = {}
    async with aiohttp.ClientSession() as session:
        for _ in range(100):
            try:
                async with session.get(f"http://127.0.0.1:{port}/healthz") as resp:
                    if resp.status == 200 and (await resp.text()) == "ok":
                        break
            except aiohttp.ClientError:
                pass
            await asyncio.sleep(0.1)
        else:
            raise RuntimeError("service did not become healthy")

        async with session.get(f"http://127.0.0.1:{port}/counties.geojson") as resp:
            geo = await resp.json(content_type=None)
            results["n_counties"] = len(geo["features"])

        async with session.ws_connect(f"ws://127.0.0.1:{port}/ws") as ws:
            await ws.send_str(json.dumps({"op": "set_date", "date": "2015-08-01"}))
            choro = json.loads((await ws.receive()).data)
            fires = json.loads((await ws.receive()).data)
            results["choropleth"] = choro
            results["fires"] = fires
            await ws.send_str(json.dumps({"op": "set_layer", "layer": "realtime_prediction"}))
            rt = json.loads((await ws.receive()).data)
            mode = json.loads((await ws.receive()).data)
            results["realtime"] = rt
            results["mode"] = mode
    return results


def test_criterion_12_end_to_end(e2e):
    tmp, corpus_dir, canonical, joined, model, prediction = e2e
    port = _free_port()
    proc = subprocess.Popen(
        [sys.executable, "-m", "firecast.cli", "serve", "--port", str(port),
         "--data-dir", str(tmp),
         "--counties", str(corpus_dir / "counties.geojson"),
         "--joined", str(joined),
         "--fires", str(canonical / "fires.csv"),
         "--model-path", str(model),
         "--prediction-artifact", str(prediction)],
        stdout=subprocess.PIPE, stderr=subprocess.STDOUT,
    )
    try:
        results = asyncio.run(_drive_socket(port))
    finally:
        proc.send_signal(signal.SIGINT)
        rc = proc.wait(timeout=15)

    choro = results["choropleth"]
    assert choro["type"] == "choropleth"
    assert choro["layer"] == "temperature"
    assert choro["date"] == "2015-08-01"
    assert choro["values"] and all(len(k) == 5 for k in choro["values"])
    assert choro["min"] == min(choro["values"].values())
    assert choro["max"] == max(choro["values"].values())
    assert choro["unit"] == "°C"
    assert results["fires"]["type"] == "fires"
    assert results["realtime"]["layer"] == "realtime_prediction"
    assert results["realtime"]["classes"]
    assert results["mode"] == {"type": "mode", "controls_disabled": True}
    assert results["n_counties"] == 12
    assert rc == 0
    print("PASS criterion 12: synth->ingest->build->train->predict->serve; socket "
          "client got a temperature choropleth and a controls-disabled mode frame")
