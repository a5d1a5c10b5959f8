"""Operator entry point: ingest, build, train, sweep, predict, serve, and
synthetic-corpus generation.

Every command writes a run manifest recording its config plus content
digests of inputs and outputs. Exit codes: 0 success, 1 internal error,
2 usage or input error. Flags may also be supplied through an optional
``--config`` file of key=value lines (flag names with underscores); flags
given on the command line take precedence.
"""

from __future__ import annotations

import argparse
import datetime as dt
import hashlib
import json
import sys
import time
import traceback
from pathlib import Path

from . import dataset, geo, ingest, ml, pipeline, realtime, synth
from .service import ServiceConfig, serve


DAEMON_INTERVAL_S = 86_400


class UsageError(Exception):
    """Operator input problem; exits 2."""


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(path: Path, command: str, args: argparse.Namespace,
                    inputs: list[Path], outputs: list[Path], seconds: float) -> None:
    config = {
        k: (str(v) if isinstance(v, Path) else v)
        for k, v in vars(args).items()
        if k not in ("func", "config") and not callable(v)
    }
    doc = {
        "command": command,
        "config": config,
        "inputs": {str(p): _sha256(p) for p in sorted(inputs)},
        "outputs": {str(p): _sha256(p) for p in sorted(outputs)},
        "timings": {"seconds": seconds},
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


def _require_file(path: Path) -> Path:
    if not path.is_file():
        raise UsageError(f"file not found: {path}")
    return path


def _require_dir(path: Path) -> Path:
    if not path.is_dir():
        raise UsageError(f"directory not found: {path}")
    return path


def _parse_range(text: str) -> tuple[dt.date, dt.date]:
    try:
        a, b = text.split("..")
        lo, hi = dt.date.fromisoformat(a), dt.date.fromisoformat(b)
    except ValueError:
        raise UsageError(f"range must be YYYY-MM-DD..YYYY-MM-DD, got {text!r}") from None
    if hi < lo:
        raise UsageError(f"range end before start: {text!r}")
    return lo, hi


# ---------------------------------------------------------------- synth


def cmd_synth(args) -> int:
    t0 = time.monotonic()
    out = Path(args.out)
    corpus = synth.generate_synthetic_corpus(
        seed=args.seed, n_units=args.units, n_days=args.days, noise=args.noise,
    )
    paths = synth.write_corpus(corpus, out)
    _write_manifest(out / "manifest.json", "synth", args, [], paths, time.monotonic() - t0)
    print(f"synth: {args.units} units x {args.days} days -> {out} "
          f"({len(corpus.fire_rows)} fire events)")
    return 0


# --------------------------------------------------------------- ingest

RAW_FILES = ["tp.csv", "wind.csv", "fuel.csv", "fires.csv", "stations.csv"]


def cmd_ingest(args) -> int:
    t0 = time.monotonic()
    raw_dir = _require_dir(Path(args.raw_dir))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    inputs = [_require_file(raw_dir / name) for name in RAW_FILES]
    all_rejects: list[tuple[str, int, str]] = []

    def run(name, parser, writer):
        # errors="replace" keeps parsing total: undecodable bytes become
        # per-row rejects instead of a crash
        with open(raw_dir / name, encoding="utf-8", errors="replace", newline="") as f:
            parsed, rejects = parser(f)
        all_rejects.extend((name, r.row, r.reason) for r in rejects)
        with open(out_dir / name, "w", encoding="utf-8", newline="") as f:
            writer(parsed, f)
        return parsed

    tp = run("tp.csv", ingest.parse_tp_csv, ingest.write_tp_csv)
    wind = run("wind.csv", ingest.parse_wind_csv, ingest.write_wind_csv)
    fuel = run("fuel.csv", ingest.parse_fuel_csv, ingest.write_fuel_csv)
    fires = run("fires.csv", ingest.parse_fire_csv, ingest.write_fire_csv)
    stations = run("stations.csv", ingest.parse_stations_csv, ingest.write_stations_csv)

    rejects_path = out_dir / "rejects.csv"
    with open(rejects_path, "w", encoding="utf-8", newline="") as f:
        ingest.write_rejects_csv(all_rejects, f)

    outputs = [out_dir / name for name in RAW_FILES] + [rejects_path]
    _write_manifest(out_dir / "manifest.json", "ingest", args, inputs, outputs,
                    time.monotonic() - t0)
    print(f"ingest: {len(tp)} tp, {len(wind)} wind, {len(fuel)} fuel, "
          f"{len(fires)} fire, {len(stations)} station records; "
          f"{len(all_rejects)} rejects -> {out_dir}")
    return 0


# ---------------------------------------------------------------- build


def cmd_build(args) -> int:
    t0 = time.monotonic()
    canonical = _require_dir(Path(args.canonical_dir))
    counties_path = _require_file(Path(args.counties))
    out_path = Path(args.out)

    def parse(name, parser):
        with open(_require_file(canonical / name), encoding="utf-8", newline="") as f:
            parsed, rejects = parser(f)
        if rejects:
            raise UsageError(f"{name}: {len(rejects)} malformed rows; run ingest first")
        return parsed

    tp = parse("tp.csv", ingest.parse_tp_csv)
    wind = parse("wind.csv", ingest.parse_wind_csv)
    fuel = parse("fuel.csv", ingest.parse_fuel_csv)
    fires = parse("fires.csv", ingest.parse_fire_csv)
    stations = parse("stations.csv", ingest.parse_stations_csv)

    date_range = _parse_range(args.range) if args.range else None
    units = geo.load_counties(counties_path)
    try:
        built = pipeline.run_build(
            tp, wind, fuel, fires, stations, units,
            date_range=date_range, coverage_threshold=args.coverage_threshold,
        )
    except ValueError as e:
        raise UsageError(str(e)) from None

    with open(out_path, "w", encoding="utf-8", newline="") as f:
        dataset.write_joined_csv(built.rows, f)

    stats = {
        "range": [built.date_range[0].isoformat(), built.date_range[1].isoformat()],
        "units": len(units),
        "rows": len(built.rows),
        "rows_dropped": built.dropped,
        "temperature_records_rejected": built.temp_rejected,
        "fire_events": len(built.events),
        "fips_conflicts": built.fips_conflicts,
        "fips_fallbacks": built.fips_fallbacks,
        "tp_stations_total": built.tp_stations_total,
        "tp_stations_kept": built.tp_stations_kept,
        "fuel_stations_filled": built.fuel_stations_filled,
        "mean_distance_km": {
            kind.value: (
                sum(a.distances_km[kind] for a in built.assignments) / len(built.assignments)
                if built.assignments and kind in built.assignments[0].distances_km else None
            )
            for kind in geo.StationKind
        },
    }
    stats_path = out_path.with_name(out_path.name + ".stats.json")
    with open(stats_path, "w", encoding="utf-8") as f:
        json.dump(stats, f, indent=2, sort_keys=True)
        f.write("\n")

    inputs = [canonical / n for n in RAW_FILES] + [counties_path]
    _write_manifest(out_path.with_name(out_path.name + ".manifest.json"), "build",
                    args, inputs, [out_path, stats_path], time.monotonic() - t0)
    print(f"build: {len(built.rows)} rows ({built.dropped} dropped), "
          f"{built.fips_conflicts} fips conflicts -> {out_path}")
    return 0


# ---------------------------------------------------------------- train


def _load_joined(path: Path) -> list[dataset.JoinedDailyRecord]:
    with open(_require_file(path), encoding="utf-8", newline="") as f:
        return dataset.read_joined_csv(f)


def _fit_model(args, X, y):
    names = dataset.FEATURE_NAMES
    if args.model == "gbr":
        return ml.fit_gbr(
            X, y, n_estimators=args.n_estimators, learning_rate=args.learning_rate,
            max_depth=args.max_depth, min_samples_leaf=args.min_samples_leaf,
            feature_names=names,
        ), {
            "n_estimators": args.n_estimators, "learning_rate": args.learning_rate,
            "max_depth": args.max_depth, "min_samples_leaf": args.min_samples_leaf,
        }
    if args.model == "linear":
        return ml.fit_linear(X, y, feature_names=names), {}
    if args.model == "knn":
        return ml.fit_knn(X, y, k=args.k, feature_names=names), {"k": args.k}
    if args.model == "forest":
        return ml.fit_random_forest(
            X, y, n_trees=args.n_trees, max_depth=args.max_depth,
            min_samples_leaf=args.min_samples_leaf, seed=args.seed,
            bootstrap=args.bootstrap, feature_names=names,
        ), {
            "n_trees": args.n_trees, "max_depth": args.max_depth,
            "min_samples_leaf": args.min_samples_leaf, "seed": args.seed,
            "bootstrap": args.bootstrap,
        }
    raise UsageError(f"unknown model {args.model!r}")


def cmd_train(args) -> int:
    t0 = time.monotonic()
    rows = _load_joined(Path(args.joined))
    stride = args.stride if args.stride is not None else args.window
    samples = dataset.window_aggregate(rows, w=args.window, stride=stride)
    if len(samples) < 4:
        raise UsageError(f"only {len(samples)} window samples; need at least 4")
    X, y = dataset.to_matrix(samples)
    X_tr, X_te, y_tr, y_te = ml.train_test_split(X, y, test_fraction=args.test_fraction,
                                                 seed=args.seed)
    model, hyper = _fit_model(args, X_tr, y_tr)
    r2 = ml.r2_score(y_te, model.predict(X_te))
    report = ml.EvalReport(
        model=args.model, hyperparameters=hyper, r2=r2,
        train_size=len(y_tr), test_size=len(y_te), seed=args.seed,
    )

    out_path = Path(args.out)
    ml.save_model(model, out_path)
    report_path = Path(args.report) if args.report else out_path.with_name(out_path.name + ".report.csv")
    with open(report_path, "w", encoding="utf-8", newline="") as f:
        import csv as _csv

        w = _csv.writer(f, lineterminator="\n")
        w.writerow(["key", "value"])
        w.writerows(report.rows())

    outputs = [out_path, report_path]
    if args.windows_out:
        windows_path = Path(args.windows_out)
        with open(windows_path, "w", encoding="utf-8", newline="") as f:
            dataset.write_window_csv(samples, f)
        outputs.append(windows_path)

    _write_manifest(out_path.with_name(out_path.name + ".manifest.json"), "train",
                    args, [Path(args.joined)], outputs, time.monotonic() - t0)
    print(f"train: {args.model} on {len(y_tr)}/{len(y_te)} samples, "
          f"holdout r2 = {r2:.4f} -> {out_path}")
    return 0


# ---------------------------------------------------------------- sweep


def _int_list(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p != ""]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def cmd_sweep(args) -> int:
    t0 = time.monotonic()
    rows = _load_joined(Path(args.joined))
    if args.sweep == "window":
        w_list = _int_list(args.w_list) if args.w_list else list(range(1, 22))
        pairs = ml.sweep_window(
            rows, w_list, stride=args.stride, test_fraction=args.test_fraction,
            seed=args.seed, n_estimators=args.n_estimators,
            learning_rate=args.learning_rate, max_depth=args.max_depth,
            min_samples_leaf=args.min_samples_leaf,
        )
    else:
        depth_list = _int_list(args.depth_list) if args.depth_list else [1, 3, 5, 7, 9]
        stride = args.stride if args.stride is not None else args.window
        samples = dataset.window_aggregate(rows, w=args.window, stride=stride)
        X, y = dataset.to_matrix(samples)
        pairs = ml.sweep_depth(
            X, y, depth_list, test_fraction=args.test_fraction, seed=args.seed,
            n_estimators=args.n_estimators, learning_rate=args.learning_rate,
            min_samples_leaf=args.min_samples_leaf,
        )
    out_path = Path(args.out)
    with open(out_path, "w", encoding="utf-8", newline="") as f:
        ml.write_sweep_csv(pairs, f)
    _write_manifest(out_path.with_name(out_path.name + ".manifest.json"), "sweep",
                    args, [Path(args.joined)], [out_path], time.monotonic() - t0)
    best = max(pairs, key=lambda p: p[1])
    print(f"sweep {args.sweep}: best parameter {best[0]} (r2 = {best[1]:.4f}) -> {out_path}")
    return 0


# -------------------------------------------------------------- predict


def cmd_predict(args) -> int:
    t0 = time.monotonic()
    model_path = _require_file(Path(args.model_path))
    locations_path = _require_file(Path(args.locations))
    joined = _load_joined(Path(args.joined))
    units = geo.load_counties(_require_file(Path(args.counties)))
    units_by_code = {u.code: u for u in units}

    if args.fixtures:
        fixtures = _require_dir(Path(args.fixtures))
        weather = realtime.FixtureWeatherProvider(fixtures)
        geocoder = realtime.FixtureGeocodeProvider(fixtures)
        meta_path = fixtures / "meta.json"
        default_anchor = None
        if meta_path.is_file():
            with open(meta_path, encoding="utf-8") as f:
                default_anchor = dt.date.fromisoformat(json.load(f)["anchor"])
    else:
        weather = realtime.HttpWeatherProvider()
        geocoder = None
        default_anchor = None

    if args.anchor:
        anchor = dt.date.fromisoformat(args.anchor)
    elif default_anchor is not None:
        anchor = default_anchor
    else:
        anchor = dt.date.today()

    clock = None
    if args.now:
        fixed = dt.datetime.fromisoformat(args.now.replace("Z", "+00:00"))
        clock = lambda: fixed  # noqa: E731

    with open(locations_path, encoding="utf-8", newline="") as f:
        entries = realtime.parse_locations_csv(f)
    fuel_latest = realtime.latest_fmc_by_fips(joined)
    locations, pre_skipped = realtime.resolve_locations(entries, geocoder, units, fuel_latest)

    out_path = Path(args.out)
    while True:
        artifact = realtime.run_daily_job(
            locations, model_path, weather, out_path, anchor, units_by_code,
            pre_skipped=pre_skipped, clock=clock, parallelism=args.parallelism,
        )
        _write_manifest(out_path.with_name(out_path.name + ".manifest.json"), "predict",
                        args, [model_path, locations_path, Path(args.joined)], [out_path],
                        time.monotonic() - t0)
        print(f"predict: {len(artifact.rows)} locations predicted, "
              f"{len(artifact.skipped)} skipped -> {out_path}")
        if not args.daemon:
            return 0
        # demo timer mode: refresh once per day until interrupted
        try:
            time.sleep(DAEMON_INTERVAL_S)
        except KeyboardInterrupt:
            return 0


# ---------------------------------------------------------------- serve


def cmd_serve(args) -> int:
    data_dir = Path(args.data_dir)

    def resolve(name: str | None, default: str) -> Path:
        p = Path(name) if name else Path(default)
        return p if p.is_absolute() else data_dir / p

    config = ServiceConfig(
        counties_path=resolve(args.counties, "counties.geojson"),
        joined_path=resolve(args.joined, "joined.csv"),
        fires_path=resolve(args.fires, "fires.csv"),
        model_path=resolve(args.model_path, "model.json") if args.model_path or (data_dir / "model.json").is_file() else None,
        artifact_path=resolve(args.prediction_artifact, "prediction.json")
        if args.prediction_artifact or (data_dir / "prediction.json").is_file() else None,
        static_dir=Path(args.static_dir) if args.static_dir else None,
        port=args.port,
    )
    if not config.counties_path.is_file():
        raise UsageError(f"counties file not found: {config.counties_path}")
    if not config.joined_path.is_file():
        raise UsageError(f"joined table not found: {config.joined_path}")
    if not 0 < args.port < 65536:
        raise UsageError(f"invalid port: {args.port}")
    serve(config)
    return 0


# ----------------------------------------------------------------- main


def _read_config_file(path: Path) -> dict:
    """Parse key=value lines; values are coerced to bool/int/float when they
    look like one."""
    out = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if value.lower() in ("true", "false"):
            parsed: object = value.lower() == "true"
        else:
            try:
                parsed = int(value)
            except ValueError:
                try:
                    parsed = float(value)
                except ValueError:
                    parsed = value
        out[key] = parsed
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="firecast",
                                     description="wildfire burned-area pipeline and map service")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None, help="key=value config file")
        p.set_defaults(func=func)
        return p

    p = add("synth", cmd_synth, "generate a synthetic raw corpus")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--units", type=int, default=20)
    p.add_argument("--days", type=int, default=365)
    p.add_argument("--noise", type=float, default=1.0)
    p.add_argument("--out", default=None)

    p = add("ingest", cmd_ingest, "parse and validate raw CSVs into canonical records")
    p.add_argument("--raw-dir", default=None)
    p.add_argument("--out-dir", default=None)

    p = add("build", cmd_build, "assemble the joined (fips, date) table")
    p.add_argument("--canonical-dir", default=None)
    p.add_argument("--counties", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--range", default=None, help="YYYY-MM-DD..YYYY-MM-DD (default: TP record span)")
    p.add_argument("--coverage-threshold", type=float, default=0.5)

    def add_gbr_flags(p):
        p.add_argument("--n-estimators", type=int, default=150)
        p.add_argument("--learning-rate", type=float, default=0.01)
        p.add_argument("--max-depth", type=int, default=7)
        p.add_argument("--min-samples-leaf", type=int, default=1)

    p = add("train", cmd_train, "train a regressor on window samples")
    p.add_argument("--joined", default=None)
    p.add_argument("--window", type=int, default=21)
    p.add_argument("--stride", type=int, default=None)
    p.add_argument("--model", choices=["gbr", "linear", "knn", "forest"], default="gbr")
    p.add_argument("--out", default=None)
    p.add_argument("--report", default=None)
    p.add_argument("--windows-out", default=None, help="also persist the window samples CSV")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--test-fraction", type=float, default=0.2)
    add_gbr_flags(p)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--n-trees", type=int, default=100)
    p.add_argument("--bootstrap", action=argparse.BooleanOptionalAction, default=True)

    p = add("sweep", cmd_sweep, "sweep window length or tree depth")
    p.add_argument("--joined", default=None)
    p.add_argument("--sweep", choices=["window", "depth"], default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--w-list", default=None, help="comma-separated window lengths")
    p.add_argument("--depth-list", default=None, help="comma-separated depths")
    p.add_argument("--window", type=int, default=21)
    p.add_argument("--stride", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--test-fraction", type=float, default=0.2)
    add_gbr_flags(p)

    p = add("predict", cmd_predict, "run the daily prediction job")
    p.add_argument("--model-path", default=None)
    p.add_argument("--locations", default=None)
    p.add_argument("--joined", default=None)
    p.add_argument("--counties", default=None)
    p.add_argument("--fixtures", default=None, help="record/replay provider directory")
    p.add_argument("--live", action="store_true", help="use WEATHER_API_* environment")
    p.add_argument("--out", default=None)
    p.add_argument("--anchor", default=None, help="prediction anchor date (YYYY-MM-DD)")
    p.add_argument("--now", default=None, help="fixed RFC 3339 timestamp for generated_at")
    p.add_argument("--parallelism", type=int, default=4)
    p.add_argument("--daemon", action="store_true",
                   help="rerun the job every 24 h until interrupted")

    p = add("serve", cmd_serve, "serve the map backend")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--data-dir", default=".")
    p.add_argument("--counties", default=None)
    p.add_argument("--joined", default=None)
    p.add_argument("--fires", default=None)
    p.add_argument("--model-path", default=None)
    p.add_argument("--prediction-artifact", default=None)
    p.add_argument("--static-dir", default=None)

    return parser


# Required per command; satisfiable by flag or config file, enforced after
# parsing so --config can supply them.
REQUIRED_ARGS = {
    "synth": ["out"],
    "ingest": ["raw_dir", "out_dir"],
    "build": ["canonical_dir", "counties", "out"],
    "train": ["joined", "out"],
    "sweep": ["joined", "sweep", "out"],
    "predict": ["model_path", "locations", "joined", "counties", "out"],
    "serve": [],
}

INPUT_ERRORS = (
    UsageError,
    ingest.MalformedHeader,
    ml.TooFewSamples,
    ml.KTooLarge,
    ml.DegenerateTarget,
    ml.UnsupportedVersion,
    ml.CorruptModel,
    realtime.AllLocationsFailed,
    FileNotFoundError,
    NotADirectoryError,
)


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(argv)
        if getattr(args, "config", None):
            overrides = _read_config_file(_require_file(Path(args.config)))
            for key, value in overrides.items():
                flag = "--" + key.replace("_", "-")
                if flag in argv or f"--no-{key.replace('_', '-')}" in argv:
                    continue  # explicit flags win over the config file
                setattr(args, key, value)
        for name in REQUIRED_ARGS.get(args.command, []):
            if getattr(args, name, None) in (None, ""):
                raise UsageError(f"missing required --{name.replace('_', '-')} (flag or config)")
        return args.func(args)
    except INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
