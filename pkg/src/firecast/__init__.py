"""firecast: county-level wildfire burned-area pipeline, regression models,
and an interactive map service.

Submodules:
    geo       FIPS units, distances, station assignment, county lookup
    ingest    raw CSV parsing, cleaning, coverage filtering
    dataset   fuel fill, fire aggregation, the joined table, window samples
    synth     deterministic synthetic corpus generator
    ml        regression suite (trees, boosting, forest, k-NN, OLS)
    realtime  provider-backed 21-day prediction windows and the daily job
    service   WebSocket map backend serving choropleth and fire frames
    cli       operator entry point (firecast <command>)
"""

__version__ = "0.1.0"
