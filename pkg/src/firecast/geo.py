"""Geographic primitives: FIPS county units, great-circle distance,
nearest-station assignment, and point-to-county resolution.

All functions here are pure and operate on immutable inputs, so they are
safe to call from any number of workers.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

EARTH_RADIUS_KM = 6371.0

_FIPS_RE = re.compile(r"^[0-9]{5}$")

# Tolerance for the point-on-edge test, in squared degrees of cross product.
_EDGE_EPS = 1e-12


class StationKind(str, Enum):
    """The three monitoring-station families."""

    TP = "tp"
    WIND = "wind"
    FUEL = "fuel"


class EmptyStationSet(ValueError):
    """No stations available for a kind that must be assigned."""

    def __init__(self, kind: StationKind):
        self.kind = kind
        super().__init__(f"no stations of kind {kind.value!r}")


class InvalidReportedCode(ValueError):
    """Reported state/county FIPS parts are present but not digit strings."""


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float

    def __post_init__(self):
        if not (math.isfinite(self.lat) and -90.0 <= self.lat <= 90.0):
            raise ValueError(f"latitude out of range: {self.lat!r}")
        if not (math.isfinite(self.lon) and -180.0 <= self.lon <= 180.0):
            raise ValueError(f"longitude out of range: {self.lon!r}")


Ring = tuple  # tuple[GeoPoint, ...], closed: first == last, >= 4 vertices


@dataclass(frozen=True)
class FipsUnit:
    """A 5-digit county geography with centroid and boundary polygon.

    ``boundary`` is a tuple of closed rings; containment is decided by
    even-odd parity over all rings, so holes and multi-part counties need
    no special casing.
    """

    code: str
    centroid: GeoPoint
    boundary: tuple[Ring, ...] = ()

    def __post_init__(self):
        if not _FIPS_RE.match(self.code):
            raise ValueError(f"not a 5-digit FIPS code: {self.code!r}")
        for ring in self.boundary:
            if len(ring) < 4:
                raise ValueError(f"ring with fewer than 4 vertices in {self.code}")
            if ring[0] != ring[-1]:
                raise ValueError(f"unclosed ring in {self.code}")

    @property
    def state_code(self) -> str:
        return self.code[:2]

    @property
    def county_code(self) -> str:
        return self.code[2:]


@dataclass(frozen=True)
class Station:
    id: str
    kind: StationKind
    location: GeoPoint
    coverage: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.coverage <= 1.0:
            raise ValueError(f"coverage out of [0,1]: {self.coverage!r}")


@dataclass(frozen=True)
class SiteAssignment:
    """Per-kind nearest station for one FIPS unit."""

    fips_code: str
    station_ids: dict[StationKind, str]
    distances_km: dict[StationKind, float]


@dataclass(frozen=True)
class LocatedFips:
    """Result of a point-to-county lookup; ``fallback`` marks the
    nearest-centroid path taken when no polygon contained the point."""

    code: str
    fallback: bool = False


def haversine_km(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in km on a sphere of radius 6371.0 km."""
    lat1, lon1, lat2, lon2 = map(math.radians, (a.lat, a.lon, b.lat, b.lon))
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def assign_stations(
    units: list[FipsUnit],
    stations: list[Station],
    kinds: list[StationKind] | None = None,
) -> list[SiteAssignment]:
    """Assign every unit its nearest station of each kind.

    ``kinds`` defaults to the kinds present in ``stations``. Distance ties
    break toward the lexicographically smallest station id, so the result
    does not depend on station input order. Output is sorted by FIPS code.
    """
    by_kind: dict[StationKind, list[Station]] = {}
    for s in stations:
        by_kind.setdefault(s.kind, []).append(s)
    if kinds is None:
        kinds = [k for k in StationKind if k in by_kind]
    for kind in kinds:
        if not by_kind.get(kind):
            raise EmptyStationSet(kind)

    out = []
    for unit in sorted(units, key=lambda u: u.code):
        ids: dict[StationKind, str] = {}
        dists: dict[StationKind, float] = {}
        for kind in kinds:
            best = min(
                by_kind[kind],
                key=lambda s: (haversine_km(unit.centroid, s.location), s.id),
            )
            ids[kind] = best.id
            dists[kind] = haversine_km(unit.centroid, best.location)
        out.append(SiteAssignment(unit.code, ids, dists))
    return out


def _on_segment(px: float, py: float, x1: float, y1: float, x2: float, y2: float) -> bool:
    if not (min(x1, x2) - 1e-12 <= px <= max(x1, x2) + 1e-12):
        return False
    if not (min(y1, y2) - 1e-12 <= py <= max(y1, y2) + 1e-12):
        return False
    cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
    return abs(cross) <= _EDGE_EPS


def point_in_unit(p: GeoPoint, unit: FipsUnit) -> bool:
    """Even-odd ray-casting containment; points on an edge count as inside."""
    px, py = p.lon, p.lat
    inside = False
    for ring in unit.boundary:
        for i in range(len(ring) - 1):
            x1, y1 = ring[i].lon, ring[i].lat
            x2, y2 = ring[i + 1].lon, ring[i + 1].lat
            if _on_segment(px, py, x1, y1, x2, y2):
                return True
            if (y1 > py) != (y2 > py):
                x_cross = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
                if x_cross == px:
                    return True
                if x_cross > px:
                    inside = not inside
    return inside


def locate_fips(p: GeoPoint, units: list[FipsUnit]) -> LocatedFips:
    """Resolve a point to a county code.

    Containing units win, lowest code first; when nothing contains the
    point, the nearest-centroid unit is returned with ``fallback`` set.
    """
    if not units:
        raise ValueError("no units to search")
    containing = [u.code for u in units if u.boundary and point_in_unit(p, u)]
    if containing:
        return LocatedFips(min(containing), fallback=False)
    nearest = min(units, key=lambda u: (haversine_km(p, u.centroid), u.code))
    return LocatedFips(nearest.code, fallback=True)


def reconcile_fips(
    located: str,
    reported_state: str | None,
    reported_county: str | None,
) -> tuple[str, bool]:
    """Merge a located code with the report's own state/county parts.

    A complete, well-formed report wins; disagreement with the located code
    is flagged. An incomplete report is ignored.
    """
    if not _FIPS_RE.match(located):
        raise ValueError(f"located code is not a valid FIPS code: {located!r}")
    if reported_state is None or reported_county is None:
        return located, False
    if not re.match(r"^[0-9]{2}$", reported_state) or not re.match(r"^[0-9]{3}$", reported_county):
        raise InvalidReportedCode(f"malformed reported FIPS parts: {reported_state!r}, {reported_county!r}")
    reported = reported_state + reported_county
    return reported, reported != located


def _ring_area_centroid(coords: list[tuple[float, float]]) -> tuple[float, float, float]:
    """Shoelace signed area and centroid of one (lon, lat) ring."""
    a = 0.0
    cx = 0.0
    cy = 0.0
    for (x1, y1), (x2, y2) in zip(coords, coords[1:]):
        w = x1 * y2 - x2 * y1
        a += w
        cx += (x1 + x2) * w
        cy += (y1 + y2) * w
    a /= 2.0
    if abs(a) < 1e-12:
        xs = [c[0] for c in coords[:-1]]
        ys = [c[1] for c in coords[:-1]]
        return sum(xs) / len(xs), sum(ys) / len(ys), 0.0
    return cx / (6.0 * a), cy / (6.0 * a), a


def _polygon_centroid(polygons: list[list[list[tuple[float, float]]]]) -> tuple[float, float]:
    """Area-weighted centroid over outer rings minus holes."""
    total = 0.0
    cx = 0.0
    cy = 0.0
    for rings in polygons:
        for i, ring in enumerate(rings):
            x, y, a = _ring_area_centroid(ring)
            w = abs(a) if i == 0 else -abs(a)
            cx += x * w
            cy += y * w
            total += w
    if abs(total) < 1e-12:
        pts = [pt for rings in polygons for ring in rings for pt in ring[:-1]]
        return (sum(p[0] for p in pts) / len(pts), sum(p[1] for p in pts) / len(pts))
    return cx / total, cy / total


def load_counties(path: str | Path) -> list[FipsUnit]:
    """Load FIPS units from a GeoJSON FeatureCollection.

    Each feature must carry a 5-digit ``GEOID`` property and a Polygon or
    MultiPolygon geometry in WGS84 lon/lat order. Centroids are computed
    from the geometry (area-weighted, holes subtracted).
    """
    with open(path, encoding="utf-8") as f:
        doc = json.load(f)
    if doc.get("type") != "FeatureCollection":
        raise ValueError(f"not a FeatureCollection: {path}")
    units = []
    for feature in doc.get("features", []):
        code = str(feature["properties"]["GEOID"])
        geom = feature["geometry"]
        if geom["type"] == "Polygon":
            polygons = [geom["coordinates"]]
        elif geom["type"] == "MultiPolygon":
            polygons = geom["coordinates"]
        else:
            raise ValueError(f"unsupported geometry {geom['type']!r} for {code}")
        polygons = [
            [[(float(x), float(y)) for x, y in ring] for ring in rings]
            for rings in polygons
        ]
        lon, lat = _polygon_centroid(polygons)
        boundary = tuple(
            tuple(GeoPoint(lat=y, lon=x) for x, y in ring)
            for rings in polygons
            for ring in rings
        )
        units.append(FipsUnit(code=code, centroid=GeoPoint(lat=lat, lon=lon), boundary=boundary))
    return units
