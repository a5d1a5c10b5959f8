// Equirectangular fit of county geometry into an SVG viewBox. Projection
// is purely a client concern; the server sends WGS84 lon/lat.

export interface CountyShape {
  gid: string;
  name: string;
  rings: [number, number][][]; // lon/lat rings, outer and holes alike
}

export interface GeoJsonFeatureCollection {
  type: string;
  features: {
    properties: Record<string, unknown>;
    geometry: { type: string; coordinates: unknown };
  }[];
}

export function parseCounties(doc: GeoJsonFeatureCollection): CountyShape[] {
  const shapes: CountyShape[] = [];
  for (const feature of doc.features) {
    const gid = String(feature.properties["GEOID"] ?? "");
    if (!gid) continue;
    const name = String(feature.properties["NAME"] ?? gid);
    const geom = feature.geometry;
    let polygons: [number, number][][][];
    if (geom.type === "Polygon") {
      polygons = [geom.coordinates as [number, number][][]];
    } else if (geom.type === "MultiPolygon") {
      polygons = geom.coordinates as [number, number][][][];
    } else {
      continue;
    }
    shapes.push({ gid, name, rings: polygons.flat() });
  }
  return shapes;
}

export interface Projector {
  toXY(lon: number, lat: number): [number, number];
  width: number;
  height: number;
}

export function fitProjector(shapes: CountyShape[], width = 960, pad = 10): Projector {
  let minLon = Infinity, maxLon = -Infinity, minLat = Infinity, maxLat = -Infinity;
  for (const s of shapes) {
    for (const ring of s.rings) {
      for (const [lon, lat] of ring) {
        if (lon < minLon) minLon = lon;
        if (lon > maxLon) maxLon = lon;
        if (lat < minLat) minLat = lat;
        if (lat > maxLat) maxLat = lat;
      }
    }
  }
  if (!isFinite(minLon)) {
    minLon = -125; maxLon = -66; minLat = 24; maxLat = 50;
  }
  const lonSpan = Math.max(maxLon - minLon, 1e-9);
  const latSpan = Math.max(maxLat - minLat, 1e-9);
  const scale = (width - 2 * pad) / lonSpan;
  const height = Math.ceil(latSpan * scale + 2 * pad);
  return {
    width,
    height,
    toXY(lon: number, lat: number): [number, number] {
      return [pad + (lon - minLon) * scale, pad + (maxLat - lat) * scale];
    },
  };
}

export function shapePath(shape: CountyShape, proj: Projector): string {
  const parts: string[] = [];
  for (const ring of shape.rings) {
    ring.forEach(([lon, lat], i) => {
      const [x, y] = proj.toXY(lon, lat);
      parts.push(`${i === 0 ? "M" : "L"}${x.toFixed(2)},${y.toFixed(2)}`);
    });
    parts.push("Z");
  }
  return parts.join("");
}
