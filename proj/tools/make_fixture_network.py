#!/usr/bin/env python3
"""Writes tests/fixtures/network.geojson and tests/fixtures/pipeline.ini.

A synthetic footpath layer over a 4x4 block of z=21 tiles in central
Melbourne: a cross-shaped street footpath, a plaza with a courtyard hole, a
curved path, a diagonal path and two small paved patches. The shapes are
pairwise disjoint, lie inside the block and cross several tile seams.
"""

import json
import math
import pathlib

Z = 21
X0, Y0 = 1893047, 1286844  # north-west tile of the block
R = 6378137.0


def tile_lon(x):
    return x / 2**Z * 360.0 - 180.0


def tile_lat(y):
    return math.degrees(math.atan(math.sinh(math.pi * (1 - 2 * y / 2**Z))))


WEST, EAST = tile_lon(X0), tile_lon(X0 + 4)
NORTH, SOUTH = tile_lat(Y0), tile_lat(Y0 + 4)
LAT0 = (NORTH + SOUTH) / 2
LON0 = (WEST + EAST) / 2


def to_lonlat(x_m, y_m):
    """Metres east/north of the block centre to [lon, lat]."""
    lat = LAT0 + math.degrees(y_m / R)
    lon = LON0 + math.degrees(x_m / (R * math.cos(math.radians(LAT0))))
    return [round(lon, 10), round(lat, 10)]


def rotate(pts, deg, cx=0.0, cy=0.0):
    a = math.radians(deg)
    c, s = math.cos(a), math.sin(a)
    return [(cx + (x - cx) * c - (y - cy) * s, cy + (x - cx) * s + (y - cy) * c) for x, y in pts]


def ring(pts, ccw=True):
    area = sum(x0 * y1 - x1 * y0 for (x0, y0), (x1, y1) in zip(pts, pts[1:] + pts[:1]))
    if (area > 0) != ccw:
        pts = pts[::-1]
    out = [to_lonlat(x, y) for x, y in pts]
    return out + [out[0]]


def cross():
    w, h, t = 25.0, 22.0, 1.2
    pts = [(-w, -t), (-t, -t), (-t, -h), (t, -h), (t, -t), (w, -t),
           (w, t), (t, t), (t, h), (-t, h), (-t, t), (-w, t)]
    return [ring(rotate(pts, 5.0))]


def plaza():
    cx, cy = 15.0, 15.5
    outer = rotate([(cx - 6, cy - 6), (cx + 6, cy - 6), (cx + 6, cy + 6), (cx - 6, cy + 6)], 20.0, cx, cy)
    inner = rotate([(cx - 3.5, cy - 3), (cx + 3.5, cy - 3), (cx + 3.5, cy + 3), (cx - 3.5, cy + 3)], 20.0, cx, cy)
    return [ring(outer), ring(inner, ccw=False)]


def arc():
    cx, cy, r0, r1 = -26.0, -26.0, 12.0, 14.0
    angles = [math.radians(5 + 80 * i / 30) for i in range(31)]
    outer = [(cx + r1 * math.cos(a), cy + r1 * math.sin(a)) for a in angles]
    inner = [(cx + r0 * math.cos(a), cy + r0 * math.sin(a)) for a in reversed(angles)]
    return [ring(outer + inner)]


def diagonal():
    (x0, y0), (x1, y1), half = (-23.0, 7.0), (-8.0, 22.5), 0.9
    dx, dy = x1 - x0, y1 - y0
    n = math.hypot(dx, dy)
    ox, oy = -dy / n * half, dx / n * half
    return [ring([(x0 + ox, y0 + oy), (x0 - ox, y0 - oy), (x1 - ox, y1 - oy), (x1 + ox, y1 + oy)])]


def hexagon():
    cx, cy, r = 14.6, -15.3, 1.5
    return [ring([(cx + r * math.cos(math.radians(60 * i + 10)), cy + r * math.sin(math.radians(60 * i + 10)))
                  for i in range(6)])]


def patch():
    return [ring(rotate([(18.0, -25.0), (23.0, -25.0), (23.0, -19.0), (18.0, -19.0)], -12.0, 20.5, -22.0))]


def main():
    root = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures"
    root.mkdir(parents=True, exist_ok=True)
    features = [
        {"type": "Feature", "properties": {"name": name}, "geometry": {"type": "Polygon", "coordinates": rings}}
        for name, rings in [("street", cross()), ("plaza", plaza()), ("curve", arc()),
                            ("diagonal", diagonal())]
    ]
    features.append({"type": "Feature", "properties": {"name": "patches"},
                     "geometry": {"type": "MultiPolygon", "coordinates": [hexagon(), patch()]}})
    (root / "network.geojson").write_text(json.dumps({"type": "FeatureCollection", "features": features}, indent=1)
                                          + "\n")

    # The region sits a hair inside the block so no neighbouring tile is touched.
    eps = 1e-9
    (root / "pipeline.ini").write_text(
        "[region]\n"
        f"west = {WEST + eps:.12f}\nsouth = {SOUTH + eps:.12f}\neast = {EAST - eps:.12f}\nnorth = {NORTH - eps:.12f}\n"
        f"zoom = {Z}\n\n"
        "[network]\npath = network.geojson\n\n"
        "[dirs]\nmasks_gt = run/masks_gt\nmasks_pred = run/masks_pred\nout = run/out\n\n"
        "[vectorize]\ntol_px = 1.0\n\n"
        "[split]\nseed = 2024\nn_train = 8\nn_val = 4\n\n"
        "[metrics]\nper_image_csv = true\n"
    )


if __name__ == "__main__":
    main()
