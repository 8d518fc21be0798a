"""GeoJSON export of an instance and its routes (coordinates passed through)."""

from __future__ import annotations

import json

from .errors import InfeasibleSolutionError
from .instance import Instance, Solution, check_feasibility


def export_geojson(inst: Instance, sol: Solution) -> bytes:
    violations = check_feasibility(inst, sol)
    if violations:
        raise InfeasibleSolutionError(violations)
    depot = [inst.depot[0], inst.depot[1]]
    features = [{
        "type": "Feature",
        "geometry": {"type": "Point", "coordinates": depot},
        "properties": {"kind": "depot"},
    }]
    for s in inst.sites:
        features.append({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [s.x, s.y]},
            "properties": {"kind": "site", "id": s.id, "quantity": s.quantity, "window": [s.open, s.close]},
        })
    for r in sol.routes:
        coords = [depot] + [[inst.sites[v].x, inst.sites[v].y] for v in r.visits] + [depot]
        features.append({
            "type": "Feature",
            "geometry": {"type": "LineString", "coordinates": coords},
            "properties": {"kind": "route", "vehicle": r.vehicle, "profit": r.profit, "visits": list(r.visits)},
        })
    doc = {"type": "FeatureCollection", "properties": {"name": inst.name}, "features": features}
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def read_geojson_routes(data: bytes | str) -> dict[int, list[int]]:
    """Vehicle -> visit order, as recorded in the route features."""
    doc = json.loads(data)
    return {f["properties"]["vehicle"]: list(f["properties"]["visits"])
            for f in doc["features"] if f["properties"].get("kind") == "route"}
