#!/usr/bin/env python3
"""Regenerates the bundled library and scenario fixtures under data/.

All numbers are synthetic. Output is deterministic, so re-running this script
on a clean checkout produces no diff.
"""

import json
import math
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent
DATA = ROOT / "data"

THREATS = [
    # id, capability, speed km/s, value
    ("ground_attack", 0.8, 0.25, 0.8),
    ("fighter", 0.7, 0.30, 0.9),
    ("helicopter", 0.5, 0.08, 0.6),
    ("interceptor", 0.6, 0.40, 0.7),
    ("reconnaissance", 0.3, 0.20, 0.4),
    ("trainer", 0.2, 0.15, 0.2),
    ("transport", 0.4, 0.15, 0.5),
]

WEAPONS = [
    # id, lethality, priority
    ("cannon", 0.70, 0.4),
    ("rocket", 0.75, 0.5),
    ("ground_missile", 0.90, 0.9),
    ("smart_bomb", 0.85, 0.7),
    ("free_fall_bomb", 0.60, 0.2),
    ("low_level_attack_bomb", 0.65, 0.3),
]

# Effectiveness per weapon, columns in THREATS order, then the unknown row.
# Every column is strictly ordered so preference lists have no ties.
EFFECTIVENESS = {
    "cannon": [0.62, 0.55, 0.85, 0.50, 0.70, 0.80, 0.75, 0.50],
    "rocket": [0.70, 0.60, 0.80, 0.58, 0.72, 0.78, 0.82, 0.55],
    "ground_missile": [0.92, 0.90, 0.75, 0.88, 0.90, 0.85, 0.93, 0.80],
    "smart_bomb": [0.80, 0.72, 0.60, 0.70, 0.65, 0.70, 0.78, 0.60],
    "free_fall_bomb": [0.55, 0.52, 0.35, 0.45, 0.50, 0.60, 0.68, 0.40],
    "low_level_attack_bomb": [0.66, 0.48, 0.52, 0.40, 0.58, 0.66, 0.71, 0.45],
}


def library():
    corr = []
    for weapon, row in EFFECTIVENESS.items():
        for (threat, *_), c in zip(THREATS, row):
            corr.append({"weapon": weapon, "threat": threat, "c": c})
        corr.append({"weapon": weapon, "threat": "unknown", "c": row[-1]})
    return {
        "threat_classes": [
            {"id": t, "name": t.replace("_", " "), "base_capability": c, "base_speed": s, "value": v}
            for t, c, s, v in THREATS
        ],
        "weapon_classes": [
            {"id": w, "name": w.replace("_", " "), "lethality_index": l, "priority": p}
            for w, l, p in WEAPONS
        ],
        "correlation": corr,
        "unknown_threat": {"base_capability": 1.0, "base_speed": 0.3, "value": 1.0},
    }


GRID_CLASSES = ["ground_missile", "rocket", "smart_bomb", "cannon", "ground_missile"]
THREAT_CYCLE = ["fighter", "ground_attack", "interceptor", "helicopter", "transport",
                "reconnaissance", "trainer"]


def grid_deployment(quota=None):
    """Ten assets on a line 6 km apart, one full-circle weapon at each centre."""
    das, weapons = [], []
    for i in range(10):
        x = 6.0 * i
        da = {"id": f"DA{i + 1:02d}", "center": [x, 0.0], "radius": 1.0,
              "priority": round(0.5 + 0.05 * (i % 5), 2), "vulnerability": 0.5}
        if quota is not None:
            da["quota"] = quota
        das.append(da)
        weapons.append({
            "id": f"WS{i + 1:02d}", "da": da["id"], "class": GRID_CLASSES[i % len(GRID_CLASSES)],
            "position": [x, 0.0], "range": 8.0, "projectile_speed": 1.2, "rate_of_fire": 1.0,
            "stabilization_time": 1.0, "max_elevation": 1.4, "ammo": 40,
        })
    return das, weapons


def inbound(track_id, cls, target, bearing_deg, distance, speed, spawn, altitude=0.5):
    """Straight run at a target point from the given bearing and distance."""
    a = math.radians(bearing_deg)
    start = [round(target[0] + distance * math.cos(a), 3), round(target[1] + distance * math.sin(a), 3)]
    return {"id": track_id, "class": cls, "waypoints": [start, list(target)], "speeds": [speed],
            "spawn_time": spawn, "altitude": altitude}


def scenario(name, das, weapons, threats, **extra):
    doc = {"version": 1, "name": name, "libraries": "../libraries/sample_library.json",
           "das": das, "weapons": weapons, "threats": threats, "dt": 0.1, "max_time": 300.0,
           "seed": 7, "initial_mode": "subtractive"}
    doc.update(extra)
    return doc


def table1_k5():
    das, weapons = grid_deployment()
    threats = []
    for n, i in enumerate([0, 2, 4, 6, 8]):
        target = das[i]["center"]
        threats.append(inbound(f"T{n + 1:02d}", THREAT_CYCLE[n], target, 90.0, 30.0, 0.25, 0.0))
    return scenario("table1_k5", das, weapons, threats)


def table1_k50():
    das, weapons = grid_deployment()
    threats = []
    # Two per asset from the start, the rest in later waves so each weapon
    # works through its own stream of lock and queue.
    schedule = [0.0, 0.0, 60.0, 100.0, 140.0]
    for wave, spawn in enumerate(schedule):
        for i, da in enumerate(das):
            n = wave * 10 + i
            bearing = 90.0 + (15.0 if wave % 2 else -15.0) * (wave > 0) + (5.0 if wave == 1 else 0.0)
            threats.append(inbound(f"T{n + 1:02d}", THREAT_CYCLE[n % len(THREAT_CYCLE)], da["center"],
                                   bearing, 24.0 + 2.0 * wave, 0.2, spawn))
    return scenario("table1_k50", das, weapons, threats, max_time=400.0)


def table1_k10():
    das, weapons = grid_deployment(quota=1)
    threats = []
    for i, da in enumerate(das):
        threats.append(inbound(f"T{i + 1:02d}", THREAT_CYCLE[i % len(THREAT_CYCLE)], da["center"],
                               90.0, 28.0, 0.22, 0.0))
    return scenario("table1_k10", das, weapons, threats)


def gap_instance():
    # A single-slot asset that two threats both want. Taken one at a time, the
    # first threat grabs it and strands the second, which only A can handle.
    das = [
        {"id": "A", "center": [0.0, 0.0], "radius": 1.0, "priority": 0.8, "vulnerability": 0.5, "quota": 1},
        {"id": "B", "center": [6.0, 0.0], "radius": 1.0, "priority": 0.8, "vulnerability": 0.5, "quota": 1},
    ]
    weapons = [
        {"id": "WA", "da": "A", "class": "ground_missile", "position": [0.0, 0.0], "range": 10.0,
         "projectile_speed": 1.2, "rate_of_fire": 1.0, "stabilization_time": 1.0, "ammo": 20},
        {"id": "WB", "da": "B", "class": "free_fall_bomb", "position": [6.0, 0.0], "range": 10.0,
         "projectile_speed": 1.2, "rate_of_fire": 1.0, "stabilization_time": 1.0, "ammo": 20},
    ]
    threats = [
        {"id": "T1", "class": "fighter", "waypoints": [[0.0, 20.0], [0.0, 0.0]], "speeds": [0.3],
         "altitude": 0.5, "value": 0.5},
        {"id": "T2", "class": "helicopter", "waypoints": [[-2.0, 20.0], [0.0, 0.0]], "speeds": [0.1],
         "altitude": 0.5, "value": 1.0},
    ]
    return scenario("gap_instance", das, weapons, threats, max_time=250.0)


def minimal():
    das = [{"id": "DA1", "center": [0.0, 0.0], "radius": 1.0, "priority": 0.9, "vulnerability": 0.5}]
    weapons = [{"id": "WS1", "da": "DA1", "class": "ground_missile", "position": [0.0, 0.0],
                "range": 8.0, "projectile_speed": 1.2, "rate_of_fire": 1.0, "ammo": 10}]
    threats = [inbound("T1", "fighter", [0.0, 0.0], 90.0, 15.0, 0.3, 0.0)]
    return scenario("minimal", das, weapons, threats, max_time=120.0)


def deployment():
    das, weapons = grid_deployment()
    return scenario("grid_deployment", das, weapons, [], max_time=600.0)


def write(path, doc):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2) + "\n")


def main():
    write(DATA / "libraries" / "sample_library.json", library())
    scenarios = {
        "table1_k5": table1_k5(),
        "table1_k50": table1_k50(),
        "table1_k10": table1_k10(),
        "gap_instance": gap_instance(),
        "minimal": minimal(),
    }
    for name, doc in scenarios.items():
        write(DATA / "scenarios" / f"{name}.json", doc)
    write(DATA / "deployments" / "grid_deployment.json", deployment())


if __name__ == "__main__":
    main()
