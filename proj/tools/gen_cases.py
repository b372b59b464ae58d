#!/usr/bin/env python3
"""Generate the bundled demo14 and demo3area study cases.

Both cases are synthetic. Topologies are fixed; demand profiles and cost
parameters live here so the bundled data can be regenerated reproducibly.
Run from the repo root:  python3 tools/gen_cases.py
"""

import json
import math
import os

OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "cases")

HOURS = 24


def day_shape(peak_hour, width, floor):
    """Smooth single-peak daily profile in [floor, 1]."""
    out = []
    for t in range(1, HOURS + 1):
        x = (t - peak_hour) / width
        out.append(floor + (1.0 - floor) * math.exp(-x * x))
    return out


def two_peak_shape(h1, h2, w, floor):
    out = []
    for t in range(1, HOURS + 1):
        a = math.exp(-(((t - h1) / w) ** 2))
        b = math.exp(-(((t - h2) / w) ** 2))
        out.append(floor + (1.0 - floor) * max(a, b))
    return out


def scale(shape, mw):
    return [round(mw * s, 3) for s in shape]


def gen(gid, bus, p_min, p_max, su, sd, ramp, min_up, min_down, cold,
        cq, cl, cnl, csu, chs, csd, on, dur, out=None):
    g = {
        "id": gid, "bus_id": bus,
        "p_min": p_min, "p_max": p_max, "p_su_max": su, "p_sd_max": sd,
        "ramp_up": ramp, "ramp_down": ramp,
        "min_up": min_up, "min_down": min_down, "cold_start_time": cold,
        "cost_q": cq, "cost_l": cl, "cost_noload": cnl,
        "cost_startup": csu, "cost_hot_startup": chs, "cost_shutdown": csd,
        "initial_status_on": on, "initial_status_duration": dur,
    }
    if out is not None:
        g["initial_output"] = out
    return g


def branch(bid, f, t, x, lim):
    return {"id": bid, "from_bus": f, "to_bus": t, "reactance": x, "flow_limit": lim}


def demo14():
    """14-bus, two-area case on the classic 14-bus topology."""
    edges = [
        ("B1", "B2", 0.059), ("B1", "B5", 0.223), ("B2", "B3", 0.198),
        ("B2", "B4", 0.176), ("B2", "B5", 0.174), ("B3", "B4", 0.171),
        ("B4", "B5", 0.042), ("B4", "B7", 0.209), ("B4", "B9", 0.556),
        ("B5", "B6", 0.252), ("B6", "B11", 0.199), ("B6", "B12", 0.256),
        ("B6", "B13", 0.130), ("B7", "B8", 0.176), ("B7", "B9", 0.110),
        ("B9", "B10", 0.085), ("B9", "B14", 0.270), ("B10", "B11", 0.192),
        ("B12", "B13", 0.220), ("B13", "B14", 0.348),
    ]
    area1 = {"B1", "B2", "B3", "B4", "B5"}
    base_demand = {
        "B2": 21.7, "B3": 64.2, "B4": 37.8, "B5": 7.6, "B6": 31.2,
        "B9": 29.5, "B10": 9.0, "B11": 3.5, "B12": 6.1, "B13": 13.5,
        "B14": 14.9,
    }
    shape = two_peak_shape(9, 19, 3.5, 0.45)
    buses = []
    for i in range(1, 15):
        bid = f"B{i}"
        mw = base_demand.get(bid, 0.0)
        buses.append({
            "id": bid,
            "area_id": "A1" if bid in area1 else "A2",
            "demand": scale(shape, mw * 1.35),
        })
    branches = []
    for k, (f, t, x) in enumerate(edges):
        fa = f in area1
        ta = t in area1
        lim = 65.0 if fa != ta else 160.0
        branches.append(branch(f"L{k + 1}", f, t, x, lim))
    gens = [
        gen("G1", "B1", 60, 250, 120, 120, 120, 4, 4, 6, 0.008, 18.0, 180, 900, 450, 120, True, 8, 140),
        gen("G2", "B2", 25, 110, 60, 60, 60, 3, 3, 4, 0.012, 26.0, 90, 420, 220, 70, True, 6, 60),
        gen("G3", "B3", 20, 90, 55, 55, 55, 2, 2, 4, 0.015, 34.0, 70, 320, 170, 55, False, 6),
        gen("G6", "B6", 15, 80, 50, 50, 50, 2, 2, 3, 0.014, 30.0, 60, 300, 160, 50, True, 5, 40),
        gen("G8", "B8", 10, 60, 45, 45, 45, 1, 1, 2, 0.02, 48.0, 40, 180, 100, 30, False, 4),
    ]
    return {
        "horizon": HOURS, "base_mva": 100.0,
        "areas": [{"id": "A1"}, {"id": "A2"}],
        "buses": buses, "branches": branches, "generators": gens,
    }


def demo3area():
    """18-bus, three-area case: two importing areas, one cheap exporter."""
    areas = {"A1": [1, 2, 3, 4, 5, 6], "A2": [7, 8, 9, 10, 11, 12], "A3": [13, 14, 15, 16, 17, 18]}
    # Internal rings plus a chord in each area.
    edges = []
    for aid, nodes in areas.items():
        n = len(nodes)
        for k in range(n):
            f, t = nodes[k], nodes[(k + 1) % n]
            edges.append((f"B{f}", f"B{t}", 0.12, 150.0))
        edges.append((f"B{nodes[0]}", f"B{nodes[3]}", 0.18, 120.0))
    # Tie-lines.
    ties = [
        ("B6", "B13", 0.15, 90.0),   # A1 <-> A3
        ("B5", "B18", 0.15, 90.0),   # A1 <-> A3 (second path)
        ("B12", "B14", 0.15, 90.0),  # A2 <-> A3
        ("B4", "B7", 0.20, 60.0),    # A1 <-> A2
    ]
    edges += ties

    shape_a1 = two_peak_shape(9, 20, 3.0, 0.40)
    shape_a2 = day_shape(19, 4.0, 0.45)
    shape_a3 = day_shape(13, 6.0, 0.70)
    bus_mw = {
        "B1": 55, "B2": 45, "B3": 30, "B4": 25, "B5": 20, "B6": 15,
        "B7": 50, "B8": 45, "B9": 30, "B10": 25, "B11": 20, "B12": 15,
        "B13": 20, "B14": 18, "B15": 14, "B16": 10, "B17": 8, "B18": 6,
    }
    buses = []
    for aid, nodes in areas.items():
        for i in nodes:
            bid = f"B{i}"
            shp = {"A1": shape_a1, "A2": shape_a2, "A3": shape_a3}[aid]
            buses.append({"id": bid, "area_id": aid, "demand": scale(shp, bus_mw[bid])})

    branches = [branch(f"L{k + 1}", f, t, x, lim) for k, (f, t, x, lim) in enumerate(edges)]

    gens = [
        # A1: one mid unit, one expensive peaker.
        gen("G1", "B1", 40, 170, 90, 90, 85, 4, 4, 6, 0.010, 30.0, 140, 800, 420, 110, True, 8, 100),
        gen("G2", "B2", 10, 85, 55, 55, 55, 1, 1, 2, 0.020, 55.0, 60, 260, 140, 40, False, 4),
        # A2: one mid unit, one expensive peaker.
        gen("G3", "B7", 40, 170, 90, 90, 85, 4, 4, 6, 0.010, 28.0, 140, 800, 420, 110, True, 8, 100),
        gen("G4", "B8", 10, 85, 55, 55, 55, 1, 1, 2, 0.018, 50.0, 60, 260, 140, 40, False, 4),
        # A3: large cheap exporter plus two cheap mid units.
        gen("G5", "B13", 80, 320, 160, 160, 160, 6, 6, 8, 0.004, 15.0, 220, 1400, 700, 180, True, 10, 200),
        gen("G6", "B14", 25, 130, 75, 75, 70, 3, 3, 4, 0.006, 20.0, 90, 420, 220, 60, True, 6, 60),
        gen("G7", "B15", 15, 95, 60, 60, 60, 2, 2, 3, 0.008, 24.0, 70, 320, 170, 50, False, 5),
    ]
    return {
        "horizon": HOURS, "base_mva": 100.0,
        "areas": [{"id": "A1"}, {"id": "A2"}, {"id": "A3"}],
        "buses": buses, "branches": branches, "generators": gens,
    }


def main():
    os.makedirs(OUT_DIR, exist_ok=True)
    for name, case in (("demo14", demo14()), ("demo3area", demo3area())):
        path = os.path.join(OUT_DIR, f"{name}.json")
        with open(path, "w") as f:
            json.dump(case, f, indent=2)
            f.write("\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
