"""Seeded instance generators.

synth_solomon_text writes benchmark-style VRPTW text (clustered "c1",
uniform "r1", mixed "rc1") that parse_solomon/adapt_solomon consume like
the real thing.  Time windows are cut around a reference schedule that is
simulated while generating, so every file admits at least one full solution
with slack to spare; the slack (at least 10 time units of early margin and
a 15-unit horizon margin) also absorbs the slight distance growth when the
planar file later gets 3D elevations.

synth_hilly builds a native instance on rolling terrain: clustered customers
over roughly 30 x 30 km, cluster elevations spread over 0..600 m, and every
arc described by surveyed-style segments of < 1000 m whose rises sum exactly
to the end-to-end elevation difference.
"""

import math

from prpso.cmem import ArcGeometry, Segment, standard_vehicle
from prpso.instances.model import Node, VehicleSpec, Instance
from prpso.instances.rng import SplitMix64

_STYLE = {
    # horizon, service, window width, early offset range
    "c1": (1236, 90, 60, (10, 30)),
    "r1": (230, 10, 30, (5, 15)),
    "rc1": (240, 10, 30, (5, 15)),
}
_DEPOT_XY = {"c1": (40, 50), "r1": (35, 35), "rc1": (40, 50)}


def _clustered_coords(rng, n, lo=10, hi=90, spread=5):
    coords = []
    while len(coords) < n:
        cx, cy = rng.randint(lo, hi), rng.randint(lo, hi)
        for _ in range(min(rng.randint(6, 9), n - len(coords))):
            x = min(100, max(0, cx + rng.randint(-spread, spread)))
            y = min(100, max(0, cy + rng.randint(-spread, spread)))
            coords.append((x, y))
    return coords


def synth_solomon_text(style: str, n: int, seed: int,
                       capacity: int = 200) -> str:
    """Generate a Solomon-format file with feasible-by-construction windows."""
    if style not in _STYLE:
        raise ValueError("style must be one of %s" % sorted(_STYLE))
    horizon, service, width, (off_lo, off_hi) = _STYLE[style]
    rng = SplitMix64(seed)

    if style == "c1":
        coords = _clustered_coords(rng, n)
    elif style == "r1":
        coords = [(rng.randint(2, 68), rng.randint(2, 68)) for _ in range(n)]
    else:
        half = n // 2
        coords = _clustered_coords(rng, half)
        coords += [(rng.randint(0, 100), rng.randint(0, 100))
                   for _ in range(n - half)]

    demands = [10 * rng.randint(1, 5) for _ in range(n)]
    dx, dy = _DEPOT_XY[style]

    def dist(a, b):
        return math.hypot(a[0] - b[0], a[1] - b[1])

    # Reference schedule: greedy nearest-neighbor routes at unit speed,
    # splitting on capacity or when the return leg would crowd the horizon.
    pending = list(range(n))
    windows = [None] * n
    margin = 15
    while pending:
        pos, t, load = (dx, dy), 0.0, 0
        while pending:
            c = min(pending, key=lambda i: (dist(pos, coords[i]), i))
            arr = t + dist(pos, coords[c])
            early = max(0, int(arr) - rng.randint(off_lo, off_hi))
            late = early + width
            if load + demands[c] > capacity or \
                    late + service + dist(coords[c], (dx, dy)) > horizon - margin:
                if t == 0.0:
                    raise ValueError("cannot place customer %d within the "
                                     "horizon; enlarge it" % c)
                break
            pending.remove(c)
            windows[c] = (early, late)
            load += demands[c]
            t = arr + service
            pos = coords[c]

    name = "S%s_%d_%d" % (style.upper(), n, seed)
    lines = [name, "", "VEHICLE", "NUMBER     CAPACITY",
             "  25        %4d" % capacity, "", "CUSTOMER",
             "CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  "
             "DUE DATE   SERVICE   TIME", ""]
    row = "%5d %8d %10d %10d %12d %10d %10d"
    lines.append(row % (0, dx, dy, 0, 0, horizon, 0))
    for i in range(n):
        e, l = windows[i]
        lines.append(row % (i + 1, coords[i][0], coords[i][1],
                            demands[i], e, l, service))
    lines.append("")
    return "\n".join(lines)


def _segmented_arc(rng, i, j, h_dist, z_i, z_j, residual=0.0):
    """Split one arc into < 1000 m segments whose rises sum to z_j - z_i.

    A nonzero residual shifts where the profile ends relative to the node
    elevation, the way independently digitized road profiles disagree with
    the address database they connect.
    """
    dz = z_j + residual - z_i
    m = max(int(math.ceil(h_dist / 900.0)),
            int(math.ceil(abs(dz) / 200.0)), 1)
    h = h_dist / m
    way = [z_i]
    for t in range(1, m):
        way.append(z_i + dz * t / m + rng.uniform(-100.0, 100.0))
    way.append(z_i + dz)
    segs = []
    for t in range(m):
        rise = way[t + 1] - way[t]
        segs.append(Segment(math.sqrt(h * h + rise * rise),
                            math.atan2(rise, h)))
    return ArcGeometry(i, j, tuple(segs))


def synth_hilly(n: int, seed: int, service: float = 600.0,
                window: float = 3600.0, horizon: float = 36000.0,
                survey_noise: float = 0.0) -> Instance:
    """Clustered customers on strong terrain, explicit segmented arcs.

    survey_noise (meters) adds a seeded per-arc residual between the arc's
    digitized profile and the endpoint elevations, matching the character
    of road profiles surveyed independently of the customer records.  The
    default keeps every profile exactly reconciled.
    """
    rng = SplitMix64(seed)
    depot_xy = (15.0, 15.0)

    coords, elevs = [], []
    while len(coords) < n:
        cx, cy = rng.uniform(3.0, 27.0), rng.uniform(3.0, 27.0)
        base = rng.uniform(0.0, 150.0)
        for _ in range(min(rng.randint(4, 7), n - len(coords))):
            coords.append((cx + rng.uniform(-2.0, 2.0),
                           cy + rng.uniform(-2.0, 2.0)))
            # ridge and gully addresses interleave inside a cluster, so
            # the shortest visit order is rarely the flattest one
            band = 0.0 if rng.uniform(0.0, 1.0) < 0.5 \
                else rng.uniform(380.0, 550.0)
            elevs.append(min(700.0, max(0.0,
                                        base + band
                                        + rng.uniform(-40.0, 40.0))))
    # depots in these corpora sit on the ridge above most delivery points
    depot_z = rng.uniform(420.0, 620.0)
    demands = [10.0 * rng.randint(5, 25) for _ in range(n)]

    xy = [depot_xy] + coords
    zs = [depot_z] + elevs
    geometry = {}
    for a in range(n + 1):
        for b in range(n + 1):
            if a == b:
                continue
            h = 1000.0 * math.hypot(xy[a][0] - xy[b][0], xy[a][1] - xy[b][1])
            residual = rng.uniform(-survey_noise, survey_noise) \
                if survey_noise > 0.0 else 0.0
            geometry[(a, b)] = _segmented_arc(rng, a, b, h, zs[a], zs[b],
                                              residual)

    dist = {key: g.total_distance for key, g in geometry.items()}
    capacity = 1200.0
    ref_speed = 12.0

    pending = list(range(1, n + 1))
    windows = [None] * (n + 1)
    routes = 0
    while pending:
        at, t, load = 0, 0.0, 0.0
        routes += 1
        while pending:
            c = min(pending, key=lambda i: (dist[(at, i)], i))
            arr = t + dist[(at, c)] / ref_speed
            early = max(0.0, arr - rng.uniform(600.0, 1800.0))
            late = early + window
            if load + demands[c - 1] > capacity or \
                    late + service + dist[(c, 0)] / ref_speed > horizon:
                if t == 0.0:
                    raise ValueError("horizon too tight for customer %d" % c)
                break
            pending.remove(c)
            windows[c] = (early, late)
            load += demands[c - 1]
            t = arr + service
            at = c

    nodes = [Node(0, depot_xy[0], depot_xy[1], depot_z, 0.0,
                  0.0, horizon, 0.0)]
    for i in range(1, n + 1):
        e, l = windows[i]
        nodes.append(Node(i, xy[i][0], xy[i][1], zs[i], demands[i - 1],
                          e, l, service))

    vc = standard_vehicle("LDV", capacity=capacity)
    name = "synthhill_n%d_s%d" % (n, seed)
    if survey_noise > 0.0:
        name += "_sv%g" % survey_noise
    return Instance(name, nodes,
                    [VehicleSpec(vc, routes + 2)], geometry, "explicit",
                    demand_unit=10.0)
