"""Reader for Solomon VRPTW files and conversion to routable instances.

The Solomon benchmark is planar and unitless.  Conversion gives it physics:
every node receives a synthetic elevation drawn uniformly from [0, 1000] m
by a seeded splitmix64 stream (depot first, then customers in file order),
one Solomon time unit becomes 0.02 h = 72 s, and demand units become
kilograms at a per-vehicle-class rate.  The vehicle class itself is chosen
by the file's stated capacity: 200 -> light duty at 6 kg per unit, 700 ->
medium at 18 kg, 1000 -> heavy at 31 kg.
"""

from prpso.cmem import standard_vehicle
from prpso.instances.model import Node, VehicleSpec, build_instance
from prpso.instances.rng import SplitMix64

TIME_UNIT_S = 72.0  # 0.02 h

# capacity in the raw file -> (vehicle kind, kg per demand unit)
CLASS_BY_CAPACITY = {200: ("LDV", 6.0), 700: ("MDV", 18.0), 1000: ("HDV", 31.0)}


class ScalingProfile:
    """How raw Solomon quantities map to physical units."""

    def __init__(self, time_unit=TIME_UNIT_S, class_by_capacity=None,
                 fixed_cost=100.0, fuel_price=1.42,
                 speed_min=1.0, speed_max=80.0 / 3.6):
        self.time_unit = time_unit
        self.class_by_capacity = dict(class_by_capacity or CLASS_BY_CAPACITY)
        self.fixed_cost = fixed_cost
        self.fuel_price = fuel_price
        self.speed_min = speed_min
        self.speed_max = speed_max


DEFAULT_PROFILE = ScalingProfile()


class SolomonFile:
    def __init__(self, name, vehicle_number, capacity, rows):
        self.name = name
        self.vehicle_number = vehicle_number
        self.capacity = capacity
        self.rows = rows  # (id, x, y, demand, ready, due, service)


def parse_solomon(text: str) -> SolomonFile:
    """Parse the classic fixed-layout benchmark text."""
    lines = text.splitlines()
    name = None
    for ln in lines:
        if ln.strip():
            name = ln.strip()
            break
    if name is None:
        raise ValueError("empty file")

    vehicle_number = capacity = None
    rows = []
    section = None
    for ln in lines[1:]:
        s = ln.strip()
        if not s:
            continue
        up = s.upper()
        if up.startswith("VEHICLE"):
            section = "vehicle"
            continue
        if up.startswith("CUSTOMER"):
            section = "customer"
            continue
        if up.startswith("NUMBER") or up.startswith("CUST"):
            continue
        parts = s.split()
        if section == "vehicle" and len(parts) == 2:
            vehicle_number, capacity = int(parts[0]), int(parts[1])
        elif section == "customer" and len(parts) == 7:
            rows.append((int(parts[0]),
                         float(parts[1]), float(parts[2]), float(parts[3]),
                         float(parts[4]), float(parts[5]), float(parts[6])))
    if vehicle_number is None or capacity is None:
        raise ValueError("missing VEHICLE section in %r" % name)
    if not rows or rows[0][0] != 0:
        raise ValueError("missing depot row in %r" % name)
    return SolomonFile(name, vehicle_number, capacity, rows)


def adapt_solomon(raw, seed: int, profile: ScalingProfile = DEFAULT_PROFILE,
                  n_customers=None):
    """Turn a parsed Solomon file into a physical instance.

    n_customers keeps only the first that many customer rows (the usual way
    benchmark subsets like the 25-customer series are formed).
    """
    if isinstance(raw, str):
        raw = parse_solomon(raw)
    try:
        kind, demand_unit = profile.class_by_capacity[raw.capacity]
    except KeyError:
        raise ValueError("no vehicle class profile for capacity %d "
                         "(known: %s)" % (raw.capacity,
                                          sorted(profile.class_by_capacity)))

    rows = raw.rows
    if n_customers is not None:
        rows = rows[: n_customers + 1]

    stream = SplitMix64(seed)
    nodes = []
    for rid, x, y, demand, ready, due, service in rows:
        z = stream.uniform(0.0, 1000.0)
        nodes.append(Node(rid, x, y, z,
                          demand * demand_unit,
                          ready * profile.time_unit,
                          due * profile.time_unit,
                          service * profile.time_unit))

    vc = standard_vehicle(kind,
                          capacity=raw.capacity * demand_unit,
                          fixed_cost=profile.fixed_cost,
                          fuel_price=profile.fuel_price,
                          speed_min=profile.speed_min,
                          speed_max=profile.speed_max)
    name = raw.name if n_customers is None else "%s-%d" % (raw.name, n_customers)
    return build_instance(name, nodes, [VehicleSpec(vc, raw.vehicle_number)],
                          demand_unit=demand_unit)
