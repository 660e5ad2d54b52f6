"""Problem data model: nodes, fleet, arc geometry, compiled cost tables.

Everything downstream (speed optimization, tabu search, pricing) works off
the dense numpy tables built here, all in SI units: meters, seconds, m/s,
kilograms.  Node coordinates are kept in kilometers because that is how the
source files state them; derived distances are rounded to whole meters at
build time and the rounded value is what every computation sees.
"""

import math
import warnings

import numpy as np

from prpso.cmem import ArcGeometry, Segment, VehicleClass, compile_arc


class Node:
    """One location: depot (id 0) or customer."""

    __slots__ = ("id", "x", "y", "elevation", "demand", "ready", "due", "service")

    def __init__(self, id, x, y, elevation, demand, ready, due, service):
        if ready > due:
            raise ValueError("node %d: ready %.3f after due %.3f" % (id, ready, due))
        if demand < 0:
            raise ValueError("node %d: negative demand" % id)
        if id == 0 and demand != 0:
            raise ValueError("depot must have zero demand")
        self.id = id
        self.x = x                  # km
        self.y = y                  # km
        self.elevation = elevation  # m
        self.demand = demand        # kg
        self.ready = ready          # s
        self.due = due              # s
        self.service = service      # s

    def __repr__(self):
        return "Node(%d, x=%g, y=%g, z=%g, q=%g)" % (
            self.id, self.x, self.y, self.elevation, self.demand)


class VehicleSpec:
    """A vehicle class plus how many of that class are available."""

    __slots__ = ("vc", "count")

    def __init__(self, vc: VehicleClass, count: int):
        if count < 1:
            raise ValueError("vehicle count must be >= 1")
        self.vc = vc
        self.count = count


def derive_geometry(nodes):
    """Single-segment arcs from planar coordinates plus elevation.

    Distance is the 3D straight line in km rounded to the nearest meter;
    the grade angle is atan(rise / rounded distance), positive uphill, so
    the reverse arc gets the negated angle up to the rounding of its own
    (identical) length.
    """
    geometry = {}
    for a in nodes:
        for b in nodes:
            if a.id == b.id:
                continue
            dz_km = (a.elevation - b.elevation) / 1000.0
            d_km = math.sqrt((a.x - b.x) ** 2 + (a.y - b.y) ** 2 + dz_km ** 2)
            d_m = round(d_km * 1000.0)
            if d_m == 0:
                geometry[(a.id, b.id)] = None
                continue
            angle = math.atan((b.elevation - a.elevation) / d_m)
            geometry[(a.id, b.id)] = ArcGeometry(
                a.id, b.id, (Segment(float(d_m), angle),))
    return geometry


class Instance:
    """Complete problem description with per-class compiled cost tables."""

    def __init__(self, name, nodes, vehicles, geometry, arcs_mode,
                 payload_factor=1.0, demand_unit=1.0):
        nodes = tuple(sorted(nodes, key=lambda nd: nd.id))
        if not nodes or nodes[0].id != 0:
            raise ValueError("instance needs a depot with id 0")
        if [nd.id for nd in nodes] != list(range(len(nodes))):
            raise ValueError("node ids must be 0..n without gaps")
        self.name = name
        self.nodes = nodes
        self.vehicles = tuple(vehicles)
        if not self.vehicles:
            raise ValueError("instance needs at least one vehicle class")
        self.geometry = geometry
        self.arcs_mode = arcs_mode
        self.payload_factor = payload_factor
        self.demand_unit = demand_unit  # kg per integer demand unit
        self.horizon = nodes[0].due

        m = len(nodes)
        self.n_customers = m - 1
        self.demand = np.array([nd.demand for nd in nodes])
        self.cost_demand = self.demand * payload_factor
        self.ready = np.array([nd.ready for nd in nodes])
        self.due = np.array([nd.due for nd in nodes])
        self.service = np.array([nd.service for nd in nodes])
        units = self.demand / demand_unit
        self.demand_units = np.rint(units).astype(np.int64)
        if not np.allclose(units, self.demand_units, atol=1e-9):
            raise ValueError("demands are not multiples of the demand unit")

        self.dist = np.zeros((m, m))
        for (i, j), geom in geometry.items():
            if geom is not None:
                self.dist[i, j] = geom.total_distance

        # Per-class coefficient tables; index position matches self.vehicles.
        self.alpha = []
        self.beta = []
        self.gamma = []
        for spec in self.vehicles:
            ta = np.zeros((m, m))
            tb = np.zeros((m, m))
            tg = np.zeros((m, m))
            for (i, j), geom in geometry.items():
                if geom is None:
                    continue
                coeff = compile_arc(spec.vc, geom)
                ta[i, j] = coeff.alpha
                tb[i, j] = coeff.beta
                tg[i, j] = coeff.gamma
            self.alpha.append(ta)
            self.beta.append(tb)
            self.gamma.append(tg)

        self._warn_unreachable()

    def _warn_unreachable(self):
        best_b = max(spec.vc.speed_max for spec in self.vehicles)
        bad = [nd.id for nd in self.nodes[1:]
               if self.dist[0, nd.id] / best_b > nd.due]
        if bad:
            warnings.warn("nodes unreachable within their window even at "
                          "top speed: %s" % bad, stacklevel=3)

    def cost_capacity(self, k):
        """Capacity bound on the cost-side payload for class k."""
        return self.vehicles[k].vc.capacity * self.payload_factor

    def capacity_units(self, k):
        """Class-k capacity expressed in integer demand units, relaxed up."""
        return int(math.ceil(self.vehicles[k].vc.capacity / self.demand_unit - 1e-9))

    def __repr__(self):
        return "Instance(%r, n=%d, classes=%d)" % (
            self.name, self.n_customers, len(self.vehicles))


def build_instance(name, nodes, vehicles, geometry=None,
                   payload_factor=1.0, demand_unit=1.0):
    """Assemble an instance; derives single-segment arcs when none given."""
    if geometry is None:
        geometry = derive_geometry(sorted(nodes, key=lambda nd: nd.id))
        mode = "derived"
    else:
        mode = "explicit"
    return Instance(name, nodes, vehicles, geometry, mode,
                    payload_factor=payload_factor, demand_unit=demand_unit)
