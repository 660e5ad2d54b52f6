"""Instance transformations for sensitivity studies.

scale_instance dampens the two physical effects separately: r1 scales how
much the carried load matters to fuel burn (capacity checks still use the
real demands), r2 scales every grade angle.  flatten_for_planning zeroes
the angles outright while keeping distances, producing the instance a
terrain-blind planner believes it is solving.
"""

from prpso.cmem import ArcGeometry, Segment
from prpso.instances.model import Instance


def _with_angle_factor(geometry, factor):
    out = {}
    for key, geom in geometry.items():
        if geom is None:
            out[key] = None
        else:
            segs = tuple(Segment(s.distance, s.angle * factor)
                         for s in geom.segments)
            out[key] = ArcGeometry(geom.from_node, geom.to_node, segs)
    return out


def scale_instance(inst: Instance, r1: float, r2: float) -> Instance:
    if not (0.0 <= r1 <= 1.0 and 0.0 <= r2 <= 1.0):
        raise ValueError("scale factors must lie in [0, 1]")
    geometry = _with_angle_factor(inst.geometry, r2)
    return Instance("%s-r1_%g-r2_%g" % (inst.name, r1, r2),
                    inst.nodes, inst.vehicles, geometry, "explicit",
                    payload_factor=inst.payload_factor * r1,
                    demand_unit=inst.demand_unit)


def flatten_for_planning(inst: Instance) -> Instance:
    """Same distances and windows, every grade angle forced to zero."""
    geometry = _with_angle_factor(inst.geometry, 0.0)
    return Instance(inst.name + "-flat", inst.nodes, inst.vehicles, geometry,
                    "explicit", payload_factor=inst.payload_factor,
                    demand_unit=inst.demand_unit)
