"""Reader/writer for the native instance file format (header ``PRPSO v1``).

Plain text, whitespace-separated, floats written with repr() so that a
load/save cycle of a canonically written file reproduces it byte for byte.
Field order is documented in docs/format.md.  The ``arcs`` header field says
whether arc geometry is re-derived from node coordinates on load
("derived") or read from an [arcs] section ("explicit").
"""

from prpso.cmem import ArcGeometry, Segment, VehicleClass
from prpso.instances.model import Node, VehicleSpec, Instance, derive_geometry

_VEHICLE_FIELDS = (
    "engine_friction", "engine_speed", "displacement", "frontal_area",
    "drag_coeff", "rolling_coeff", "acceleration", "curb_weight",
    "heating_value", "drivetrain_eff", "diesel_eff", "fuel_air_ratio",
    "grams_per_liter", "air_density", "gravity", "capacity", "fixed_cost",
    "fuel_price", "speed_min", "speed_max",
)


def dumps_instance(inst: Instance) -> str:
    out = ["PRPSO v1"]
    out.append("name %s" % inst.name)
    out.append("payload_factor %s" % repr(float(inst.payload_factor)))
    out.append("demand_unit %s" % repr(float(inst.demand_unit)))
    out.append("arcs %s" % inst.arcs_mode)
    out.append("")
    out.append("[vehicles]")
    for spec in inst.vehicles:
        vals = [spec.vc.name, str(spec.count)]
        vals += [repr(float(getattr(spec.vc, f))) for f in _VEHICLE_FIELDS]
        out.append(" ".join(vals))
    out.append("")
    out.append("[nodes]")
    for nd in inst.nodes:
        out.append(" ".join([str(nd.id)] + [
            repr(float(v)) for v in (nd.x, nd.y, nd.elevation, nd.demand,
                                     nd.ready, nd.due, nd.service)]))
    if inst.arcs_mode == "explicit":
        out.append("")
        out.append("[arcs]")
        for (i, j) in sorted(inst.geometry):
            geom = inst.geometry[(i, j)]
            segs = [] if geom is None else [
                "%s:%s" % (repr(float(s.distance)), repr(float(s.angle)))
                for s in geom.segments]
            out.append(" ".join([str(i), str(j)] + segs))
    out.append("")
    return "\n".join(out)


def save_instance(inst: Instance, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_instance(inst))


def loads_instance(text: str) -> Instance:
    lines = text.splitlines()
    if not lines or lines[0].strip() != "PRPSO v1":
        raise ValueError("not a PRPSO v1 file")

    header = {}
    section = None
    vehicles, nodes = [], []
    arc_lines = []
    for ln in lines[1:]:
        s = ln.strip()
        if not s or s.startswith("#"):
            continue
        if s.startswith("["):
            section = s
            continue
        if section is None:
            key, _, val = s.partition(" ")
            header[key] = val.strip()
        elif section == "[vehicles]":
            parts = s.split()
            if len(parts) != 2 + len(_VEHICLE_FIELDS):
                raise ValueError("bad vehicle line: %r" % s)
            kwargs = dict(zip(_VEHICLE_FIELDS, map(float, parts[2:])))
            vehicles.append(VehicleSpec(VehicleClass(name=parts[0], **kwargs),
                                        int(parts[1])))
        elif section == "[nodes]":
            parts = s.split()
            if len(parts) != 8:
                raise ValueError("bad node line: %r" % s)
            nodes.append(Node(int(parts[0]), *map(float, parts[1:])))
        elif section == "[arcs]":
            arc_lines.append(s)
        else:
            raise ValueError("unknown section %s" % section)

    mode = header.get("arcs", "derived")
    if mode not in ("derived", "explicit"):
        raise ValueError("arcs mode must be derived or explicit")
    if mode == "derived":
        if arc_lines:
            raise ValueError("derived-mode file must not carry an [arcs] section")
        geometry = derive_geometry(sorted(nodes, key=lambda nd: nd.id))
    else:
        geometry = {}
        for s in arc_lines:
            parts = s.split()
            i, j = int(parts[0]), int(parts[1])
            if not parts[2:]:
                geometry[(i, j)] = None
                continue
            segs = []
            for tok in parts[2:]:
                d, _, a = tok.partition(":")
                segs.append(Segment(float(d), float(a)))
            geometry[(i, j)] = ArcGeometry(i, j, tuple(segs))
        ids = [nd.id for nd in nodes]
        want = {(i, j) for i in ids for j in ids if i != j}
        missing = want - set(geometry)
        if missing:
            raise ValueError("explicit arc set incomplete, e.g. missing %s"
                             % sorted(missing)[:3])

    return Instance(header.get("name", "unnamed"), nodes, vehicles, geometry,
                    mode,
                    payload_factor=float(header.get("payload_factor", "1.0")),
                    demand_unit=float(header.get("demand_unit", "1.0")))


def load_instance(path) -> Instance:
    with open(path) as fh:
        return loads_instance(fh.read())


def load_segmented(path) -> Instance:
    """Load a file of surveyed arc geometry, enforcing the segment cap.

    Survey pre-processing splits each path into pieces of at most 1000 m so
    that a single grade angle per piece is a fair description; a longer
    segment means the file was produced wrong, so reject it and say where.
    """
    inst = load_instance(path)
    bad = []
    for (i, j), geom in sorted(inst.geometry.items()):
        if geom is None:
            continue
        for s in geom.segments:
            if s.distance > 1000.0:
                bad.append("%d->%d (%.0f m)" % (i, j, s.distance))
                break
    if bad:
        raise ValueError("segments longer than 1000 m on arcs: %s"
                         % ", ".join(bad))
    return inst
