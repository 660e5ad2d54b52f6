"""Instance model, file formats, generators, scaling."""

import math
import warnings

import numpy as np
import pytest

from prpso.cmem import ArcGeometry, Segment, standard_vehicle
from prpso.instances import (
    Instance, Node, SplitMix64, VehicleSpec, adapt_solomon, build_instance,
    flatten_for_planning, load_instance, load_segmented, parse_solomon,
    save_instance, scale_instance, synth_hilly, synth_solomon_text,
)
from prpso.instances.canonical import dumps_instance, loads_instance

SOLOMON_SAMPLE = """\
TOY5

VEHICLE
NUMBER     CAPACITY
   4         200

CUSTOMER
CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE   TIME

    0      40         50          0          0       1236          0
    1      45         68         10        912        967         90
    2      45         70         30        825        870         90
    3      42         66         10         65        146         90
    4      42         68         20        727        782         90
    5      42         65         10         15         67         90
"""


def small_instance():
    return adapt_solomon(SOLOMON_SAMPLE, seed=42)


# splitmix64 reference outputs (public algorithm, fixed constants)
def test_splitmix64_known_answers():
    assert SplitMix64(0).next_u64() == 0xE220A8397B1DCDAF
    g = SplitMix64(1234567)
    assert [g.next_u64() for _ in range(3)] == [
        6457827717110365317, 3203168211198807973, 9817491932198370423]


def test_splitmix64_uniform_bounds_and_determinism():
    a = SplitMix64(99)
    b = SplitMix64(99)
    xs = [a.uniform(0.0, 1000.0) for _ in range(500)]
    assert xs == [b.uniform(0.0, 1000.0) for _ in range(500)]
    assert all(0.0 <= x < 1000.0 for x in xs)
    assert min(xs) < 100 and max(xs) > 900  # spread sanity


def test_splitmix64_randint_range():
    g = SplitMix64(7)
    vals = {g.randint(3, 9) for _ in range(300)}
    assert vals == set(range(3, 10))


def test_parse_solomon_fields():
    raw = parse_solomon(SOLOMON_SAMPLE)
    assert raw.name == "TOY5"
    assert raw.vehicle_number == 4 and raw.capacity == 200
    assert len(raw.rows) == 6
    assert raw.rows[2] == (2, 45.0, 70.0, 30.0, 825.0, 870.0, 90.0)


def test_adapt_time_and_demand_scaling():
    inst = small_instance()
    # due date 1236 -> 24.72 h
    assert inst.horizon == 1236 * 72.0 == 88992.0
    assert inst.nodes[1].ready == 912 * 72.0
    # demand 20 units on a 200-capacity file -> 120 kg
    assert inst.nodes[4].demand == 120.0
    assert inst.vehicles[0].vc.capacity == 1200.0
    assert inst.vehicles[0].vc.name == "LDV"
    assert inst.vehicles[0].count == 4
    assert inst.demand_unit == 6.0
    assert list(inst.demand_units) == [0, 10, 30, 10, 20, 10]


def test_adapt_elevations_seeded():
    inst = small_instance()
    zs = [nd.elevation for nd in inst.nodes]
    assert all(0.0 <= z < 1000.0 for z in zs)
    g = SplitMix64(42)
    assert zs == [g.uniform(0.0, 1000.0) for _ in range(6)]
    other = adapt_solomon(SOLOMON_SAMPLE, seed=43)
    assert [nd.elevation for nd in other.nodes] != zs


def test_adapt_distance_rounding_and_angle():
    inst = small_instance()
    a, b = inst.nodes[1], inst.nodes[2]
    dz_km = (a.elevation - b.elevation) / 1000.0
    d_km = math.sqrt((a.x - b.x) ** 2 + (a.y - b.y) ** 2 + dz_km ** 2)
    assert inst.dist[1, 2] == round(d_km * 1000.0)
    geom = inst.geometry[(1, 2)]
    assert len(geom.segments) == 1
    seg = geom.segments[0]
    # tan(angle) * D recovers the elevation difference exactly
    assert math.isclose(math.tan(seg.angle) * seg.distance,
                        b.elevation - a.elevation, rel_tol=1e-12)
    rev = inst.geometry[(2, 1)].segments[0]
    assert rev.distance == seg.distance
    assert math.isclose(rev.angle, -seg.angle, rel_tol=1e-12)


def test_adapt_equal_elevation_gives_zero_angle():
    nodes = [Node(0, 0.0, 0.0, 250.0, 0.0, 0.0, 1000.0, 0.0),
             Node(1, 3.0, 4.0, 250.0, 5.0, 0.0, 1000.0, 0.0)]
    vc = standard_vehicle("LDV", capacity=100.0)
    inst = build_instance("flatpair", nodes, [VehicleSpec(vc, 1)])
    assert inst.geometry[(0, 1)].segments[0].angle == 0.0
    assert inst.dist[0, 1] == 5000.0


def test_adapt_rejects_unknown_capacity():
    bad = SOLOMON_SAMPLE.replace("200", "500")
    with pytest.raises(ValueError, match="capacity 500"):
        adapt_solomon(bad, seed=1)


def test_adapt_customer_subset():
    inst = adapt_solomon(SOLOMON_SAMPLE, seed=42, n_customers=3)
    assert inst.n_customers == 3
    full = small_instance()
    # same stream position -> identical elevations for the kept nodes
    assert [nd.elevation for nd in inst.nodes] == \
        [nd.elevation for nd in full.nodes[:4]]


def test_unreachable_node_warns():
    nodes = [Node(0, 0.0, 0.0, 0.0, 0.0, 0.0, 10.0, 0.0),
             Node(1, 50.0, 0.0, 0.0, 5.0, 0.0, 8.0, 0.0)]
    vc = standard_vehicle("LDV", capacity=100.0)
    with pytest.warns(UserWarning, match="unreachable"):
        build_instance("far", nodes, [VehicleSpec(vc, 1)])


def test_coefficient_tables_match_single_arc_compile():
    from prpso.cmem import compile_arc
    inst = small_instance()
    geom = inst.geometry[(3, 5)]
    coeff = compile_arc(inst.vehicles[0].vc, geom)
    assert inst.alpha[0][3, 5] == coeff.alpha
    assert inst.beta[0][3, 5] == coeff.beta
    assert inst.gamma[0][3, 5] == coeff.gamma
    assert inst.alpha[0][2, 2] == 0.0


def test_canonical_roundtrip_derived(tmp_path):
    inst = small_instance()
    p = tmp_path / "toy.prpso"
    save_instance(inst, p)
    loaded = load_instance(p)
    assert loaded.name == inst.name
    assert np.array_equal(loaded.dist, inst.dist)
    assert np.array_equal(loaded.alpha[0], inst.alpha[0])
    assert np.array_equal(loaded.beta[0], inst.beta[0])
    # byte-identical second generation
    assert dumps_instance(loaded) == p.read_text()


def test_canonical_roundtrip_explicit(tmp_path):
    inst = synth_hilly(6, seed=3)
    p = tmp_path / "hill.prpso"
    save_instance(inst, p)
    loaded = load_segmented(p)
    assert loaded.arcs_mode == "explicit"
    assert np.array_equal(loaded.dist, inst.dist)
    assert np.array_equal(loaded.beta[0], inst.beta[0])
    assert dumps_instance(loaded) == p.read_text()


def test_canonical_rejects_bad_magic():
    with pytest.raises(ValueError, match="PRPSO"):
        loads_instance("nonsense\n")


def test_load_segmented_total_distance(tmp_path):
    vc = standard_vehicle("LDV", capacity=100.0)
    nodes = [Node(0, 0.0, 0.0, 0.0, 0.0, 0.0, 9000.0, 0.0),
             Node(1, 1.0, 1.0, 10.0, 6.0, 0.0, 9000.0, 0.0)]
    geom = {
        (0, 1): ArcGeometry(0, 1, (Segment(400.0, 0.0), Segment(600.0, 0.01),
                                   Segment(950.0, -0.01))),
        (1, 0): ArcGeometry(1, 0, (Segment(1950.0 / 2, 0.0),
                                   Segment(1950.0 / 2, 0.0))),
    }
    inst = Instance("seg", nodes, [VehicleSpec(vc, 1)], geom, "explicit",
                    demand_unit=2.0)
    p = tmp_path / "seg.prpso"
    save_instance(inst, p)
    assert load_segmented(p).dist[0, 1] == 1950.0


def test_load_segmented_rejects_overlength(tmp_path):
    vc = standard_vehicle("LDV", capacity=100.0)
    nodes = [Node(0, 0.0, 0.0, 0.0, 0.0, 0.0, 9000.0, 0.0),
             Node(1, 1.0, 1.0, 10.0, 6.0, 0.0, 9000.0, 0.0)]
    geom = {(0, 1): ArcGeometry(0, 1, (Segment(1001.0, 0.0),)),
            (1, 0): ArcGeometry(1, 0, (Segment(999.0, 0.0),))}
    inst = Instance("seg", nodes, [VehicleSpec(vc, 1)], geom, "explicit",
                    demand_unit=2.0)
    p = tmp_path / "seg.prpso"
    save_instance(inst, p)
    with pytest.raises(ValueError, match=r"0->1 \(1001 m\)"):
        load_segmented(p)
    load_instance(p)  # the plain loader does not enforce the cap


def test_scale_r2_zero_matches_flattened():
    inst = small_instance()
    flat = flatten_for_planning(inst)
    scaled = scale_instance(inst, 1.0, 0.0)
    assert np.array_equal(scaled.beta[0], flat.beta[0])
    assert np.array_equal(scaled.dist, inst.dist)
    assert np.array_equal(scaled.alpha[0], inst.alpha[0])
    # flat instance keeps rolling resistance in beta, drops gravity
    assert (flat.beta[0][inst.dist > 0] > 0).all()


def test_scale_r1_affects_cost_demand_only():
    inst = small_instance()
    scaled = scale_instance(inst, 0.3, 1.0)
    assert np.allclose(scaled.cost_demand, 0.3 * inst.demand)
    assert np.array_equal(scaled.demand, inst.demand)
    assert scaled.cost_capacity(0) == pytest.approx(0.3 * 1200.0)
    assert scaled.capacity_units(0) == inst.capacity_units(0)
    with pytest.raises(ValueError):
        scale_instance(inst, 1.2, 0.5)


def test_scale_identity():
    inst = small_instance()
    same = scale_instance(inst, 1.0, 1.0)
    assert np.array_equal(same.beta[0], inst.beta[0])
    assert np.array_equal(same.cost_demand, inst.cost_demand)


def test_synth_solomon_parses_and_adapts():
    for style in ("c1", "r1", "rc1"):
        text = synth_solomon_text(style, 12, seed=5)
        assert text == synth_solomon_text(style, 12, seed=5)
        raw = parse_solomon(text)
        assert len(raw.rows) == 13
        assert raw.capacity == 200
        for rid, x, y, q, e, l, s in raw.rows[1:]:
            assert 0 <= e <= l <= raw.rows[0][5]
            assert q > 0
        inst = adapt_solomon(raw, seed=11)
        assert inst.n_customers == 12


def test_synth_solomon_reference_schedule_is_feasible():
    # replay greedy routes on the generated planar data: windows must admit
    # the very schedule they were cut from
    text = synth_solomon_text("c1", 20, seed=9)
    raw = parse_solomon(text)
    rows = raw.rows
    pending = list(range(1, 21))
    while pending:
        x, y, t, load = rows[0][1], rows[0][2], 0.0, 0.0
        progressed = False
        while pending:
            c = min(pending, key=lambda i: (math.hypot(rows[i][1] - x,
                                                       rows[i][2] - y), i))
            r = rows[c]
            arr = t + math.hypot(r[1] - x, r[2] - y)
            if load + r[3] > raw.capacity or arr > r[5]:
                break
            pending.remove(c)
            progressed = True
            t = max(arr, r[4]) + r[6]
            load += r[3]
            x, y = r[1], r[2]
        assert progressed


def test_synth_hilly_segment_geometry():
    inst = synth_hilly(10, seed=4)
    assert inst.n_customers == 10
    for (i, j), geom in inst.geometry.items():
        rise = sum(s.distance * math.sin(s.angle) for s in geom.segments)
        dz = inst.nodes[j].elevation - inst.nodes[i].elevation
        assert math.isclose(rise, dz, rel_tol=1e-9, abs_tol=1e-9)
        assert all(s.distance < 1000.0 for s in geom.segments)
    assert np.all(inst.demand_units[1:] >= 5)
    assert inst.capacity_units(0) == 120


def test_synth_hilly_deterministic():
    a = synth_hilly(8, seed=17)
    b = synth_hilly(8, seed=17)
    assert np.array_equal(a.dist, b.dist)
    assert np.array_equal(a.beta[0], b.beta[0])
    assert [nd.ready for nd in a.nodes] == [nd.ready for nd in b.nodes]


def test_demand_unit_mismatch_rejected():
    nodes = [Node(0, 0.0, 0.0, 0.0, 0.0, 0.0, 1000.0, 0.0),
             Node(1, 1.0, 0.0, 0.0, 7.0, 0.0, 1000.0, 0.0)]
    vc = standard_vehicle("LDV", capacity=100.0)
    with pytest.raises(ValueError, match="demand unit"):
        build_instance("odd", nodes, [VehicleSpec(vc, 1)], demand_unit=2.0)


def test_depot_must_have_zero_demand():
    with pytest.raises(ValueError, match="depot"):
        Node(0, 0.0, 0.0, 0.0, 5.0, 0.0, 10.0, 0.0)
