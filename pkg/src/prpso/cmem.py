"""Physics-based fuel model for diesel trucks on sloped roads.

A vehicle class bundles the engine/vehicle constants; an arc is a sequence of
road segments (distance, angle). Fuel use over an arc collapses to the closed
form alpha/v + beta*(curb+payload) + gamma*v^2 once the per-arc coefficients
have been compiled, so the solvers never touch the segment lists again.

All quantities are SI: meters, seconds, kilograms, m/s, radians; fuel in
liters, money in EUR. Speeds are m/s everywhere (the cubic drag term in the
rate expression only makes sense in m/s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class VehicleClass:
    """Vehicle/engine constants plus the fleet-level economics.

    engine_friction  F   kJ/rev/liter
    engine_speed     N   rev/s
    displacement     V   liters
    frontal_area     A   m^2
    drag_coeff       Cd  --
    rolling_coeff    Cr  --
    acceleration     r   m/s^2
    curb_weight      w   kg
    heating_value    kappa    kJ/g
    drivetrain_eff   epsilon  --
    diesel_eff       varpi    --
    fuel_air_ratio   xi       --
    grams_per_liter  psi      g/L
    air_density      rho      kg/m^3
    gravity          g        m/s^2
    capacity         Q   kg
    fixed_cost       f   EUR
    fuel_price       c   EUR/L
    speed_min        a   m/s
    speed_max        b   m/s
    """

    name: str
    engine_friction: float
    engine_speed: float
    displacement: float
    frontal_area: float
    drag_coeff: float
    rolling_coeff: float
    acceleration: float
    curb_weight: float
    heating_value: float
    drivetrain_eff: float
    diesel_eff: float
    fuel_air_ratio: float
    grams_per_liter: float
    air_density: float
    gravity: float
    capacity: float
    fixed_cost: float
    fuel_price: float
    speed_min: float
    speed_max: float

    def __post_init__(self):
        positive = (
            "engine_friction", "engine_speed", "displacement", "frontal_area",
            "drag_coeff", "rolling_coeff", "curb_weight", "heating_value",
            "drivetrain_eff", "diesel_eff", "fuel_air_ratio", "grams_per_liter",
            "air_density", "gravity", "capacity",
        )
        for field in positive:
            if getattr(self, field) <= 0:
                raise ValueError(f"{field} must be strictly positive")
        if self.acceleration < 0:
            raise ValueError("acceleration must be >= 0")
        if not 0 < self.speed_min <= self.speed_max:
            raise ValueError("need 0 < speed_min <= speed_max")

    @property
    def engine_power_term(self) -> float:
        """F*N*V, the idle engine module of the rate expression (kJ/s)."""
        return self.engine_friction * self.engine_speed * self.displacement


# Reference parameter sets for light, medium and heavy duty diesel trucks.
_PHYSICS = {
    "LDV": dict(engine_friction=0.23, engine_speed=35.0, displacement=3.0,
                frontal_area=5.0, drag_coeff=0.32, rolling_coeff=0.01,
                curb_weight=2300.0),
    "MDV": dict(engine_friction=0.20, engine_speed=34.0, displacement=7.0,
                frontal_area=7.6, drag_coeff=0.55, rolling_coeff=0.009,
                curb_weight=5500.0),
    "HDV": dict(engine_friction=0.17, engine_speed=33.0, displacement=11.0,
                frontal_area=8.2, drag_coeff=0.70, rolling_coeff=0.008,
                curb_weight=13000.0),
}


def standard_vehicle(kind: str, capacity: float, fixed_cost: float = 100.0,
                     fuel_price: float = 1.42, speed_min: float = 1.0,
                     speed_max: float = 80.0 / 3.6) -> VehicleClass:
    """Build an LDV/MDV/HDV with the reference physics constants."""
    try:
        phys = _PHYSICS[kind]
    except KeyError:
        raise ValueError(f"unknown vehicle kind {kind!r}, expected LDV/MDV/HDV") from None
    return VehicleClass(
        name=kind,
        acceleration=0.0,
        heating_value=45.0,
        drivetrain_eff=0.4,
        diesel_eff=0.9,
        fuel_air_ratio=1.0,
        grams_per_liter=737.0,
        air_density=1.2041,
        gravity=9.81,
        capacity=capacity,
        fixed_cost=fixed_cost,
        fuel_price=fuel_price,
        speed_min=speed_min,
        speed_max=speed_max,
        **phys,
    )


@dataclass(frozen=True)
class Segment:
    """One road segment: slope distance in meters, grade angle in radians."""

    distance: float
    angle: float

    def __post_init__(self):
        if self.distance <= 0:
            raise ValueError("segment distance must be > 0")
        if not abs(self.angle) < math.pi / 2:
            raise ValueError("segment angle must satisfy |angle| < pi/2")


@dataclass(frozen=True)
class ArcGeometry:
    from_node: int
    to_node: int
    segments: tuple[Segment, ...]

    def __post_init__(self):
        if not self.segments:
            raise ValueError("arc needs at least one segment")

    @property
    def total_distance(self) -> float:
        return sum(s.distance for s in self.segments)


@dataclass(frozen=True)
class ArcCoefficients:
    """Per-(vehicle class, arc) fuel constants.

    fuel(v, payload) = alpha/v + beta*(curb_weight + payload) + gamma*v^2,
    in liters. beta can go negative on net-downhill arcs; that is a property
    of the model and is deliberately not clamped (the completion bounds in
    the exact solver rely on the sign).
    """

    alpha: float
    beta: float
    gamma: float


def instantaneous_rate(vc: VehicleClass, speed: float, payload: float,
                       angle: float) -> float:
    """Fuel use rate (L/s) at constant speed on a constant grade."""
    if speed <= 0:
        raise ValueError("speed must be > 0")
    if payload < 0:
        raise ValueError("payload must be >= 0")
    tractive = (vc.acceleration
                + vc.gravity * math.sin(angle)
                + vc.gravity * vc.rolling_coeff * math.cos(angle))
    module = (0.5 * vc.drag_coeff * vc.frontal_area * vc.air_density * speed ** 3
              + (vc.curb_weight + payload) * speed * tractive)
    eta = 1000.0 * vc.drivetrain_eff * vc.diesel_eff
    return (vc.fuel_air_ratio / (vc.heating_value * vc.grams_per_liter)
            * (vc.engine_power_term + module / eta))


def compile_arc(vc: VehicleClass, geom: ArcGeometry) -> ArcCoefficients:
    """Aggregate an arc's segments into (alpha, beta, gamma)."""
    total = 0.0
    grade_sum = 0.0
    for seg in geom.segments:
        total += seg.distance
        grade_sum += seg.distance * (vc.acceleration
                                     + vc.gravity * math.sin(seg.angle)
                                     + vc.gravity * vc.rolling_coeff * math.cos(seg.angle))
    kp = vc.heating_value * vc.grams_per_liter
    eta = 1000.0 * vc.drivetrain_eff * vc.diesel_eff
    alpha = vc.fuel_air_ratio * vc.engine_power_term * total / kp
    beta = vc.fuel_air_ratio * grade_sum / (eta * kp)
    gamma = (0.5 * vc.fuel_air_ratio * vc.drag_coeff * vc.frontal_area
             * vc.air_density * total / (eta * kp))
    return ArcCoefficients(alpha=alpha, beta=beta, gamma=gamma)


def fuel_for_arc(coeff: ArcCoefficients, vc: VehicleClass, payload: float,
                 speed: float) -> float:
    """Liters of fuel to traverse a compiled arc at the given speed/payload."""
    if speed <= 0:
        raise ValueError("speed must be > 0")
    if payload < 0:
        raise ValueError("payload must be >= 0")
    return (coeff.alpha / speed
            + coeff.beta * (vc.curb_weight + payload)
            + coeff.gamma * speed ** 2)


def cruise_speed_unbounded(vc: VehicleClass) -> float:
    """The speed minimizing alpha/v + gamma*v^2 per meter, ignoring limits."""
    eta = 1000.0 * vc.drivetrain_eff * vc.diesel_eff
    return ((vc.fuel_air_ratio * vc.engine_power_term * eta)
            / (vc.drag_coeff * vc.frontal_area * vc.air_density)) ** (1.0 / 3.0)


def efficient_speed(vc: VehicleClass) -> float:
    """Cost-minimizing cruise speed clipped into [speed_min, speed_max]."""
    vbar = cruise_speed_unbounded(vc)
    if vbar <= vc.speed_min:
        return vc.speed_min
    if vbar >= vc.speed_max:
        return vc.speed_max
    return vbar
