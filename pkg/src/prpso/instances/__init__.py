"""Instance data model, file formats, generators, and transformations."""

from prpso.instances.model import Instance, Node, VehicleSpec, build_instance
from prpso.instances.rng import SplitMix64
from prpso.instances.solomon import adapt_solomon, parse_solomon
from prpso.instances.canonical import load_instance, save_instance, load_segmented
from prpso.instances.scaling import scale_instance, flatten_for_planning
from prpso.instances.synth import synth_solomon_text, synth_hilly

__all__ = [
    "Instance", "Node", "VehicleSpec", "build_instance",
    "SplitMix64",
    "adapt_solomon", "parse_solomon",
    "load_instance", "save_instance", "load_segmented",
    "scale_instance", "flatten_for_planning",
    "synth_solomon_text", "synth_hilly",
]
