"""Pollution-routing with speed optimization.

Routing toolkit for time-windowed delivery with slope- and payload-aware fuel
costs: an exact branch-and-price solver, a tabu-search heuristic, a quadratic
fixed-sequence speed optimizer, instance tooling, and a CLI harness.
"""

__version__ = "0.1.0"
