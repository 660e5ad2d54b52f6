"""Exact solver: column generation over routes with branch and bound."""

from prpso.bp.solver import BpLimits, BpResult, solve_bp

__all__ = ["BpLimits", "BpResult", "solve_bp"]
