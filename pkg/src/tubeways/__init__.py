"""Non-crossing paths through tubes.

A tube is the convex hull of two vertical segments. Given a set of tubes,
the question is whether every tube can be connected, left segment to right
segment, by a path inside it so that no two paths meet. Three regimes are
covered: straight segments, x-monotone curves, and arbitrary curves on
instances without double intersections. A compiler turns 3-SAT formulas
into straight-segment instances.
"""

from .model import Instance, Polyline, Solution, Tube, VSeg, parse_instance, tube_from_segments, validate_solution

__version__ = "0.1.0"

__all__ = [
    "Instance",
    "Polyline",
    "Solution",
    "Tube",
    "VSeg",
    "parse_instance",
    "tube_from_segments",
    "validate_solution",
]
