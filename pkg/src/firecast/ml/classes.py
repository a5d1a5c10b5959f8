"""Fire severity letter classes over burned acres.

The published class table leaves gaps between printed bounds (0.25 vs
0.26, 9.9 vs 10.0); the mapping here closes them into a continuous
partition of [0, inf): A = [0, 0.25], B = (0.25, 10), then half-open
decades [10,100), [100,300), [300,1000), [1000,5000), and G = [5000, inf).
"""

from __future__ import annotations

import math

from .errors import NegativeSize

# (letter, lower bound, upper bound); see module docstring for closures.
SIZE_CLASSES = [
    ("A", 0.0, 0.25),
    ("B", 0.25, 10.0),
    ("C", 10.0, 100.0),
    ("D", 100.0, 300.0),
    ("E", 300.0, 1000.0),
    ("F", 1000.0, 5000.0),
    ("G", 5000.0, math.inf),
]

CLASS_LETTERS = [c[0] for c in SIZE_CLASSES]


def classify_fire_size(acres: float) -> str:
    """Map burned acres to the A-G severity letter."""
    if not acres >= 0.0:
        raise NegativeSize(f"acres must be >= 0: {acres!r}")
    if acres <= 0.25:
        return "A"
    if acres < 10.0:
        return "B"
    if acres < 100.0:
        return "C"
    if acres < 300.0:
        return "D"
    if acres < 1000.0:
        return "E"
    if acres < 5000.0:
        return "F"
    return "G"
