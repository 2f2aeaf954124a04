"""Angle arithmetic on the mod-180 orientation circle."""

from __future__ import annotations

import math

__all__ = ["wrap_orientation", "orientation_difference", "wrapped_orientation", "fold_to_quadrant"]


def wrap_orientation(deg: float) -> float:
    """Reduce an angle mod 180 deg into the half-open interval (-90, +90]."""
    w = math.fmod(deg, 180.0)
    if w <= -90.0:
        w += 180.0
    elif w > 90.0:
        w -= 180.0
    return w


def orientation_difference(a_deg: float, b_deg: float) -> float:
    """Absolute distance between two orientations on the mod-180 circle, in [0, 90]."""
    d = abs(math.fmod(a_deg - b_deg, 180.0))
    return min(d, 180.0 - d)


def wrapped_orientation(phi_deg: float, alpha_deg: float) -> float:
    """The wrapped orientation function phi - alpha, reduced into (-90, +90].

    Its zero crossings mark the rotation angles where the pattern runs
    parallel to the rotated layer.
    """
    return wrap_orientation(phi_deg - alpha_deg)


def fold_to_quadrant(alpha_deg: float) -> float:
    """Fold a rotation angle onto its canonical representative in [0, 90].

    Mirrored (-a) and quarter-turn shifted (a + 90) rotations of a linear
    layer over a square grid produce the same pattern family, so -18.4, +18.4
    and 108.4 all fold to 18.4.
    """
    t = abs(alpha_deg)
    while t > 90.0:
        t -= 90.0
    return t
