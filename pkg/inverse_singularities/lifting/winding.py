import numpy as np

from .curves import Polyline
from ..errors import NotClosedError, OnCurveError
from ..fnmodel import EntireFunctionSpec


ON_CURVE_DISTANCE = 1e-9
INTEGER_TOLERANCE = 1e-6

# largest turn of the image about a allowed between two image samples
MAX_IMAGE_TURN = np.pi / 8
MAX_BISECTIONS = 24


def _turns(points: np.ndarray, a: complex) -> float:
    shifted = points - a
    # a straight segment missing a subtends less than pi, so principal increments add up exactly
    return float(np.angle(shifted[1:] / shifted[:-1]).sum() / (2 * np.pi))


def _as_integer(turns: float) -> int:
    rounded = round(turns)
    if abs(turns - rounded) > INTEGER_TOLERANCE:
        raise ValueError(f'Winding sum {turns} is not an integer')
    return int(rounded)


def winding_number(curve: Polyline, a: complex) -> int:
    if not curve.closed:
        raise NotClosedError('Winding numbers are defined for closed curves only')
    if curve.distance_to(a) < ON_CURVE_DISTANCE:
        raise OnCurveError(f'{a} lies on the curve')
    return _as_integer(_turns(curve.points, a))


def image_winding_number(spec: EntireFunctionSpec, loop: Polyline, a: complex) -> int:
    """Winding number of f(loop) about a, that is the number of a-points inside the loop.

    The loop is bisected until consecutive image points turn by less than pi/8 about a.
    """
    if not loop.closed:
        raise NotClosedError('Winding numbers are defined for closed curves only')

    points = loop.points
    for _ in range(MAX_BISECTIONS):
        image = np.asarray(spec.values(points)[0], dtype=complex) - a
        if (np.abs(image) < ON_CURVE_DISTANCE).any():
            raise OnCurveError(f'The image of the loop passes through {a}')
        turns = np.abs(np.angle(image[1:] / image[:-1]))
        coarse = turns > MAX_IMAGE_TURN
        if not coarse.any():
            return _as_integer(_turns(image + a, a))
        midpoints = (points[1:] + points[:-1]) / 2
        insert_at = np.flatnonzero(coarse) + 1
        points = np.insert(points, insert_at, midpoints[coarse])
    raise ValueError('The image of the loop could not be resolved; use a loop further away from critical points')


def is_a_monotonic(curve: Polyline, a: complex) -> bool:
    """Whether |w - a| is strictly monotonic along the curve (every circle about a is met at most once)."""
    if curve.closed:
        return False
    points = curve.points
    starts, steps = points[:-1], np.diff(points)
    # |start + s step - a|^2 is a parabola in s with its vertex at s_star
    s_star = ((a - starts) * steps.conj()).real / np.abs(steps) ** 2
    increasing = (s_star <= 0).all()
    decreasing = (s_star >= 1).all()
    return bool(increasing or decreasing)
