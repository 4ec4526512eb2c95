from dataclasses import dataclass
from typing import Tuple

import numpy as np


CLOSURE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Polyline:
    """A piecewise linear curve, parametrized by normalized arc length t in [0, 1]."""

    vertices: Tuple[complex, ...]
    closed: bool = False

    def __post_init__(self):
        vertices = tuple(complex(v) for v in self.vertices)
        if len(vertices) < 2:
            raise ValueError('A polyline needs at least two vertices')
        if any(a == b for a, b in zip(vertices, vertices[1:])):
            raise ValueError('Consecutive vertices have to be distinct')
        if self.closed:
            if abs(vertices[0] - vertices[-1]) > CLOSURE_TOLERANCE:
                raise ValueError('A closed polyline has to end where it starts')
            # make the closure exact
            vertices = vertices[:-1] + (vertices[0],)
        object.__setattr__(self, 'vertices', vertices)

    @classmethod
    def segment(cls, start: complex, end: complex):
        return cls((start, end))

    @classmethod
    def through(cls, *points: complex):
        return cls(tuple(points))

    @classmethod
    def circle(cls, center: complex = 0, radius: float = 1, n: int = 64, start_angle: float = 0, turns: int = 1):
        """Regular n-gon inscribed in the circle, counter-clockwise from center + radius e^(i start_angle)."""
        angles = start_angle + 2 * np.pi * np.arange(n * turns) / n
        vertices = list(center + radius * np.exp(1j * angles))
        return cls(tuple(vertices) + (vertices[0],), closed=True)

    @classmethod
    def polygon(cls, *corners: complex, turns: int = 1):
        vertices = list(corners) * turns
        return cls(tuple(vertices) + (corners[0],), closed=True)

    @property
    def points(self) -> np.ndarray:
        return np.array(self.vertices)

    @property
    def start(self) -> complex:
        return self.vertices[0]

    @property
    def end(self) -> complex:
        return self.vertices[-1]

    @property
    def cumulative_lengths(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(np.abs(np.diff(self.points)))])

    @property
    def length(self) -> float:
        return float(self.cumulative_lengths[-1])

    @property
    def parameters(self) -> np.ndarray:
        """Parameters of the vertices."""
        cumulative = self.cumulative_lengths
        parameters = cumulative / cumulative[-1]
        parameters[-1] = 1.0
        return parameters

    def point(self, t):
        parameters = self.parameters
        points = self.points
        result = np.interp(t, parameters, points.real) + 1j * np.interp(t, parameters, points.imag)
        if np.ndim(result) == 0:
            # exact vertices at the ends
            if t <= 0:
                return self.start
            if t >= 1:
                return self.end
            return complex(result)
        return result

    def reversed(self):
        return Polyline(self.vertices[::-1], closed=self.closed)

    def refined(self, times: int = 1):
        """Bisect every segment (repeatedly)."""
        points = self.points
        for _ in range(times):
            midpoints = (points[1:] + points[:-1]) / 2
            refined = np.empty(2 * len(points) - 1, dtype=complex)
            refined[0::2] = points
            refined[1::2] = midpoints
            points = refined
        return Polyline(tuple(points), closed=self.closed)

    def subcurve(self, t0: float, t1: float):
        """The open piece between parameters t0 and t1, traversed from t0 to t1."""
        if t0 > t1:
            return self.subcurve(t1, t0).reversed()
        if not 0 <= t0 < t1 <= 1:
            raise ValueError(f'Invalid parameter range [{t0}, {t1}]')
        parameters = self.parameters
        inner = [
            vertex
            for vertex, t in zip(self.vertices, parameters)
            if t0 < t < t1
        ]
        vertices = [self.point(t0)] + inner + [self.point(t1)]
        deduplicated = [vertices[0]]
        for vertex in vertices[1:]:
            if vertex != deduplicated[-1]:
                deduplicated.append(vertex)
        return Polyline(tuple(deduplicated))

    def __add__(self, other: 'Polyline'):
        if abs(self.end - other.start) > CLOSURE_TOLERANCE:
            raise ValueError('Curves can only be concatenated end to start')
        vertices = self.vertices + other.vertices[1:]
        closed = abs(vertices[0] - vertices[-1]) <= CLOSURE_TOLERANCE
        return Polyline(vertices, closed=closed)

    def distance_to(self, a: complex) -> float:
        """Euclidean distance from a to the polyline."""
        starts = self.points[:-1]
        steps = np.diff(self.points)
        s = np.clip(((a - starts) * steps.conj()).real / np.abs(steps) ** 2, 0, 1)
        return float(np.abs(starts + s * steps - a).min())

    def resampled(self, max_step: float):
        """Subdivide segments so that no piece is longer than max_step."""
        points = self.points
        pieces = [points[:1]]
        for start, end in zip(points[:-1], points[1:]):
            count = max(1, int(np.ceil(abs(end - start) / max_step)))
            pieces.append(start + (end - start) * np.arange(1, count + 1) / count)
        return Polyline(tuple(np.concatenate(pieces)), closed=self.closed)
