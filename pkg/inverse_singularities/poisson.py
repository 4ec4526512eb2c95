"""Poisson integrals of singular measures on the unit circle and their radial blow-up.

Measures are discrete at this scale: finitely many atoms, or a Cantor-like
measure whose mass is concentrated at the midpoints of its construction intervals.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from math import pi
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from data_frames import ReportFrame
from .errors import PreconditionError, ZeroMassError
from .fnmodel import normalize_angle


MAX_CANTOR_DEPTH = 20
ARC_CANDIDATES = 1024
BOUND_SLACK = 1e-6


def poisson_kernel(r, delta):
    """(1 - r^2) / (2 pi (1 + r^2 - 2 r cos delta))"""
    return (1 - r ** 2) / (2 * pi * (1 + r ** 2 - 2 * r * np.cos(delta)))


class SingularMeasure(ABC):

    @abstractmethod
    def atoms(self) -> Tuple[np.ndarray, np.ndarray]:
        """Angles in (-pi, pi] and positive masses of the point masses."""

    @property
    def total_mass(self) -> float:
        return float(self.atoms()[1].sum())


@dataclass(frozen=True)
class Atoms(SingularMeasure):
    points: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, 'points', tuple((float(t), float(m)) for t, m in self.points))
        if not self.points:
            raise ValueError('At least one atom is needed')
        for theta, mass in self.points:
            if not -pi < theta <= pi:
                raise ValueError(f'Atom angle {theta} outside of (-pi, pi]')
            if not mass > 0:
                raise ValueError(f'Atom masses have to be positive, got {mass}')

    def atoms(self):
        angles, masses = zip(*self.points)
        return np.array(angles), np.array(masses)


@dataclass(frozen=True)
class CantorLike(SingularMeasure):
    """Equal masses at the midpoints of the 2^depth intervals left after
    repeatedly keeping the outer quarters of each interval of the arc."""

    depth: int
    arc: Tuple[float, float] = (0.0, pi / 2)
    mass: float = 1.0

    def __post_init__(self):
        if not 0 <= self.depth <= MAX_CANTOR_DEPTH:
            raise ValueError(f'Depth has to lie in [0, {MAX_CANTOR_DEPTH}], got {self.depth}')
        a, b = self.arc
        if not a < b <= a + 2 * pi:
            raise ValueError(f'Invalid arc {self.arc}')
        if not self.mass > 0:
            raise ValueError('The total mass has to be positive')

    def atoms(self):
        a, b = self.arc
        starts = np.array([a])
        length = b - a
        for _ in range(self.depth):
            quarter = length / 4
            starts = np.stack([starts, starts + length - quarter], axis=1).ravel()
            length = quarter
        midpoints = starts + length / 2
        angles = np.array([normalize_angle(t) for t in midpoints])
        return angles, np.full(len(angles), self.mass / len(angles))


class PoissonEval(NamedTuple):
    r: float
    theta: float
    value: float


def _check_radius(r):
    if not 0 <= r < 1:
        raise PreconditionError(f'The radius has to lie in [0, 1), got {r}')


def poisson_values(measure: SingularMeasure, r: float, thetas) -> np.ndarray:
    _check_radius(r)
    angles, masses = measure.atoms()
    thetas = np.asarray(thetas, dtype=float)
    kernel = poisson_kernel(r, thetas[..., np.newaxis] - angles)
    return kernel @ masses


def poisson_integral(measure: SingularMeasure, r: float, theta: float) -> PoissonEval:
    value = float(poisson_values(measure, r, [theta])[0])
    return PoissonEval(r, theta, max(value, 0.0))


def mass_on_arc(measure: SingularMeasure, a: float, b: float) -> float:
    """Mass of the open arc from a counterclockwise to b."""
    if not a < b:
        raise PreconditionError(f'Empty arc ({a}, {b})')
    if b - a >= 2 * pi:
        return measure.total_mass
    angles, masses = measure.atoms()
    offset = np.mod(angles - a, 2 * pi)
    return float(masses[(offset > 0) & (offset < b - a)].sum())


def lower_bound(measure: SingularMeasure, theta: float, epsilon: float) -> float:
    """mu(theta - eps, theta + eps) / (2 pi eps), a lower bound of u at r = 1 - eps."""
    return mass_on_arc(measure, theta - epsilon, theta + epsilon) / (2 * pi * epsilon)


def average_over_circle(measure: SingularMeasure, r: float, n_theta: int = 4096) -> float:
    """Trapezoidal mean of u over the circle of radius r; total mass / 2 pi for any measure."""
    thetas = 2 * pi * np.arange(n_theta) / n_theta - pi
    return float(poisson_values(measure, r, thetas).mean())


@dataclass
class DivergenceScan:
    theta_star: float
    radii: List[float]
    values: List[float]
    lower_bounds: List[float] = field(default_factory=list)

    @property
    def bound_holds(self) -> List[bool]:
        return [
            value * (1 + BOUND_SLACK) >= bound
            for value, bound in zip(self.values, self.lower_bounds)
        ]

    @property
    def increasing(self) -> bool:
        return all(later > earlier for earlier, later in zip(self.values, self.values[1:]))

    def frame(self) -> ReportFrame:
        return ReportFrame({
            'r': self.radii,
            'theta': [self.theta_star] * len(self.radii),
            'u': self.values,
            'lower_bound': self.lower_bounds
        })

    def to_dict(self):
        return {
            'theta_star': self.theta_star,
            'radii': self.radii,
            'values': self.values,
            'lower_bounds': self.lower_bounds,
            'bound_holds': self.bound_holds
        }


def divergence_scan(measure: SingularMeasure, arc: Tuple[float, float], r_ladder: Sequence[float]) -> DivergenceScan:
    """Follow u along the radius through the point of the arc where u is largest at the last rung.

    Candidates are the atoms inside the arc and an even grid over it.
    """
    a, b = arc
    if mass_on_arc(measure, a, b) <= 0:
        raise ZeroMassError(f'The arc ({a}, {b}) carries no mass')
    radii = [float(r) for r in r_ladder]
    if not radii or any(later <= earlier for earlier, later in zip(radii, radii[1:])):
        raise PreconditionError('The radius ladder has to be non-empty and increasing')
    for r in radii:
        _check_radius(r)

    angles, _ = measure.atoms()
    offset = np.mod(angles - a, 2 * pi)
    inside = angles[(offset > 0) & (offset < b - a)]
    grid = np.linspace(a, b, ARC_CANDIDATES + 2)[1:-1]
    candidates = np.concatenate([inside, grid])
    theta_star = float(candidates[np.argmax(poisson_values(measure, radii[-1], candidates))])

    values = [poisson_integral(measure, r, theta_star).value for r in radii]
    bounds = [lower_bound(measure, theta_star, 1 - r) if r > 0 else 0.0 for r in radii]
    return DivergenceScan(theta_star, radii, values, bounds)
