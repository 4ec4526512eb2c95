"""The binary tree on which the example tends to zero.

Angles are kept as exact multiples of pi (Fractions), so that adjacency of
the connecting arcs and the radial segments can be asserted exactly.
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import pi
from typing import Dict, List, Tuple, Union

import numpy as np

from ..components import Window
from ..errors import EpsilonRangeError, PreconditionError
from ..lifting import Polyline


MAX_EPSILON = Fraction(1, 8)

Epsilon = Union[Fraction, float]


def check_epsilon(epsilon: Epsilon) -> Fraction:
    exact = Fraction(epsilon)
    if not 0 < exact <= MAX_EPSILON:
        raise EpsilonRangeError(f'Epsilon has to lie in (0, 1/8], got {epsilon}')
    return exact


@dataclass(frozen=True)
class LevelGeometry:
    n: int
    epsilon: Fraction
    r_n: float
    r_n_prime: float

    def __post_init__(self):
        if not self.r_n < self.r_n_prime:
            raise ValueError(f'r_n = {self.r_n} has to be below r_n\' = {self.r_n_prime}')

    @property
    def next_radius(self) -> float:
        """r_{n+1}, where the arcs of this level end."""
        return level_geometry(self.n + 1, self.epsilon).r_n

    @property
    def annulus(self) -> Tuple[float, float]:
        """Radii on which the argument of g increases monotonically."""
        epsilon = self.epsilon
        return float((1 + 2 * epsilon) * 2 ** (self.n + 1)), float((1 - 3 * epsilon) * 2 ** (self.n + 2))


def level_geometry(n: int, epsilon: Epsilon) -> LevelGeometry:
    epsilon = check_epsilon(epsilon)
    if n < 1:
        raise PreconditionError(f'Levels start at 1, got {n}')
    return LevelGeometry(
        n=n,
        epsilon=epsilon,
        r_n=float((1 + epsilon) * 2 ** (n + 1)),
        r_n_prime=float((1 - 2 * epsilon) * 2 ** (n + 2))
    )


class SetKind(Enum):
    A = 'A'
    B = 'B'
    Cplus = 'C+'
    Cminus = 'C-'


@dataclass(frozen=True)
class TreeSet:
    """One of the rays A, radial segments B or connecting arcs C+/C- of level n."""

    kind: SetKind
    j: int
    n: int
    epsilon: Fraction

    def __post_init__(self):
        object.__setattr__(self, 'epsilon', check_epsilon(self.epsilon))
        if not 0 <= self.j < 2 ** self.n:
            raise ValueError(f'j = {self.j} outside of [0, 2^{self.n})')

    @property
    def geometry(self) -> LevelGeometry:
        return level_geometry(self.n, self.epsilon)

    @property
    def name(self) -> str:
        return f'{self.kind.value}[{self.j},{self.n}]'

    @property
    def angle_over_pi(self) -> Fraction:
        """Angle (in units of pi) at the inner end of the set."""
        if self.kind is SetKind.A:
            return Fraction(2 * self.j, 2 ** self.n)
        return Fraction(2 * self.j + 1, 2 ** self.n)

    @property
    def end_angle_over_pi(self) -> Fraction:
        """Angle (in units of pi) at the outer end; the arcs turn by half a sector."""
        turn = Fraction(1, 2 ** (self.n + 1))
        if self.kind is SetKind.Cplus:
            return self.angle_over_pi + turn
        if self.kind is SetKind.Cminus:
            return self.angle_over_pi - turn
        return self.angle_over_pi

    @property
    def radial_range(self) -> Tuple[float, float]:
        """Radii covered by the set; the unbounded rays are truncated at r_{n+2}."""
        geometry = self.geometry
        if self.kind is SetKind.A:
            return geometry.r_n, level_geometry(self.n + 2, self.epsilon).r_n
        if self.kind is SetKind.B:
            return geometry.r_n, geometry.r_n_prime
        return geometry.r_n_prime, geometry.next_radius

    def angle(self, r):
        """Angle of the point of the set at radius r (vectorized)."""
        start = float(self.angle_over_pi) * pi
        if self.kind in (SetKind.A, SetKind.B):
            return np.full_like(np.asarray(r, dtype=float), start)
        inner, outer = self.radial_range
        sign = 1 if self.kind is SetKind.Cplus else -1
        return start + sign * (np.asarray(r, dtype=float) - inner) / (outer - inner) * pi / 2 ** (self.n + 1)

    def radii(self, samples: int, r_max: float = None) -> np.ndarray:
        inner, outer = self.radial_range
        return np.linspace(inner, outer if r_max is None else r_max, samples)

    def points(self, samples: int = 64, r_max: float = None) -> np.ndarray:
        r = self.radii(samples, r_max)
        return r * np.exp(1j * self.angle(r))

    @property
    def start(self) -> complex:
        return complex(self.points(2)[0])

    @property
    def end(self) -> complex:
        return complex(self.points(2)[-1])


def inside(window: Window, points: np.ndarray) -> np.ndarray:
    offset = np.asarray(points) - window.center
    return (np.abs(offset.real) <= window.half_width) & (np.abs(offset.imag) <= window.half_height)


@dataclass
class TreeGraph:
    """Radial segments (nodes) joined by arcs (edges), rooted at [-i r_1, i r_1]."""

    epsilon: Fraction
    n_max: int
    window: Window
    root_segment: Polyline
    nodes: List[TreeSet] = field(default_factory=list)
    edges: List[TreeSet] = field(default_factory=list)
    rays: List[TreeSet] = field(default_factory=list)

    def node(self, j: int, n: int) -> TreeSet:
        return TreeSet(SetKind.B, j, n, self.epsilon)

    def children(self, node: TreeSet) -> List[TreeSet]:
        if node.n >= self.n_max:
            return []
        return [self.node(2 * node.j, node.n + 1), self.node(2 * node.j + 1, node.n + 1)]

    def edges_from(self, node: TreeSet) -> List[TreeSet]:
        if node.n >= self.n_max:
            return []
        return [
            TreeSet(SetKind.Cminus, node.j, node.n, self.epsilon),
            TreeSet(SetKind.Cplus, node.j, node.n, self.epsilon)
        ]

    def sets(self) -> List[TreeSet]:
        return self.nodes + self.edges

    def visible_counts(self, samples: int = 64) -> Dict[int, int]:
        """Number of radial segments lying entirely within the window, per level."""
        counts = {n: 0 for n in range(1, self.n_max + 1)}
        for node in self.nodes:
            if inside(self.window, node.points(samples)).all():
                counts[node.n] += 1
        return counts


def build_tree(epsilon: Epsilon, n_max: int, window: Window) -> TreeGraph:
    epsilon = check_epsilon(epsilon)
    if n_max < 0:
        raise PreconditionError(f'n_max has to be non-negative, got {n_max}')

    r_1 = level_geometry(1, epsilon).r_n
    tree = TreeGraph(epsilon, n_max, window, Polyline.segment(-1j * r_1, 1j * r_1))

    for n in range(1, n_max + 1):
        for j in range(2 ** n):
            node = tree.node(j, n)
            tree.nodes.append(node)
            tree.rays.append(TreeSet(SetKind.A, j, n, epsilon))
            for edge, child in zip(tree.edges_from(node), tree.children(node)):
                assert edge.end_angle_over_pi == child.angle_over_pi
                tree.edges.append(edge)

    return tree
