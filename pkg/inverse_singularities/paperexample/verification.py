"""Numerical checks of the growth estimates for g along the tree and on circles."""
from dataclasses import dataclass, field
from math import inf, pi
from typing import Dict, Iterable, List, Tuple

import numpy as np

from data_frames import ReportFrame
from helpers import WarningManager, map_with_shared
from helpers.mathtools import circular_runs
from config import DEFAULT_TRUNCATION_TOLERANCE
from .geometry import Epsilon, SetKind, TreeGraph, TreeSet, check_epsilon, level_geometry
from ..components import Window
from ..errors import PreconditionError, UndersampledError
from ..fnmodel import LN2, SignedLogReal, signed_log_less, signed_log_re_g_grid, zg_over_g_grid


MIN_SAMPLES_PER_SET = 16
# relative radial shift for re-sampling points that land on a zero level line
NUDGE = 1e-3
MIN_ARC_SAMPLES = 4
DERIVATIVE_BOUND = 0.5

warning_manager = WarningManager()


def level_sets(n: int, epsilon: Epsilon) -> List[TreeSet]:
    return [
        TreeSet(kind, j, n, epsilon)
        for kind in SetKind
        for j in range(2 ** n)
    ]


def _evaluate(points, tol_log):
    signs, log_abs, degenerate = signed_log_re_g_grid(points, tol_log)
    if degenerate.any():
        nudged = signed_log_re_g_grid(points[degenerate] * (1 + NUDGE), tol_log)
        signs[degenerate], log_abs[degenerate] = nudged[0], nudged[1]
        warning_manager.warn_once(
            f'Re-sampled {degenerate.sum()} points lying on a zero level line of Re g'
        )
    return signs, log_abs, degenerate


def _sample_level(n, epsilon, samples_per_set, tol_log):
    sets = level_sets(n, epsilon)
    points = np.stack([tree_set.points(samples_per_set) for tree_set in sets])
    signs, log_abs, degenerate = _evaluate(points, tol_log)

    required = np.array([1 if tree_set.kind is SetKind.A else -1 for tree_set in sets])[:, np.newaxis]
    with np.errstate(invalid='ignore'):
        margins = np.where(signs == required, log_abs - 2 ** n * LN2, -inf)
    return sets, points, signs, log_abs, degenerate, margins


@dataclass
class SetCheck:
    kind: SetKind
    j: int
    n: int
    samples: int
    passed: bool
    min_log_margin: float
    degenerate: int = 0

    @property
    def name(self):
        return f'{self.kind.value}[{self.j},{self.n}]'

    def to_dict(self):
        return {
            'kind': self.kind.value,
            'j': self.j,
            'n': self.n,
            'samples': self.samples,
            'pass': self.passed,
            'min_log_margin': self.min_log_margin if np.isfinite(self.min_log_margin) else None,
            'degenerate': self.degenerate
        }


def _check_level(n, epsilon, samples_per_set, tol_log) -> List[SetCheck]:
    sets, _, _, _, degenerate, margins = _sample_level(n, epsilon, samples_per_set, tol_log)
    return [
        SetCheck(
            tree_set.kind, tree_set.j, n, samples_per_set,
            passed=bool((set_margins > 0).all()),
            min_log_margin=float(set_margins.min()),
            degenerate=int(set_degenerate.sum())
        )
        for tree_set, set_margins, set_degenerate in zip(sets, margins, degenerate)
    ]


@dataclass
class InequalityReport:
    epsilon: Epsilon
    checks: List[SetCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[SetCheck]:
        return [check for check in self.checks if not check.passed]

    def min_margin_by_level(self) -> Dict[int, float]:
        margins = {}
        for check in self.checks:
            margins[check.n] = min(margins.get(check.n, inf), check.min_log_margin)
        return margins

    def frame(self) -> ReportFrame:
        return ReportFrame(
            [check.to_dict() for check in self.checks],
            columns=['kind', 'j', 'n', 'samples', 'pass', 'min_log_margin', 'degenerate']
        )

    def failing_sets(self) -> List[str]:
        failing = self.frame().having(**{'pass': False})
        return [f'{kind}[{j},{n}]' for kind, j, n in zip(failing.kind, failing.j, failing.n)]

    def to_dict(self):
        return {
            'epsilon': str(self.epsilon),
            'pass': self.passed,
            'failing_sets': self.failing_sets(),
            'sets': [check.to_dict() for check in self.checks]
        }


def verify_inequalities(
    epsilon: Epsilon, n_range: Iterable[int], samples_per_set: int = 256,
    tol_log: float = DEFAULT_TRUNCATION_TOLERANCE, processes=1, progress=False
) -> InequalityReport:
    """Check Re g > 2^(2^n) on the rays and Re g < -2^(2^n) on segments and arcs of each level.

    Comparisons are made in the log domain; the margin of a set is the
    smallest log_abs - 2^n ln 2 over its samples (-inf on the wrong side of zero).
    """
    epsilon = check_epsilon(epsilon)
    if samples_per_set < MIN_SAMPLES_PER_SET:
        raise PreconditionError(f'At least {MIN_SAMPLES_PER_SET} samples per set are needed')
    levels = list(n_range)
    for n in levels:
        level_geometry(n, epsilon)

    per_level = map_with_shared(
        _check_level, levels, shared_args=(epsilon, samples_per_set, tol_log),
        processes=processes, progress=progress
    )
    return InequalityReport(epsilon, [check for checks in per_level for check in checks])


def sample_table(
    epsilon: Epsilon, n_range: Iterable[int], samples_per_set: int = 16,
    tol_log: float = DEFAULT_TRUNCATION_TOLERANCE
) -> ReportFrame:
    """Sampled points of all sets with Re g in signed-log form, one row per point."""
    epsilon = check_epsilon(epsilon)
    rows = []
    for n in n_range:
        sets, points, signs, log_abs, degenerate, margins = _sample_level(n, epsilon, samples_per_set, tol_log)
        for index, tree_set in enumerate(sets):
            for z, sign, value, nudged, margin in zip(
                points[index], signs[index], log_abs[index], degenerate[index], margins[index]
            ):
                rows.append({
                    'kind': tree_set.kind.value, 'j': tree_set.j, 'n': n,
                    'x': z.real, 'y': z.imag,
                    'sign': int(sign), 'log_abs': float(value),
                    'log_margin': float(margin), 'nudged': bool(nudged)
                })
    return ReportFrame(rows, columns=['kind', 'j', 'n', 'x', 'y', 'sign', 'log_abs', 'log_margin', 'nudged'])


def _check_annulus(n, epsilon, r):
    low, high = level_geometry(n, epsilon).annulus
    if not low <= r <= high:
        raise PreconditionError(f'r = {r} outside of the annulus [{low}, {high}] of level {n}')


def _circle(r, n_theta):
    theta = 2 * pi * np.arange(n_theta) / n_theta
    return theta, r * np.exp(1j * theta)


@dataclass
class ArgMonotonicity:
    n: int
    r: float
    n_theta: int
    min_derivative: float
    max_deviation: float
    bound_holds: bool
    total_increase: float
    excluded: List[float] = field(default_factory=list)

    def to_dict(self):
        return {
            'n': self.n, 'r': self.r, 'n_theta': self.n_theta,
            'min_derivative': self.min_derivative,
            'max_deviation': self.max_deviation,
            'bound_holds': self.bound_holds,
            'total_increase': self.total_increase,
            'excluded': self.excluded
        }


def verify_arg_monotonic(
    epsilon: Epsilon, n: int, r: float, n_theta: int = None, tol_log: float = DEFAULT_TRUNCATION_TOLERANCE
) -> ArgMonotonicity:
    """d arg g(r e^it) / dt = Re(z g'/g) on the circle |z| = r.

    The increase over a full turn is the trapezoidal integral of the derivative.
    """
    _check_annulus(n, epsilon, r)
    if n_theta is None:
        n_theta = 2 ** (n + 4)
    if n_theta < 2 ** (n + 3):
        raise PreconditionError(f'At least {2 ** (n + 3)} angles are needed at level {n}')

    theta, z = _circle(r, n_theta)
    values, degenerate = zg_over_g_grid(z, tol_log)
    valid = values[~degenerate]
    if not valid.size:
        raise PreconditionError('g vanishes numerically on the whole circle')

    deviation = float(np.abs(valid - 2 ** n).max())
    return ArgMonotonicity(
        n=n, r=r, n_theta=n_theta,
        min_derivative=float(valid.real.min()),
        max_deviation=deviation,
        bound_holds=deviation <= DERIVATIVE_BOUND,
        total_increase=float(valid.real.mean() * 2 * pi),
        excluded=theta[degenerate].tolist()
    )


@dataclass
class ArcCount:
    n: int
    r: float
    n_theta: int
    arc_count: int
    midpoints_covered: bool
    rays_avoided: bool
    full_circle: bool = False
    arcs: List[Tuple[float, float]] = field(default_factory=list)

    def to_dict(self):
        return {
            'n': self.n, 'r': self.r, 'n_theta': self.n_theta,
            'arc_count': self.arc_count,
            'midpoints_covered': self.midpoints_covered,
            'rays_avoided': self.rays_avoided,
            'full_circle': self.full_circle,
            'arcs': [list(arc) for arc in self.arcs]
        }


def _angle_indices(angles_over_pi, n_theta):
    return np.round(np.asarray(angles_over_pi, dtype=float) / 2 * n_theta).astype(int) % n_theta


def count_sublevel_arcs(
    epsilon: Epsilon, n: int, r: float, threshold: SignedLogReal, n_theta: int = None,
    tol_log: float = DEFAULT_TRUNCATION_TOLERANCE
) -> ArcCount:
    """Count the maximal arcs of the circle |z| = r on which Re g < threshold.

    Each arc should contain exactly one segment angle (2j + 1) pi / 2^n and
    none of the ray angles 2 pi j / 2^n.
    """
    _check_annulus(n, epsilon, r)
    if n_theta is None:
        n_theta = 2 ** (n + 6)
    if n_theta < 2 ** (n + 5):
        raise PreconditionError(f'At least {2 ** (n + 5)} angles are needed at level {n}')

    theta, z = _circle(r, n_theta)
    signs, log_abs, _ = signed_log_re_g_grid(z, tol_log)
    marked = np.ascontiguousarray(signed_log_less(signs, log_abs, threshold))
    labels, count = circular_runs(marked)

    sizes = np.bincount(labels[labels >= 0], minlength=count)
    if count and sizes.min() < MIN_ARC_SAMPLES:
        raise UndersampledError(
            f'An arc spans only {sizes.min()} samples; use more than {n_theta} angles'
        )

    full_circle = bool(marked.all())
    segment_labels = labels[_angle_indices((2 * np.arange(2 ** n) + 1) / 2 ** n, n_theta)]
    ray_labels = labels[_angle_indices(2 * np.arange(2 ** n) / 2 ** n, n_theta)]

    arcs = []
    if full_circle:
        arcs.append((0.0, 2 * pi))
    else:
        before, after = np.roll(labels, 1), np.roll(labels, -1)
        for label in range(count):
            start = np.flatnonzero((labels == label) & (before != label))[0]
            end = np.flatnonzero((labels == label) & (after != label))[0]
            arcs.append((float(theta[start]), float(theta[end])))

    return ArcCount(
        n=n, r=r, n_theta=n_theta,
        arc_count=int(count),
        midpoints_covered=not full_circle and sorted(segment_labels.tolist()) == list(range(count)),
        rays_avoided=bool((ray_labels == -1).all()),
        full_circle=full_circle,
        arcs=arcs
    )


def tree_hits(tree: TreeGraph, labels: np.ndarray, window: Window, samples: int = 64) -> Dict[int, List[str]]:
    """Names of the tree sets passing through each labelled component."""
    if labels.shape != window.shape:
        raise ValueError('Labels were computed on a different grid')

    pieces = [('root', tree.root_segment.resampled(window.resolution).points)]
    pieces += [(tree_set.name, tree_set.points(samples)) for tree_set in tree.sets()]

    hits = {}
    for name, points in pieces:
        met = set()
        for z in points:
            index = window.cell_index(complex(z))
            if index is not None and labels[index]:
                met.add(int(labels[index]))
        for label in met:
            hits.setdefault(label, []).append(name)
    return hits
