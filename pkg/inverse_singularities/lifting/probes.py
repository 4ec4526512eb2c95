"""Line sweeps and the good-curve probe: many lifts of simple curves at once."""
from collections import deque
from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy.optimize import newton

from config import DEFAULT_TOL_TRACK
from helpers import map_with_shared
from .continuation import LiftResult, LiftStatus, lift_curve, image_point, warning_manager
from .curves import Polyline
from ..errors import PreconditionError, NoSeedsError
from ..fnmodel import EntireFunctionSpec, PaperExample


# w-distance from the critical value at which branches are restarted
BRANCH_OFFSET = 1e-4
MAX_BRANCHES = 64


@dataclass
class SweepReport:
    n_lines: int
    failed_line_indices: List[int]
    singular_endpoints: List[complex]
    exceptional_fraction: float = None

    def __post_init__(self):
        fraction = len(self.failed_line_indices) / self.n_lines
        if self.exceptional_fraction is None:
            self.exceptional_fraction = fraction
        elif self.exceptional_fraction != fraction:
            raise ValueError('exceptional_fraction has to equal the share of failed lines')

    def to_dict(self):
        return {
            'n_lines': self.n_lines,
            'failed_line_indices': self.failed_line_indices,
            'singular_endpoints': [[w.real, w.imag] for w in self.singular_endpoints],
            'exceptional_fraction': self.exceptional_fraction
        }


def _sweep_line(index, spec, center, center_preimage, disc_radius, direction, n_lines, max_length, window_radius, tol_track):
    unit = np.exp(1j * direction)
    offset = disc_radius * (-1 + 2 * (index + 0.5) / n_lines)
    on_line = center + offset * 1j * unit

    z = center_preimage
    if on_line != center:
        result = lift_curve(spec, Polyline.segment(center, on_line), z, window_radius, tol_track)
        if not result.completed:
            return index, Polyline.segment(center, on_line).point(result.terminal_parameter)
        z = result.endpoint

    for sense in (1, -1):
        line = Polyline.segment(on_line, on_line + sense * max_length * unit)
        result = lift_curve(spec, line, z, window_radius, tol_track)
        if not result.completed:
            return index, line.point(result.terminal_parameter)
    return index, None


def line_sweep(
    spec: EntireFunctionSpec, disc_center: complex, disc_radius: float, seed: complex,
    direction: float = 0.0, n_lines: int = 101, max_length: float = 10.0,
    window_radius: float = np.inf, tol_track: float = DEFAULT_TOL_TRACK,
    processes: int = 1, progress: bool = False
) -> SweepReport:
    """Continue the branch through the disc along n_lines parallel lines.

    Line i passes through the disc at perpendicular offset
    disc_radius * (-1 + 2 (i + 1/2) / n_lines) and is followed
    for max_length both ways; a line fails when any of its lifts does not complete.
    """
    if n_lines < 1:
        raise PreconditionError('At least one line is needed')
    start = image_point(spec, seed)
    if not abs(start - disc_center) <= disc_radius:
        raise PreconditionError(f'Seed maps to {start}, outside of the disc')

    center_preimage = complex(seed)
    if start != disc_center:
        result = lift_curve(spec, Polyline.segment(start, disc_center), seed, window_radius, tol_track)
        if not result.completed:
            raise PreconditionError('The branch cannot be continued to the disc center')
        center_preimage = result.endpoint

    outcomes = map_with_shared(
        _sweep_line, range(n_lines),
        shared_args=(
            spec, disc_center, center_preimage, disc_radius, direction,
            n_lines, max_length, window_radius, tol_track
        ),
        processes=processes, progress=progress
    )
    failed = [(index, endpoint) for index, endpoint in outcomes if endpoint is not None]
    return SweepReport(
        n_lines=n_lines,
        failed_line_indices=[index for index, endpoint in failed],
        singular_endpoints=[endpoint for index, endpoint in failed]
    )


@dataclass
class Branch:
    """One lift of the piece of the curve from start_parameter towards its end (direction 1) or start (-1)."""

    start_parameter: float
    direction: int
    result: LiftResult

    @property
    def curve_path(self):
        """(curve parameter, z) pairs, ordered by increasing parameter."""
        end = 1.0 if self.direction > 0 else 0.0
        t = self.start_parameter
        path = [(t + (end - t) * s, z) for s, z in self.result.path]
        return path if self.direction > 0 else path[::-1]

    @property
    def terminal_parameter(self):
        end = 1.0 if self.direction > 0 else 0.0
        return self.start_parameter + (end - self.start_parameter) * self.result.terminal_parameter


@dataclass
class ComponentTrace:
    """Lifts covering one component of the preimage of a curve, split at critical points."""

    seed: complex
    branches: List[Branch] = field(default_factory=list)
    critical_points: List[complex] = field(default_factory=list)
    escaped: bool = False
    stalled: bool = False
    truncated: bool = False

    @property
    def bounded(self):
        """Every branch was followed to an end of the curve without leaving the window."""
        return not (self.escaped or self.stalled or self.truncated)

    def passes_near(self, z: complex, t: float, tolerance: float) -> bool:
        """Whether one of the branches is at z (within tolerance) at curve parameter t."""
        for branch in self.branches:
            path = branch.curve_path
            parameters = np.array([s for s, _ in path])
            if len(parameters) < 2 or not parameters[0] <= t <= parameters[-1]:
                continue
            points = np.array([point for _, point in path])
            position = np.interp(t, parameters, points.real) + 1j * np.interp(t, parameters, points.imag)
            if abs(position - z) <= tolerance:
                return True
        return False


def _critical_point(spec: EntireFunctionSpec, z: complex) -> complex:
    def derivative(x):
        return complex(spec.values(x)[1])

    def second(x):
        return complex(spec.second_derivative(x))

    try:
        return complex(newton(derivative, z, fprime=second, tol=1e-14, maxiter=50))
    except (RuntimeError, ZeroDivisionError):
        return z


def _refine(spec: EntireFunctionSpec, guess: complex, target: complex, tol_track: float):
    def residual(x):
        return complex(spec.values(x)[0]) - target

    def derivative(x):
        return complex(spec.values(x)[1])

    try:
        root = complex(newton(residual, guess, fprime=derivative, tol=1e-13, maxiter=50))
    except (RuntimeError, ZeroDivisionError):
        return None
    if abs(residual(root)) <= tol_track * (1 + abs(target)):
        return root
    return None


def trace_preimage_component(
    spec: EntireFunctionSpec, curve: Polyline, seed: complex, t0: float = 0.5,
    window_radius: float = np.inf, tol_track: float = DEFAULT_TOL_TRACK,
    max_branches: int = MAX_BRANCHES
) -> ComponentTrace:
    """Explore the component of the preimage of an open curve through seed = f^-1(curve(t0)).

    At a critical point z_c with critical value c on the curve, f - c is
    locally (f''(z_c) / 2) (z - z_c)^2, so the component continues along the
    two square roots on each side of c; the branch the lift arrived on is skipped.
    """
    if isinstance(spec, PaperExample):
        raise PreconditionError('Component tracing works with plain-domain functions only')

    trace = ComponentTrace(seed=complex(seed))
    queue = deque([(complex(seed), t0, 1), (complex(seed), t0, -1)])
    eta = BRANCH_OFFSET / curve.length

    while queue:
        if len(trace.branches) >= max_branches:
            trace.truncated = True
            warning_manager.warn_once(f'Preimage component through {seed} has more than {max_branches} branches; stopped')
            break
        z, t, direction = queue.popleft()
        end = 1.0 if direction > 0 else 0.0
        if t == end:
            continue

        result = lift_curve(spec, curve.subcurve(t, end), z, window_radius, tol_track)
        branch = Branch(t, direction, result)
        trace.branches.append(branch)

        if result.status is LiftStatus.EscapedWindow:
            trace.escaped = True
        elif result.status is LiftStatus.StepUnderflow:
            trace.stalled = True
        elif result.status is LiftStatus.HitCriticalPoint:
            z_hit = result.endpoint
            previous = result.path[-2][1] if len(result.path) > 1 else None
            z_c = _critical_point(spec, z_hit)
            if any(abs(z_c - known) <= 1e-6 * (1 + abs(z_c)) for known in trace.critical_points):
                continue
            trace.critical_points.append(z_c)

            c = image_point(spec, z_c)
            second = complex(spec.second_derivative(z_c))
            terminal = branch.terminal_parameter
            for new_direction in (direction, -direction):
                t_start = terminal + new_direction * eta
                if not 0 <= t_start <= 1:
                    continue
                target = curve.point(t_start)
                root = np.sqrt(2 * (target - c) / second)
                guesses = [z_c + root, z_c - root]
                if new_direction == -direction and previous is not None:
                    # drop the square root pointing back along the arriving path
                    alignment = [((guess - z_c) * np.conj(previous - z_c)).real for guess in guesses]
                    guesses.pop(int(np.argmax(alignment)))
                for guess in guesses:
                    start = _refine(spec, guess, target, tol_track)
                    if start is not None:
                        queue.append((start, t_start, new_direction))
    return trace


@dataclass
class GoodCurveReport:
    probed_components: int
    compact_count: int
    noncompact_candidates: List[complex]
    traces: List[ComponentTrace] = field(default_factory=list, repr=False)

    def __post_init__(self):
        if self.compact_count + len(self.noncompact_candidates) != self.probed_components:
            raise ValueError('Every probed component is either compact or a noncompact candidate')

    def to_dict(self):
        return {
            'probed_components': self.probed_components,
            'compact_count': self.compact_count,
            'noncompact_candidates': [[z.real, z.imag] for z in self.noncompact_candidates]
        }


def good_curve_probe(
    spec: EntireFunctionSpec, segment: Polyline, window_radius: float = 40.0,
    n_seeds: int = 8, tol_track: float = DEFAULT_TOL_TRACK, resolution: float = None
) -> GoodCurveReport:
    """Probe whether the components of f^-1(segment) met near the origin are compact.

    Seeds are the preimages of the segment midpoint closest to the origin.
    A component escaping the window, running into an asymptotic value or
    left unfinished at the branch cap is a noncompact candidate.
    """
    from ..components import Window, find_a_points

    if segment.closed or segment.length == 0:
        raise PreconditionError('The probe needs an open curve of positive length')

    midpoint = segment.point(0.5)
    window = Window(0, window_radius, window_radius, resolution or window_radius / 400)
    seeds = [z for z in find_a_points(spec, midpoint, window) if abs(z) < window_radius]
    if not seeds:
        raise NoSeedsError(f'No preimage of {midpoint} within |z| < {window_radius}')
    seeds = sorted(seeds, key=abs)[:n_seeds]

    traces = []
    compact, noncompact = 0, []
    for seed in seeds:
        if any(trace.passes_near(seed, 0.5, 1e-3 * (1 + abs(seed))) for trace in traces):
            continue
        trace = trace_preimage_component(spec, segment, seed, 0.5, window_radius, tol_track)
        traces.append(trace)
        if trace.bounded:
            compact += 1
        else:
            noncompact.append(seed)

    return GoodCurveReport(
        probed_components=len(traces),
        compact_count=compact,
        noncompact_candidates=noncompact,
        traces=traces
    )
