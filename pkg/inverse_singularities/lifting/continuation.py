"""Continuation of an inverse branch of f along a curve in the w-plane."""
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Tuple

import numpy as np

from config import DEFAULT_TOL_TRACK
from helpers import WarningManager
from .curves import Polyline
from ..errors import PreconditionError
from ..fnmodel import EntireFunctionSpec, PaperExample


MAX_STEP = 1 / 32
INITIAL_STEP = MAX_STEP / 4
MIN_STEP = 1e-12
MAX_STEPS = 10 ** 6

NEWTON_TOLERANCE = 1e-12
NEWTON_ITERATIONS = 8
# a corrector moving further than this fraction of the predicted step suggests a branch jump
CORRECTION_RATIO = 0.25

# |f'| below this (relative to 1 + |w|) is a critical point
CRITICAL_DERIVATIVE = 1e-10
# distance |f'/f''| to the nearest critical point, relative to 1 + |z|, for a stalled step
CRITICAL_DISTANCE = 1e-5

warning_manager = WarningManager()


class LiftStatus(Enum):
    Completed = 'Completed'
    HitCriticalPoint = 'HitCriticalPoint'
    EscapedWindow = 'EscapedWindow'
    StepUnderflow = 'StepUnderflow'


@dataclass
class LiftResult:
    status: LiftStatus
    path: List[Tuple[float, complex]]
    terminal_parameter: float
    attempts: int = 1

    def __post_init__(self):
        parameters = self.parameters
        if len(parameters) > 1 and not (np.diff(parameters) > 0).all():
            raise ValueError('Path parameters have to be strictly increasing')
        if self.status is LiftStatus.Completed and self.terminal_parameter != 1:
            raise ValueError('A completed lift ends at parameter 1')

    @property
    def parameters(self) -> np.ndarray:
        return np.array([t for t, z in self.path])

    @property
    def points(self) -> np.ndarray:
        return np.array([z for t, z in self.path])

    @property
    def endpoint(self) -> complex:
        return self.path[-1][1]

    @property
    def completed(self):
        return self.status is LiftStatus.Completed

    def to_dict(self):
        return {
            'status': self.status.value,
            'terminal_parameter': self.terminal_parameter,
            'attempts': self.attempts,
            'endpoint': [self.endpoint.real, self.endpoint.imag],
            'path_length': len(self.path)
        }


@dataclass(frozen=True)
class ExponentOf(EntireFunctionSpec):
    """The exponent g of the example (f = e^g), lifted in place of f."""

    example: PaperExample = field(default_factory=PaperExample)

    def values(self, z):
        g, first, _, _ = self.example.exponent(z)
        return g, first

    def second_derivative(self, z):
        return self.example.exponent(z)[2]


def image_point(spec: EntireFunctionSpec, z: complex) -> complex:
    """f(z), also for the example (through e^g, inf beyond the double range)."""
    with np.errstate(over='ignore', invalid='ignore'):
        return complex(spec.values(complex(z))[0])


def _evaluate(spec, z):
    value, derivative = spec.values(z)
    return complex(value), complex(derivative)


def _newton(spec, z, target):
    """Newton on f(z) = target; (root, iterations) or None when not converging."""
    for iteration in range(1, NEWTON_ITERATIONS + 1):
        value, derivative = _evaluate(spec, z)
        if derivative == 0 or not (np.isfinite(value) and np.isfinite(derivative)):
            return None
        step = (value - target) / derivative
        z = z - step
        if not np.isfinite(z):
            return None
        if abs(step) <= NEWTON_TOLERANCE * (1 + abs(z)):
            return z, iteration
    return None


def _continue(spec: EntireFunctionSpec, curve: Polyline, seed: complex, window_radius: float, tol_track: float):
    start = curve.start
    value, derivative = _evaluate(spec, seed)
    if not abs(value - start) <= tol_track * (1 + abs(start)):
        raise PreconditionError(
            f'Seed {seed} maps to {value}, not to the curve start {start}'
        )

    z, t = complex(seed), 0.0
    path = [(t, z)]
    breakpoints = curve.parameters[1:]
    h = INITIAL_STEP
    status = LiftStatus.Completed

    for _ in range(MAX_STEPS):
        if t >= 1:
            break
        w = curve.point(t)
        if abs(derivative) < CRITICAL_DERIVATIVE * (1 + abs(w)):
            status = LiftStatus.HitCriticalPoint
            break
        if h < MIN_STEP:
            second = complex(spec.second_derivative(z))
            distance = abs(derivative / second) if second != 0 else np.inf
            if distance <= CRITICAL_DISTANCE * (1 + abs(z)):
                status = LiftStatus.HitCriticalPoint
            else:
                status = LiftStatus.StepUnderflow
            break

        # never step over a vertex
        next_break = breakpoints[np.searchsorted(breakpoints, t, side='right')]
        t_next = min(t + h, next_break, 1.0)
        w_next = curve.point(t_next)

        predicted = z + (w_next - value) / derivative
        corrected = _newton(spec, predicted, w_next) if np.isfinite(predicted) else None
        if corrected is not None:
            z_next, iterations = corrected
            displacement = abs(predicted - z)
            acceptable = abs(z_next - predicted) <= max(CORRECTION_RATIO * displacement, NEWTON_TOLERANCE * (1 + abs(z)))
            if acceptable:
                next_value, next_derivative = _evaluate(spec, z_next)
                acceptable = abs(next_value - w_next) <= tol_track * (1 + abs(w_next))
        if corrected is None or not acceptable:
            h /= 2
            continue

        z, t = z_next, t_next
        value, derivative = next_value, next_derivative
        path.append((t, z))

        if abs(z) > window_radius:
            status = LiftStatus.EscapedWindow
            break
        if iterations <= 2:
            h = min(2 * h, MAX_STEP)
    else:
        status = LiftStatus.StepUnderflow

    terminal = 1.0 if status is LiftStatus.Completed else t
    return LiftResult(status, path, terminal)


def log_plane_curve(curve: Polyline, seed_exponent: complex, max_relative_step: float = 0.05):
    """Continuously unwrapped logarithm of the curve, on the sheet of seed_exponent.

    Returns the log-plane polyline and, for each of its vertices, the parameter
    on the original curve.
    """
    if curve.distance_to(0) == 0:
        raise PreconditionError('A curve through 0 has no logarithm')
    dense = curve.resampled(max_relative_step * curve.distance_to(0))
    points = dense.points
    logarithm = np.log(np.abs(points)) + 1j * np.unwrap(np.angle(points))
    sheet = np.round((seed_exponent.imag - logarithm[0].imag) / (2 * np.pi))
    logarithm = logarithm + 2j * np.pi * sheet
    # closed curves winding around 0 do not close up in the log plane
    closed = abs(logarithm[0] - logarithm[-1]) <= 1e-12
    return Polyline(tuple(logarithm), closed=closed), dense.parameters


def lift_curve(
    spec: EntireFunctionSpec, curve: Polyline, seed: complex,
    window_radius: float = np.inf, tol_track: float = DEFAULT_TOL_TRACK
) -> LiftResult:
    """Continue the branch of f^-1 with f^-1(curve.start) = seed along the curve.

    The example is lifted in the log plane, solving g(z) = log w(t).
    """
    if isinstance(spec, PaperExample):
        exponent = ExponentOf(spec)
        seed_exponent = complex(exponent.values(complex(seed))[0])
        log_curve, original_parameters = log_plane_curve(curve, seed_exponent)
        result = _continue(exponent, log_curve, seed, window_radius, tol_track)
        mapped = np.interp(result.parameters, log_curve.parameters, original_parameters)
        path = [(float(t), z) for t, (_, z) in zip(mapped, result.path)]
        terminal = 1.0 if result.completed else path[-1][0]
        return LiftResult(result.status, path, terminal)
    return _continue(spec, curve, seed, window_radius, tol_track)


def perturb(curve: Polyline, epsilon: float, rng: np.random.Generator) -> Polyline:
    """Move every interior vertex by an offset of modulus in [epsilon / 2, epsilon]."""
    vertices = np.array(curve.vertices)
    interior = slice(1, len(vertices) - 1)
    count = len(vertices) - 2
    radii = rng.uniform(epsilon / 2, epsilon, count)
    angles = rng.uniform(0, 2 * np.pi, count)
    vertices[interior] += radii * np.exp(1j * angles)
    return Polyline(tuple(vertices), closed=curve.closed)


def perturbed_lift(
    spec: EntireFunctionSpec, curve: Polyline, seed: complex, epsilon: float = 1e-3,
    max_retries: int = 8, window_radius: float = np.inf, tol_track: float = DEFAULT_TOL_TRACK,
    random_seed: int = 0
) -> LiftResult:
    """lift_curve, retried on nearby curves (interior vertices moved by at most epsilon) until one completes."""
    result = lift_curve(spec, curve, seed, window_radius, tol_track)
    if result.completed or epsilon == 0:
        return result

    # interior vertices only; curves with none are bent at the failure point first
    if len(curve.vertices) == 2:
        failure = result.terminal_parameter if 0 < result.terminal_parameter < 1 else 0.5
        curve = curve.subcurve(0, failure) + curve.subcurve(failure, 1)

    rng = np.random.default_rng(random_seed)
    for attempt in range(2, max_retries + 2):
        warning_manager.warn_once(
            f'Lift ended with {result.status.value}; retrying on curves perturbed by up to {epsilon}'
        )
        result = lift_curve(spec, perturb(curve, epsilon, rng), seed, window_radius, tol_track)
        result.attempts = attempt
        if result.completed:
            break
    return result
