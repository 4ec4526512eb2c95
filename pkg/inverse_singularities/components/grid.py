"""Sublevel sets of |f - a| on a square grid and their 4-connected components."""
from dataclasses import dataclass, field
from math import log, exp
from typing import List, Union

import numpy as np
from scipy import ndimage
from scipy.optimize import newton

from data_frames import ReportFrame
from helpers import WarningManager, map_with_shared
from ..errors import PreconditionError, ResolutionTooCoarseError
from ..fnmodel import (
    EntireFunctionSpec, PaperExample, SignedLogReal, exponent_derivatives, signed_log_re_g_grid, signed_log_less
)


ROWS_PER_BLOCK = 32
MIN_COMPONENT_CELLS = 4

A_POINT_RESIDUAL = 1e-10
DUPLICATE_DISTANCE = 1e-6
# a cell is a root candidate when a Newton step from its center stays within this many cells
CANDIDATE_CELLS = 2
# beyond these, exp(g) overflows or the phase of g is lost in rounding
EXP_LIMIT = 700.0
PHASE_LIMIT = 1e8

warning_manager = WarningManager()


@dataclass(frozen=True)
class Window:
    """A rectangle of square cells; row 0 is the bottom row."""

    center: complex = 0
    half_width: float = 80.0
    half_height: float = None
    resolution: float = 0.25

    def __post_init__(self):
        object.__setattr__(self, 'center', complex(self.center))
        if self.half_height is None:
            object.__setattr__(self, 'half_height', self.half_width)
        if self.resolution <= 0:
            raise ValueError('Resolution has to be positive')
        if min(self.half_width, self.half_height) < 10 * self.resolution:
            raise ValueError('The window has to span at least ten cells in each direction')

    @property
    def columns(self) -> int:
        return int(round(2 * self.half_width / self.resolution))

    @property
    def rows(self) -> int:
        return int(round(2 * self.half_height / self.resolution))

    @property
    def shape(self):
        return self.rows, self.columns

    def x_centers(self):
        return self.center.real + (np.arange(self.columns) + 0.5 - self.columns / 2) * self.resolution

    def y_centers(self, rows=slice(None)):
        return self.center.imag + (np.arange(self.rows)[rows] + 0.5 - self.rows / 2) * self.resolution

    def cell_centers(self, rows=slice(None)) -> np.ndarray:
        x = self.x_centers()
        y = self.y_centers(rows)
        return x[np.newaxis, :] + 1j * y[:, np.newaxis]

    def cell_index(self, z: complex):
        """(row, column) of the cell containing z, or None outside of the window."""
        column = int(np.floor((z.real - self.center.real) / self.resolution + self.columns / 2))
        row = int(np.floor((z.imag - self.center.imag) / self.resolution + self.rows / 2))
        if 0 <= row < self.rows and 0 <= column < self.columns:
            return row, column
        return None

    def contains(self, z: complex) -> bool:
        return self.cell_index(z) is not None

    def to_dict(self):
        return {
            'center': [self.center.real, self.center.imag],
            'half_width': self.half_width,
            'half_height': self.half_height,
            'resolution': self.resolution
        }


@dataclass(frozen=True, order=True)
class LogRadius:
    """A radius given by its natural logarithm, for radii far below the double range."""

    value: float

    @property
    def radius(self) -> float:
        try:
            return exp(self.value)
        except OverflowError:
            return np.inf

    def __str__(self):
        return f'log:{self.value:g}'


Radius = Union[float, LogRadius]


def log_of_radius(radius: Radius) -> float:
    if isinstance(radius, LogRadius):
        return radius.value
    if not radius > 0:
        raise PreconditionError(f'Radii have to be positive, got {radius}')
    return log(radius)


@dataclass
class SublevelComponent:
    id: int
    sample_point: complex
    cell_count: int
    touches_window_boundary: bool
    a_points: List[complex] = field(default_factory=list)
    cells: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.cell_count < 1:
            raise ValueError('A component has at least one cell')

    def to_dict(self):
        return {
            'id': self.id,
            'sample_point': [self.sample_point.real, self.sample_point.imag],
            'cell_count': self.cell_count,
            'touches_window_boundary': self.touches_window_boundary,
            'a_points': [[z.real, z.imag] for z in self.a_points]
        }


def _fill_example_disc(z, spec, a):
    g = exponent_derivatives(z, spec.truncation_tolerance)[0]
    with np.errstate(all='ignore'):
        re_g = np.where(np.isfinite(g.real), g.real, np.inf)
        resolved = np.isfinite(g) & (np.abs(g) < PHASE_LIMIT) & (re_g < EXP_LIMIT)
        # | |f| - |a| | bounds |f - a| from below when the phase of f is lost
        bound = np.where(re_g < EXP_LIMIT, np.abs(np.exp(np.minimum(re_g, EXP_LIMIT)) - abs(a)), np.inf)
        distance = np.where(resolved, np.abs(np.exp(np.where(resolved, g, 0)) - a), bound)
    return {'distance': distance, 'unresolved': ~resolved}


def _fill_block(rows, spec, a, window):
    z = window.cell_centers(slice(*rows))
    if isinstance(spec, PaperExample):
        if a != 0:
            return _fill_example_disc(z, spec, a)
        signs, log_abs, degenerate = signed_log_re_g_grid(z, spec.truncation_tolerance)
        return {'signs': signs, 'log_abs': log_abs, 'degenerate': degenerate}
    value, derivative = spec.values(z)
    with np.errstate(invalid='ignore', over='ignore'):
        distance = np.abs(value - a)
        slope = np.abs(derivative)
    distance[~np.isfinite(distance)] = np.inf
    return {'distance': distance, 'slope': slope}


class SublevelField:
    """The indicator field of f over a window, evaluated once and thresholded at many radii.

    For the example with a = 0 the field is Re g in signed-log form, since |f| = exp(Re g).
    For the example with a != 0 it is |exp(g) - a| wherever the phase of g is resolvable.
    Other cells keep the lower bound | |f| - |a| | and are never marked.
    """

    def __init__(self, spec: EntireFunctionSpec, a: complex, window: Window, processes=1, progress=False):
        example = isinstance(spec, PaperExample)
        self.log_domain = example and a == 0
        # a-points of the example are out of reach of Newton's method on f
        self.tracks_a_points = not example
        self.spec = spec
        self.a = complex(a)
        self.window = window
        self._a_points = None

        blocks = [
            (start, min(start + ROWS_PER_BLOCK, window.rows))
            for start in range(0, window.rows, ROWS_PER_BLOCK)
        ]
        filled = map_with_shared(
            _fill_block, blocks, shared_args=(spec, self.a, window),
            processes=processes, progress=progress
        )
        self.arrays = {
            name: np.concatenate([block[name] for block in filled])
            for name in filled[0]
        }

        if self.log_domain:
            degenerate = self.arrays['degenerate'].sum()
            if degenerate:
                warning_manager.warn_once(
                    f'{degenerate} cells lie on a zero level line of Re g and were left unmarked'
                )
            signs, log_abs = self.arrays['signs'], self.arrays['log_abs']
            with np.errstate(invalid='ignore'):
                # monotone in Re g, finite everywhere
                self.key = signs * np.logaddexp(0, log_abs)
        else:
            self.key = self.arrays['distance']

    def marked(self, radius: Radius) -> np.ndarray:
        log_radius = log_of_radius(radius)
        if self.log_domain:
            threshold = SignedLogReal.from_float(log_radius)
            return signed_log_less(self.arrays['signs'], self.arrays['log_abs'], threshold)
        inside = self.key < (radius.radius if isinstance(radius, LogRadius) else radius)
        if 'unresolved' in self.arrays:
            undecided = int((inside & self.arrays['unresolved']).sum())
            if undecided:
                warning_manager.warn_once(
                    f'{undecided} cells with an unresolvable phase of g at radius {radius} were left unmarked'
                )
            inside &= ~self.arrays['unresolved']
        return inside

    @property
    def a_points(self) -> List[complex]:
        if self._a_points is None:
            self._a_points = [] if self.spec.omits(self.a) else self._find_a_points()
        return self._a_points

    def _find_a_points(self):
        distance, slope = self.arrays['distance'], self.arrays['slope']
        local_minimum = distance == ndimage.minimum_filter(distance, size=3, mode='nearest')
        with np.errstate(invalid='ignore'):
            close = distance <= CANDIDATE_CELLS * self.window.resolution * slope
        candidates = np.argwhere(local_minimum & close & np.isfinite(distance))

        centers = self.window.cell_centers()
        roots = []
        for row, column in candidates:
            root = refine_a_point(self.spec, self.a, centers[row, column])
            if root is not None and self.window.contains(root):
                roots.append(root)
        return deduplicate(roots)


def refine_a_point(spec: EntireFunctionSpec, a: complex, guess: complex):
    def residual(z):
        return complex(spec.values(z)[0]) - a

    def derivative(z):
        return complex(spec.values(z)[1])

    try:
        root = complex(newton(residual, complex(guess), fprime=derivative, tol=1e-12, maxiter=100))
    except (RuntimeError, ZeroDivisionError, OverflowError):
        return None
    if np.isfinite(root) and abs(residual(root)) <= A_POINT_RESIDUAL:
        return root
    return None


def deduplicate(points: List[complex], distance: float = DUPLICATE_DISTANCE) -> List[complex]:
    unique = []
    for point in points:
        if all(abs(point - other) > distance for other in unique):
            unique.append(point)
    return sorted(unique, key=lambda z: (round(z.real, 9), round(z.imag, 9)))


@dataclass
class SublevelLevel:
    """Components of one sublevel set; labels hold component ids (0 for unmarked cells)."""

    radius: Radius
    labels: np.ndarray = field(repr=False)
    components: List[SublevelComponent]


def label_components(sublevel_field: SublevelField, radius: Radius) -> SublevelLevel:
    window = sublevel_field.window
    labels, count = ndimage.label(sublevel_field.marked(radius))

    border = np.zeros(labels.shape, dtype=bool)
    border[[0, -1], :] = True
    border[:, [0, -1]] = True
    on_border = set(np.unique(labels[border])) - {0}

    sizes = np.bincount(labels.ravel(), minlength=count + 1)
    fragments = [
        label for label in range(1, count + 1)
        if sizes[label] < MIN_COMPONENT_CELLS and label not in on_border
    ]
    if fragments:
        if not sublevel_field.log_domain:
            raise ResolutionTooCoarseError(
                f'{len(fragments)} components at radius {radius} have fewer than {MIN_COMPONENT_CELLS} cells;'
                f' refine the resolution ({window.resolution})'
            )
        # Re g is harmonic, so bounded sublevel components of the example are grid artefacts
        warning_manager.warn_once(
            f'Discarded {len(fragments)} grid fragments of the example at radius {radius}'
        )
        labels[np.isin(labels, fragments)] = 0

    # consecutive ids, ordered by first cell in row-major order
    discarded = set(fragments)
    kept = [label for label in range(1, count + 1) if label not in discarded]
    renumbered = np.zeros(count + 1, dtype=labels.dtype)
    renumbered[kept] = np.arange(1, len(kept) + 1)
    labels = renumbered[labels]

    centers = window.cell_centers()
    key = sublevel_field.key
    ids = list(range(1, len(kept) + 1))
    minima = ndimage.minimum_position(key, labels, ids) if ids else []
    a_points = sublevel_field.a_points if sublevel_field.tracks_a_points else []

    components = []
    for component_id, position, old_label in zip(ids, minima, kept):
        cells = labels == component_id
        members = []
        for z in a_points:
            index = window.cell_index(z)
            if index is not None and labels[index] == component_id:
                members.append(z)
        components.append(SublevelComponent(
            id=component_id,
            sample_point=complex(centers[position]),
            cell_count=int(sizes[old_label]),
            touches_window_boundary=old_label in on_border,
            a_points=members,
            cells=cells
        ))
    return SublevelLevel(radius, labels, components)


def sublevel_components(
    spec: EntireFunctionSpec, a: complex, r: Radius, window: Window, processes=1, progress=False
) -> List[SublevelComponent]:
    """Components of f^-1(B(a, r)) within the window (for the example with a = 0: of Re g < ln r)."""
    log_of_radius(r)
    return label_components(SublevelField(spec, a, window, processes, progress), r).components


def find_a_points(spec: EntireFunctionSpec, a: complex, window: Window, processes=1, progress=False) -> List[complex]:
    """Solutions of f(z) = a within the window, sorted by real then imaginary part."""
    if spec.omits(a):
        return []
    if isinstance(spec, PaperExample):
        raise PreconditionError('a-point search is not available for the example (its values overflow)')
    return SublevelField(spec, a, window, processes, progress).a_points


def cells_frame(components: List[SublevelComponent], window: Window) -> ReportFrame:
    """Cell centers of the components, one row per cell."""
    centers = window.cell_centers()
    rows = []
    for component in components:
        for z in centers[component.cells]:
            rows.append({'component': component.id, 'x': z.real, 'y': z.imag})
    return ReportFrame(rows, columns=['component', 'x', 'y'])
