from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy import ndimage

from .grid import SublevelComponent, Window, sublevel_components
from ..errors import InconclusiveError, PreconditionError, TouchesBoundaryError
from ..fnmodel import EntireFunctionSpec


DISCONNECTED = 'disconnected (witnessed)'

EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


def boundary_cycles(component: SublevelComponent, window: Window = None) -> int:
    """Number of closed boundary contours of the component's cells.

    The outer contour plus one per hole; holes are 8-connected pieces of
    the complement, the dual of 4-connected cells.
    """
    if component.touches_window_boundary:
        raise TouchesBoundaryError(f'Component {component.id} is clipped by the window')
    if window is not None and component.cells.shape != window.shape:
        raise ValueError('The component was computed on a different grid')
    box = ndimage.find_objects(component.cells.astype(int))[0]
    cells = np.pad(component.cells[box], 1, constant_values=False)
    _, pieces = ndimage.label(~cells, structure=EIGHT_CONNECTED)
    # the padding joins everything outside into one piece
    return pieces


@dataclass
class DisconnectednessReport:
    component_count: int
    verdict: str
    components: List[SublevelComponent] = field(default_factory=list, repr=False)

    def to_dict(self):
        return {
            'component_count': self.component_count,
            'verdict': self.verdict,
            'components': [component.to_dict() for component in self.components]
        }


def disconnectedness_check(
    spec: EntireFunctionSpec, a: complex, disc_center: complex, disc_radius: float, window: Window,
    processes=1, progress=False
) -> DisconnectednessReport:
    """Count the components of f^-1(D) for a disc D avoiding an omitted value a.

    Two or more witness that the preimage of D is disconnected; fewer leave it
    open (the window may be too small) and raise InconclusiveError with the report.
    """
    if not abs(disc_center - a) > disc_radius:
        raise PreconditionError(f'The disc contains {a}')
    if not spec.omits(a):
        raise PreconditionError(f'{spec.name} does not omit {a}')

    components = sublevel_components(spec, disc_center, disc_radius, window, processes, progress)
    count = len(components)
    if count >= 2:
        return DisconnectednessReport(count, DISCONNECTED, components)
    report = DisconnectednessReport(count, 'inconclusive', components)
    raise InconclusiveError(
        f'Only {count} component(s) of the preimage in the window; enlarge it', report=report
    )
