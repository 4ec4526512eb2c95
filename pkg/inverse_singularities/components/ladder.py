"""Nesting of sublevel components across a shrinking radius ladder."""
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .grid import Radius, SublevelComponent, SublevelField, SublevelLevel, Window, label_components, log_of_radius
from ..errors import PreconditionError
from ..fnmodel import EntireFunctionSpec, PaperExample


DIRECT = 'direct_candidate'
INDIRECT = 'indirect_candidate'
INCONCLUSIVE = 'inconclusive'


@dataclass
class LadderNode:
    level: int
    component: SublevelComponent
    children: List['LadderNode'] = field(default_factory=list)
    parent: Optional['LadderNode'] = field(default=None, repr=False, compare=False)

    def describe(self, radii):
        component = self.component
        return (
            f'r={radii[self.level]} #{component.id}'
            f' ({component.cell_count} cells, {len(component.a_points)} a-points'
            + (', clipped' if component.touches_window_boundary else '') + ')'
        )


@dataclass
class ComponentLadder:
    radii: List[Radius]
    roots: List[LadderNode]
    levels: List[SublevelLevel] = field(repr=False)
    window: Window = None

    def nodes(self, level: int) -> List[LadderNode]:
        found = []
        stack = list(self.roots)
        while stack:
            node = stack.pop()
            if node.level == level:
                found.append(node)
            else:
                stack.extend(node.children)
        return sorted(found, key=lambda node: node.component.id)

    def chains(self) -> List[List[LadderNode]]:
        """All root-to-leaf paths, in id order."""
        chains = []

        def descend(node, chain):
            chain = chain + [node]
            if not node.children:
                chains.append(chain)
            for child in node.children:
                descend(child, chain)

        for root in self.roots:
            descend(root, [])
        return chains


def component_ladder(
    spec: EntireFunctionSpec, a: complex, radii: List[Radius], window: Window, processes=1, progress=False
) -> ComponentLadder:
    """Components of f^-1(B(a, r)) for each radius, linked by cell containment."""
    logs = [log_of_radius(r) for r in radii]
    if not radii or any(smaller >= larger for larger, smaller in zip(logs, logs[1:])):
        raise PreconditionError('Radii have to be strictly decreasing')
    if isinstance(spec, PaperExample) and a != 0:
        raise PreconditionError('Ladders of the example are supported over a = 0 only')

    sublevel_field = SublevelField(spec, a, window, processes, progress)
    levels = [label_components(sublevel_field, r) for r in radii]

    roots = [LadderNode(0, component) for component in levels[0].components]
    previous = roots
    for index, level in enumerate(levels[1:], 1):
        by_id = {node.component.id: node for node in previous}
        current = []
        for component in level.components:
            parents = np.unique(levels[index - 1].labels[component.cells])
            # nested thresholds on one field: the parent is unique
            assert len(parents) == 1 and parents[0] != 0
            parent = by_id[int(parents[0])]
            node = LadderNode(index, component, parent=parent)
            parent.children.append(node)
            current.append(node)
        previous = current

    return ComponentLadder(list(radii), roots, levels, window)


@dataclass
class SingularityReport:
    classification: str
    splitting_detected: bool
    witness: str
    touches_window_boundary: bool = False

    def to_dict(self):
        return {
            'classification': self.classification,
            'splitting_detected': self.splitting_detected,
            'witness': self.witness,
            'touches_window_boundary': self.touches_window_boundary
        }


def classify_singularity(ladder: ComponentLadder, leaf_path: List[LadderNode]) -> SingularityReport:
    """Classify the singularity followed by a root-to-leaf chain of the ladder.

    A chain ending in a component free of a-points is a direct candidate,
    one with a-points at every rung an indirect candidate; a component with
    two or more children on a direct chain rules out a logarithmic singularity.
    """
    deepest = leaf_path[-1]
    clipped = any(node.component.touches_window_boundary for node in leaf_path)
    witness = ' > '.join(node.describe(ladder.radii) for node in leaf_path)
    splitting = any(len(node.children) >= 2 for node in leaf_path)

    if deepest.component.a_points:
        classification = INDIRECT
    elif not deepest.component.touches_window_boundary:
        # a bounded component without a-points cannot occur for an entire function
        classification = INCONCLUSIVE
    else:
        classification = DIRECT

    return SingularityReport(classification, splitting, witness, clipped)


def classify_ladder(ladder: ComponentLadder) -> List[SingularityReport]:
    return [classify_singularity(ladder, chain) for chain in ladder.chains()]


def summarize(reports: List[SingularityReport]) -> str:
    """Direct if any chain is direct, otherwise indirect if any is, otherwise inconclusive."""
    classifications = {report.classification for report in reports}
    for classification in (DIRECT, INDIRECT):
        if classification in classifications:
            return classification
    return INCONCLUSIVE
