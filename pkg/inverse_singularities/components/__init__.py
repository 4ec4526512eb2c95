from .grid import (
    Window, LogRadius, SublevelComponent, SublevelField, SublevelLevel,
    sublevel_components, label_components, find_a_points, cells_frame, log_of_radius
)
from .ladder import (
    LadderNode, ComponentLadder, SingularityReport,
    component_ladder, classify_singularity, classify_ladder, summarize,
    DIRECT, INDIRECT, INCONCLUSIVE
)
from .topology import boundary_cycles, disconnectedness_check, DisconnectednessReport, DISCONNECTED
