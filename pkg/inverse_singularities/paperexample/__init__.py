from .geometry import (
    LevelGeometry, level_geometry, check_epsilon, SetKind, TreeSet, TreeGraph, build_tree, inside
)
from .verification import (
    SetCheck, InequalityReport, verify_inequalities, sample_table, level_sets,
    ArgMonotonicity, verify_arg_monotonic, ArcCount, count_sublevel_arcs, tree_hits
)
from .figure import SvgStyle, render_svg
