from .curves import Polyline
from .continuation import LiftStatus, LiftResult, lift_curve, perturbed_lift, image_point, log_plane_curve
from .winding import winding_number, image_winding_number, is_a_monotonic
from .probes import (
    SweepReport, line_sweep,
    ComponentTrace, Branch, trace_preimage_component,
    GoodCurveReport, good_curve_probe
)
