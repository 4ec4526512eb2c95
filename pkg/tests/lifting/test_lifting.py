from cmath import exp as cexp, log as clog, pi

from pytest import approx, raises
import numpy as np

from inverse_singularities.errors import NotClosedError, OnCurveError, PreconditionError
from inverse_singularities.fnmodel import Exp, Sinc, Polynomial, PaperExample, g_derivatives
from inverse_singularities.lifting import (
    Polyline, LiftStatus, lift_curve, perturbed_lift,
    winding_number, image_winding_number, is_a_monotonic,
    line_sweep, good_curve_probe, trace_preimage_component
)


square = Polynomial((0, 0, 1))


def assert_tracks(spec, curve, result, tol_track=1e-8):
    for t, z in result.path:
        w = curve.point(t)
        assert abs(complex(spec.values(z)[0]) - w) <= tol_track * (1 + abs(w))


def test_polyline_validation():
    with raises(ValueError):
        Polyline((1,))
    with raises(ValueError):
        Polyline((1, 1, 2))
    with raises(ValueError):
        Polyline((0, 1, 1j), closed=True)

    circle = Polyline.circle(0, 1, 64)
    assert circle.closed
    assert circle.start == circle.end == 1
    assert circle.length == approx(2 * pi, rel=1e-3)
    assert circle.point(0.25) == approx(1j)


def test_subcurve_and_concatenation():
    path = Polyline.through(0, 1, 1 + 1j)
    assert path.point(0.5) == 1
    piece = path.subcurve(0.25, 0.75)
    assert piece.vertices == (0.5, 1, 1 + 0.5j)
    assert path.subcurve(0.75, 0.25).vertices == (1 + 0.5j, 1, 0.5)

    joined = Polyline.segment(0, 1) + Polyline.segment(1, 1 + 1j)
    assert joined == path
    with raises(ValueError):
        Polyline.segment(0, 1) + Polyline.segment(2, 3)


def test_exp_circle_monodromy():
    circle = Polyline.circle(0, 1, 64)
    result = lift_curve(Exp(), circle, 0)
    assert result.status is LiftStatus.Completed
    assert result.terminal_parameter == 1
    assert result.endpoint == approx(2j * pi, abs=1e-9)
    assert_tracks(Exp(), circle, result)


def test_square_root_monodromy():
    circle = Polyline.circle(0, 1, 64)
    result = lift_curve(square, circle, 1)
    assert result.status is LiftStatus.Completed
    assert result.endpoint == approx(-1, abs=1e-9)
    assert_tracks(square, circle, result)

    parameters = result.parameters
    assert parameters[0] == 0
    assert (np.diff(parameters) > 0).all()


def test_refined_curve_gives_same_endpoint():
    circle = Polyline.circle(0, 1, 32)
    coarse = lift_curve(square, circle, 1)
    fine = lift_curve(square, circle.refined(), 1)
    assert abs(coarse.endpoint - fine.endpoint) <= 10 * 1e-8


def test_lift_into_critical_value():
    result = lift_curve(square, Polyline.segment(1, 0), 1)
    assert result.status is LiftStatus.HitCriticalPoint
    assert result.terminal_parameter < 1
    assert abs(result.endpoint) < 1e-4


def test_lift_escapes_window():
    # log of a segment towards 0 runs off to Re z = -infinity
    result = lift_curve(Exp(), Polyline.segment(1, 1e-20), 0, window_radius=20)
    assert result.status is LiftStatus.EscapedWindow
    assert abs(result.endpoint) > 20


def test_lift_precondition():
    with raises(PreconditionError):
        lift_curve(Exp(), Polyline.segment(1, 2), 5)


def test_perturbed_lift_around_critical_value():
    curve = Polyline.through(1, 0, -1)
    assert lift_curve(square, curve, 1).status is LiftStatus.HitCriticalPoint

    result = perturbed_lift(square, curve, 1, epsilon=0.05)
    assert result.status is LiftStatus.Completed
    assert result.attempts >= 2
    assert result.endpoint ** 2 == approx(-1, abs=1e-8)
    assert abs(result.endpoint.real) < 1e-4


def test_perturbed_lift_without_retries():
    curve = Polyline.segment(1, 3 + 1j)
    plain = lift_curve(Exp(), curve, 0)
    perturbed = perturbed_lift(Exp(), curve, 0, epsilon=0.1)
    assert perturbed.attempts == 1
    assert perturbed.path == plain.path

    blocked = Polyline.segment(1, 0)
    assert perturbed_lift(square, blocked, 1, epsilon=0).status is LiftStatus.HitCriticalPoint


def test_winding_number():
    circle = Polyline.circle(0, 1, 64)
    assert winding_number(circle, 0) == 1
    assert winding_number(circle, 5) == 0
    assert winding_number(circle.reversed(), 0) == -1
    assert winding_number(circle + circle, 0) == 2

    twice = Polyline.polygon(2 + 2j, -2 + 2j, -2 - 2j, 2 - 2j, turns=2)
    assert winding_number(twice, 0) == 2

    with raises(OnCurveError):
        winding_number(circle, 1)
    with raises(NotClosedError):
        winding_number(Polyline.segment(1, 2), 0)


def test_image_winding_number_counts_a_points():
    assert image_winding_number(square, Polyline.circle(0, 1, 16), 0) == 2
    assert image_winding_number(Sinc(), Polyline.circle(0, 4, 32), 0) == 2
    assert image_winding_number(Sinc(), Polyline.circle(0, 7, 32), 0) == 4
    assert image_winding_number(Exp(), Polyline.circle(0, 3, 32), 0) == 0


def test_lifted_loop_of_omitted_value():
    # a loop around 1 avoiding 0 lifts to a closed loop whose image does not wind around 0
    loop = Polyline.circle(1, 0.5, 64)
    result = lift_curve(Exp(), loop, clog(1.5))
    assert result.completed
    assert result.endpoint == approx(clog(1.5), abs=1e-9)

    points = list(result.points[:-1]) + [result.points[0]]
    lifted = Polyline(tuple(points), closed=True)
    assert image_winding_number(Exp(), lifted, 0) == 0


def test_a_monotonic():
    assert is_a_monotonic(Polyline.segment(1, 2), 0)
    assert is_a_monotonic(Polyline.through(3, 2, 1 + 0.5j), 0)
    assert not is_a_monotonic(Polyline.segment(-1 + 1j, 1 + 1j), 0)
    assert not is_a_monotonic(Polyline.circle(0, 1, 8), 0)


def test_exp_line_sweep():
    report = line_sweep(Exp(), 2, 0.5, clog(2), direction=0, n_lines=101, max_length=10, window_radius=40)
    assert report.n_lines == 101
    assert report.failed_line_indices == [50]
    assert report.exceptional_fraction == approx(1 / 101)
    assert abs(report.singular_endpoints[0]) < 1e-3


def test_square_line_sweep_has_no_failures():
    report = line_sweep(square, 4, 1, 2, direction=0, n_lines=21, max_length=3)
    assert report.failed_line_indices == []
    assert report.exceptional_fraction == 0


def test_single_line_matches_lift():
    report = line_sweep(Exp(), 2, 0.5, clog(2), n_lines=1, max_length=10, window_radius=40)
    single = lift_curve(Exp(), Polyline.segment(2, -8), clog(2), window_radius=40)
    assert report.failed_line_indices == [0]
    assert not single.completed

    with raises(PreconditionError):
        line_sweep(Exp(), 2, 0.5, 5, n_lines=3)


def test_trace_through_critical_point():
    segment = Polyline.segment(-1, 1)
    seed = 1j * np.sqrt(0.5)
    trace = trace_preimage_component(square, segment, seed, t0=0.25)
    assert trace.bounded
    assert len(trace.critical_points) == 1
    assert trace.critical_points[0] == approx(0, abs=1e-8)

    endpoints = {
        complex(round(branch.result.endpoint.real, 6), round(branch.result.endpoint.imag, 6))
        for branch in trace.branches
        if branch.result.completed
    }
    assert {1, -1, 1j, -1j} <= endpoints


def test_unfinished_trace_is_not_bounded():
    trace = trace_preimage_component(square, Polyline.segment(-1, 1), 1j * np.sqrt(0.5), t0=0.25, max_branches=1)
    assert trace.truncated
    assert len(trace.branches) == 1
    assert not trace.escaped and not trace.stalled
    assert not trace.bounded


def test_segment_across_imaginary_axis_is_good_for_sinc():
    report = good_curve_probe(Sinc(), Polyline.segment(-1j, 1j), window_radius=40, n_seeds=8)
    assert report.probed_components >= 1
    assert report.noncompact_candidates == []
    assert report.compact_count == report.probed_components


def test_short_real_segment_is_not_good_for_sinc():
    report = good_curve_probe(Sinc(), Polyline.segment(-0.1, 0.1), window_radius=40, n_seeds=8)
    assert len(report.noncompact_candidates) >= 1
    assert all(abs(seed.imag) < 1e-6 for seed in report.noncompact_candidates)


def test_exp_preimages_of_segment_are_compact():
    report = good_curve_probe(Exp(), Polyline.segment(1, 2), window_radius=40)
    assert report.probed_components == 8
    assert report.noncompact_candidates == []


def test_paper_example_lift_in_log_plane():
    example = PaperExample()
    seed = 2
    start = cexp(g_derivatives(seed)[0])
    curve = Polyline.segment(start, 2 * start)
    result = lift_curve(example, curve, seed)
    assert result.completed
    g_end = g_derivatives(result.endpoint)[0]
    assert cexp(g_end) == approx(2 * start, rel=1e-8)
