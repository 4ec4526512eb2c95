from cmath import exp as cexp, pi
from fractions import Fraction
from math import log
from pathlib import Path
import os

from pytest import approx, raises, skip
import numpy as np

from inverse_singularities.errors import EpsilonRangeError, PreconditionError, UndersampledError
from inverse_singularities.fnmodel import LN2, PaperExample, SignedLogReal, signed_log_re_g_grid
from inverse_singularities.components import Window, LogRadius, SublevelField, label_components
from inverse_singularities.paperexample import (
    level_geometry, SetKind, TreeSet, build_tree, verify_inequalities, sample_table,
    verify_arg_monotonic, count_sublevel_arcs, tree_hits, render_svg, SvgStyle
)


epsilon = Fraction(1, 16)
window = Window(0, 80, 80, 0.25)
golden_svg = Path(__file__).parent / 'data' / 'tree_eps16_n6_w80.svg'


def test_level_geometry():
    geometry = level_geometry(3, epsilon)
    assert geometry.r_n == 17
    assert geometry.r_n_prime == 28
    assert geometry.next_radius == 34

    geometry = level_geometry(1, Fraction(1, 8))
    assert geometry.r_n == 4.5
    assert geometry.r_n_prime == 6

    for n in range(1, 12):
        geometry = level_geometry(n, Fraction(1, 8))
        assert geometry.r_n < geometry.r_n_prime < geometry.next_radius


def test_epsilon_range():
    for wrong in (Fraction(1, 4), 0, -0.01):
        with raises(EpsilonRangeError):
            level_geometry(3, wrong)
    with raises(EpsilonRangeError):
        build_tree(Fraction(1, 4), 3, window)
    with raises(PreconditionError):
        level_geometry(0, epsilon)


def test_connecting_arc_endpoints():
    arc = TreeSet(SetKind.Cminus, 0, 2, epsilon)
    assert arc.radial_range == (14, 17)
    assert arc.start == approx(14 * cexp(1j * pi / 4))
    assert arc.end == approx(17 * cexp(1j * pi / 8))


def test_tree_structure():
    tree = build_tree(epsilon, 4, window)
    for n in range(1, 5):
        assert len([node for node in tree.nodes if node.n == n]) == 2 ** n
    assert len(tree.edges) == 2 * (2 + 4 + 8)

    r_1 = level_geometry(1, epsilon).r_n
    assert tree.node(0, 1).start == approx(1j * r_1)
    assert tree.node(1, 1).start == approx(-1j * r_1)
    assert tree.root_segment.start == approx(-1j * r_1)

    for node in tree.nodes:
        children = tree.children(node)
        assert len(children) == (2 if node.n < 4 else 0)
        for edge, child in zip(tree.edges_from(node), children):
            assert edge.start == approx(node.end)
            assert edge.end == approx(child.start, abs=1e-9)
            assert edge.end_angle_over_pi == child.angle_over_pi


def test_visible_segments_per_level():
    tree = build_tree(epsilon, 5, window)
    assert tree.visible_counts() == {1: 2, 2: 4, 3: 8, 4: 16, 5: 0}


def test_sampled_values_of_level_three():
    table = sample_table(epsilon, [3], samples_per_set=16)
    ray = table.having(kind='A', j=0, n=3)
    first = ray.iloc[0]
    assert first.x == 17 and first.y == 0
    assert first.sign == 1
    direct = sum((17 / 2 ** k) ** (2 ** k) for k in range(1, 7))
    assert direct == approx(816.9, abs=0.1)
    assert first.log_abs == approx(log(direct), rel=1e-10)

    segment = table.having(kind='B', j=0, n=3).iloc[0]
    assert complex(segment.x, segment.y) == approx(17 * cexp(1j * pi / 8))
    assert segment.sign == -1
    assert segment.log_abs > 8 * LN2


def test_inequalities_hold_from_level_four():
    report = verify_inequalities(epsilon, range(4, 9), samples_per_set=256)
    assert report.passed
    assert report.failing_sets() == []
    assert len(report.checks) == sum(4 * 2 ** n for n in range(4, 9))

    margins = report.min_margin_by_level()
    assert 0 < margins[4] < margins[5] < margins[6] < margins[7] < margins[8]
    # the thinnest margin sits at the lowest level
    assert margins[4] < 0.1


def test_odd_rays_fail_at_level_three():
    report = verify_inequalities(epsilon, [3], samples_per_set=64)
    assert not report.passed
    failing = {check.name for check in report.failures}
    assert {'A[1,3]', 'A[3,3]', 'A[5,3]', 'A[7,3]'} <= failing
    assert all(check.kind is SetKind.A for check in report.failures)
    assert report.failing_sets() == [check.name for check in report.failures]


def test_inequality_checks_are_conjugation_symmetric():
    report = verify_inequalities(epsilon, [4], samples_per_set=32)
    segments = {check.j: check for check in report.checks if check.kind is SetKind.B}
    for j, check in segments.items():
        mirror = segments[2 ** 4 - 1 - j]
        assert check.passed == mirror.passed
        assert check.min_log_margin == approx(mirror.min_log_margin, rel=1e-6)


def test_inequality_preconditions():
    with raises(PreconditionError):
        verify_inequalities(epsilon, [4], samples_per_set=8)


def midpoint(n):
    low, high = level_geometry(n, epsilon).annulus
    return (low + high) / 2


def test_argument_is_monotonic():
    for n in (5, 6, 7):
        assert verify_arg_monotonic(epsilon, n, midpoint(n)).min_derivative > 0

    check = verify_arg_monotonic(epsilon, 8, midpoint(8))
    assert check.bound_holds
    assert check.excluded == []
    assert check.total_increase == approx(256 * 2 * pi, rel=1e-3)


def test_arg_monotonic_preconditions():
    with raises(PreconditionError):
        verify_arg_monotonic(epsilon, 4, 30)
    with raises(PreconditionError):
        verify_arg_monotonic(epsilon, 4, 44, n_theta=64)


def test_sixteen_arcs_at_level_four():
    count = count_sublevel_arcs(epsilon, 4, 44, SignedLogReal.power_tower(4, -1))
    assert count.arc_count == 16
    assert count.midpoints_covered
    assert count.rays_avoided
    assert not count.full_circle


def test_eight_arcs_at_level_three():
    count = count_sublevel_arcs(epsilon, 3, 22, SignedLogReal.power_tower(3, -1))
    assert count.arc_count == 8
    assert count.midpoints_covered


def test_threshold_above_circle_gives_full_arc():
    count = count_sublevel_arcs(epsilon, 4, 44, SignedLogReal(1, 1000))
    assert count.arc_count == 1
    assert count.full_circle
    assert not count.midpoints_covered


def test_undersampled_arcs():
    n_theta = 2 ** 10
    theta = 2 * pi * np.arange(n_theta) / n_theta
    signs, log_abs, _ = signed_log_re_g_grid(44 * np.exp(1j * theta))
    deepest = log_abs[signs < 0].max()
    with raises(UndersampledError):
        count_sublevel_arcs(epsilon, 4, 44, SignedLogReal(-1, deepest - 1e-9), n_theta=n_theta)


def test_components_of_deep_sublevel_set_meet_tree():
    coarse = Window(0, 80, 80, 0.5)
    level = label_components(SublevelField(PaperExample(), 0, coarse), LogRadius(-1e5))
    hits = tree_hits(build_tree(epsilon, 5, coarse), level.labels, coarse)
    assert len(level.components) >= 2
    for component in level.components:
        assert component.id in hits


def test_svg_is_deterministic():
    tree = build_tree(epsilon, 6, window)
    first = render_svg(tree)
    second = render_svg(tree, window, SvgStyle())
    assert first == second
    assert first.lstrip().startswith(b'<?xml')
    assert b'<svg' in first
    assert b'stroke-dasharray' in first


def test_svg_of_root_segment_only():
    tree = build_tree(epsilon, 0, window)
    assert tree.nodes == [] and tree.edges == []
    document = render_svg(tree)
    assert b'<svg' in document
    assert b'stroke-dasharray' not in document


def test_svg_matches_golden_file():
    document = render_svg(build_tree(epsilon, 6, window))
    if os.environ.get('REGENERATE_GOLDEN') or not golden_svg.exists():
        golden_svg.parent.mkdir(parents=True, exist_ok=True)
        golden_svg.write_bytes(document)
        skip(f'wrote {golden_svg.name}; commit it and rerun')
    assert document == golden_svg.read_bytes()
