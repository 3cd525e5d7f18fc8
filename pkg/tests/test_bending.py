import math

import numpy as np
import pytest

from wildknot import lorentz as lz
from wildknot.bending import (
    bend,
    bending_locus,
    bending_rotation,
    commutation_residual,
    crossing_relations,
    crossing_word,
    lambda_max,
    split_sides,
    suitable_amalgams,
)
from wildknot.cover import build_cover
from wildknot.groups import GroupError, assemble_group
from wildknot.presets import spun_trefoil_preset


@pytest.fixture(scope="module")
def preset():
    c = spun_trefoil_preset()
    cover = build_cover(c, k=0)
    group = assemble_group(c, cover)
    return c, cover, group


@pytest.fixture(scope="module")
def mid_leg_amalgam(preset):
    """A straight amalgam far from both junctions and all turns."""
    _c, cover, group = preset
    best = None
    for j in suitable_amalgams(group):
        am = group.amalgams[j]
        if not am.straight:
            continue
        center = np.array([(lo + hi) / 2.0 for lo, hi in am.square])
        # deep inside the long vertical leg
        if 30 <= center[3] <= 50 and center[0] > 40 and center[1] > 25:
            best = j
            break
    assert best is not None
    return best


def test_locus_radius_closed_form(preset, mid_leg_amalgam):
    _c, _cover, group = preset
    locus = bending_locus(group, mid_leg_amalgam)
    assert locus.radius == pytest.approx(1.0 / math.sqrt(6.0), abs=1e-9)
    assert locus.orthogonality_residuals.max() <= 1e-9
    assert set(locus.plane_axes) | set(locus.rotation_axes) == {0, 1, 2, 3}


def test_locus_out_of_range(preset):
    _c, _cover, group = preset
    with pytest.raises(GroupError):
        bending_locus(group, 10_000)


def test_rotation_one_parameter_group(preset, mid_leg_amalgam):
    _c, _cover, group = preset
    locus = bending_locus(group, mid_leg_amalgam)
    assert np.allclose(bending_rotation(locus, 0.0), np.eye(6))
    e1 = bending_rotation(locus, 0.1)
    e2 = bending_rotation(locus, 0.25)
    assert np.abs(e1 @ e2 - bending_rotation(locus, 0.35)).max() <= 1e-14
    assert np.abs(e1 @ bending_rotation(locus, -0.1) - np.eye(6)).max() <= 1e-14
    assert lz.lorentz_defect(e1) <= 1e-14


def test_rotation_fixes_circle_pointwise(preset, mid_leg_amalgam):
    _c, _cover, group = preset
    locus = bending_locus(group, mid_leg_amalgam)
    e = bending_rotation(locus, 0.2)
    u, v = locus.plane_axes
    for theta in np.linspace(0.0, 2 * math.pi, 9):
        pt = np.zeros(4)  # amalgam frame: circle about the origin
        pt[u] = locus.radius * math.cos(theta)
        pt[v] = locus.radius * math.sin(theta)
        img = lz.apply_to_point(e, pt)
        assert np.abs(img - pt).max() <= 1e-12


def test_commutation_with_amalgam_generators(preset, mid_leg_amalgam):
    _c, _cover, group = preset
    locus = bending_locus(group, mid_leg_amalgam)
    for t in (0.05, 0.2, 0.3):
        assert commutation_residual(group, locus, t) <= 1e-9


def test_split_sides_partition(preset, mid_leg_amalgam):
    _c, cover, group = preset
    side_a, side_b = split_sides(group, mid_leg_amalgam)
    assert side_a | side_b == set(range(len(cover)))
    assert not side_a & side_b
    assert set(group.amalgams[mid_leg_amalgam].ball_ids) <= side_a
    assert side_b


def test_mid_leg_crossing_relations_all_in_gamma(preset, mid_leg_amalgam):
    _c, _cover, group = preset
    crossing = crossing_relations(group, mid_leg_amalgam)
    assert crossing  # the tube walls do cross the section
    assert all(flag for (_i, _k, _m, flag) in crossing)


def test_junction_amalgam_bendable(preset):
    """At an attach square the whole plate sits on E_t's fixed plane, so
    every crossing relation has a commuting member and bending goes through."""
    _c, _cover, group = preset
    crossing = crossing_relations(group, 0)
    assert all(flag for (_i, _k, _m, flag) in crossing)
    rep = bend(group, 0, 0.2)
    assert rep.relation_report["max_residual"] <= 1e-8


def test_turn_amalgams_unsuitable(preset):
    """Near the tube's folded-back turns, spatially adjacent balls land on
    opposite chain sides with no commuting member: bending must refuse."""
    _c, _cover, group = preset
    unsuitable = sorted(set(range(len(group.amalgams))) - set(suitable_amalgams(group)))
    assert unsuitable
    j = unsuitable[0]
    assert any(not flag for (_i, _k, _m, flag) in crossing_relations(group, j))
    with pytest.raises(GroupError, match="relation"):
        bend(group, j, 0.2)


def test_bend_zero_is_base(preset, mid_leg_amalgam):
    _c, _cover, group = preset
    rep = bend(group, mid_leg_amalgam, 0.0)
    assert np.allclose(rep.e_matrix, np.eye(6))
    ball = next(iter(rep.side_b))
    from wildknot.bending import _frame_reflection

    assert np.allclose(
        rep.generator_matrix(ball),
        _frame_reflection(group.cover, ball, rep.locus.center),
    )


def test_bend_relation_sweep(preset, mid_leg_amalgam):
    _c, _cover, group = preset
    for t in np.arange(0.0, 0.3001, 0.05):
        rep = bend(group, mid_leg_amalgam, float(t))
        assert rep.relation_report["max_residual"] <= 1e-8
        assert rep.relation_report["commutation_residual"] <= 1e-9


def test_crossing_word_nontrivial_deformation(preset, mid_leg_amalgam):
    _c, _cover, group = preset
    word = crossing_word(group, mid_leg_amalgam)
    rep0 = bend(group, mid_leg_amalgam, 0.0)
    rep2 = bend(group, mid_leg_amalgam, 0.2)
    m0 = rep0.word_matrix(word)
    m2 = rep2.word_matrix(word)
    kind0, _ = lz.classify_map(m0)
    assert kind0 == "loxodromic"
    l0 = lambda_max(m0)
    l2 = lambda_max(m2)
    assert abs(l2 - l0) > 1e-4


def test_lambda_max_conjugation_invariant(preset, mid_leg_amalgam):
    _c, _cover, group = preset
    word = crossing_word(group, mid_leg_amalgam)
    rep = bend(group, mid_leg_amalgam, 0.2)
    m = rep.word_matrix(word)
    rng = np.random.default_rng(5)
    conj = lz.random_moebius(rng)
    m_conj = conj @ m @ lz.inverse(conj)
    # eigenvalues of a nonsymmetric 6x6 at dilation ~2e3 carry a few units
    # in the fourth digit of conjugation noise; this is a sanity check only
    assert lambda_max(m_conj) == pytest.approx(lambda_max(m), rel=1e-3)
