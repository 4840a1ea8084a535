"""Similarity fitting, IFS derivation, attractor generation, and the OSC."""

import math

import numpy as np
import pytest

from fibfrac import ifs as ifsmod
from fibfrac.errors import (
    DegenerateLandmarksError,
    DomainError,
    SelfSimilarityError,
)

PI2 = math.pi / 2
R_RIGHT = 1.0 / (1.0 + math.sqrt(2.0))


def rand_sim(rng):
    return ifsmod.Similarity(
        scale=float(rng.uniform(0.2, 3.0)),
        rotation=float(rng.uniform(-math.pi, math.pi)),
        reflect=bool(rng.integers(0, 2)),
        translation=(float(rng.normal()), float(rng.normal())),
    )


def test_similarity_apply_hand_check():
    m = ifsmod.Similarity(scale=2.0, rotation=PI2, reflect=False,
                          translation=(1.0, 0.0))
    out = m.apply(np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert np.allclose(out, [[1.0, 2.0], [-1.0, 0.0]])


def test_similarity_reflect_conjugates_first():
    m = ifsmod.Similarity(scale=1.0, rotation=0.0, reflect=True,
                          translation=(0.0, 0.0))
    out = m.apply(np.array([[0.5, 2.0]]))
    assert np.allclose(out, [[0.5, -2.0]])


def test_compose_matches_sequential_apply():
    rng = np.random.default_rng(11)
    pts = rng.normal(size=(20, 2))
    for _ in range(25):
        f, g = rand_sim(rng), rand_sim(rng)
        assert np.allclose(f.compose(g).apply(pts), f.apply(g.apply(pts)),
                           atol=1e-12)


def test_fit_recovers_random_similarity():
    rng = np.random.default_rng(5)
    for _ in range(25):
        m = rand_sim(rng)
        src = rng.normal(size=(6, 2)) * 3
        fit, rms = ifsmod.fit_similarity(src, m.apply(src))
        assert rms < 1e-12
        assert fit.reflect == m.reflect
        assert fit.scale == pytest.approx(m.scale, rel=1e-12)
        rot_diff = (fit.rotation - m.rotation) % (2 * math.pi)
        assert min(rot_diff, 2 * math.pi - rot_diff) < 1e-12
        assert fit.translation == pytest.approx(m.translation, abs=1e-12)


def test_fit_rejects_degenerate_landmarks():
    same = np.zeros((4, 2))
    with pytest.raises(DegenerateLandmarksError):
        ifsmod.fit_similarity(same, same)
    line = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
    with pytest.raises(DegenerateLandmarksError):
        ifsmod.fit_similarity(line, 2 * line)
    fit, rms = ifsmod.fit_similarity(line, 2 * line, allow_collinear=True)
    assert rms < 1e-12 and fit.scale == pytest.approx(2.0)


def test_fit_input_validation():
    good = np.zeros((3, 2))
    with pytest.raises(DomainError):
        ifsmod.fit_similarity(good, np.zeros((4, 2)))
    with pytest.raises(DomainError):
        ifsmod.fit_similarity(np.zeros((2, 2)), np.zeros((2, 2)))


def test_right_angle_map_table():
    system = ifsmod.derive_ifs(2, PI2)
    assert system.parity == "even"
    assert system.frame.chord_direction == pytest.approx(math.pi / 8, abs=1e-12)
    scales = [m.scale for m in system.maps]
    assert scales == pytest.approx(
        [R_RIGHT, R_RIGHT, R_RIGHT**2, R_RIGHT, R_RIGHT], rel=1e-12
    )
    rots = [math.degrees(m.rotation) for m in system.maps]
    assert rots[0] == pytest.approx(90.0, abs=1e-9)
    assert rots[1] == pytest.approx(0.0, abs=1e-9)
    assert abs(rots[2]) == pytest.approx(180.0, abs=1e-9)
    assert rots[3] == pytest.approx(0.0, abs=1e-9)
    assert rots[4] == pytest.approx(90.0, abs=1e-9)
    assert [m.reflect for m in system.maps] == [True, True, False, True, True]
    # the first map fixes the origin, the last fixes the far chord end
    assert system.maps[0].translation == pytest.approx((0.0, 0.0), abs=1e-12)
    end = system.frame.seeds()[1]
    assert system.maps[4].apply(end[None, :])[0] == pytest.approx(end, abs=1e-12)


def test_odd_family_chord_direction():
    system = ifsmod.derive_ifs(3, PI2)
    assert system.parity == "odd"
    assert system.frame.chord_direction == pytest.approx(3 * math.pi / 8,
                                                         abs=1e-12)
    scales = [m.scale for m in system.maps]
    assert scales == pytest.approx(
        [R_RIGHT, R_RIGHT, R_RIGHT**2, R_RIGHT, R_RIGHT], rel=1e-12
    )


@pytest.mark.parametrize("alpha", [0.3, math.pi / 4, 1.2])
def test_scale_spectrum_other_angles(alpha):
    rp = 1.0 + math.cos(alpha) + math.sqrt((1.0 + math.cos(alpha)) ** 2 + 1.0)
    R = 1.0 / rp
    for i in (2, 3):
        system = ifsmod.derive_ifs(i, alpha)
        assert [m.scale for m in system.maps] == pytest.approx(
            [R, R, R * R, R, R], rel=1e-9
        )


def test_reference_order_independence():
    a = ifsmod.derive_ifs(2, PI2, n_ref=17)
    b = ifsmod.derive_ifs(2, PI2, n_ref=23)
    for ma, mb in zip(a.maps, b.maps):
        assert ma.scale == pytest.approx(mb.scale, rel=1e-12)
        assert ma.rotation == pytest.approx(mb.rotation, abs=1e-12)
        assert ma.reflect == mb.reflect
        assert ma.translation == pytest.approx(mb.translation, abs=1e-12)


def test_parity_mismatch_detected():
    with pytest.raises(SelfSimilarityError):
        ifsmod.derive_ifs(2, PI2, draw_parity="odd-left")


def test_derive_argument_validation():
    with pytest.raises(DomainError):
        ifsmod.derive_ifs(1, PI2)
    with pytest.raises(DomainError):
        ifsmod.derive_ifs(2, 2.0)
    with pytest.raises(DomainError):
        ifsmod.derive_ifs(2, PI2, n_ref=18)
    with pytest.raises(DomainError):
        ifsmod.derive_ifs(3, PI2, n_ref=17)


def test_attractor_counts():
    system = ifsmod.derive_ifs(2, PI2)
    assert np.array_equal(ifsmod.attractor(system, depth=0),
                          system.frame.seeds())
    for d in range(4):
        assert ifsmod.attractor(system, depth=d).shape == (2 * 5**d, 2)


def test_attractor_budget_mode():
    system = ifsmod.derive_ifs(2, PI2)
    assert ifsmod.attractor(system, budget=100).shape[0] == 50
    assert ifsmod.attractor(system, budget=250).shape[0] == 250
    assert ifsmod.attractor(system, budget=2).shape[0] == 2


def test_attractor_argument_validation():
    system = ifsmod.derive_ifs(2, PI2)
    with pytest.raises(DomainError):
        ifsmod.attractor(system)
    with pytest.raises(DomainError):
        ifsmod.attractor(system, depth=-1)
    with pytest.raises(DomainError):
        ifsmod.attractor(system, budget=1)


def test_attractor_levels_nest():
    # every level-k point is the image of a coarser point under some map,
    # and the endpoint maps fix the seeds, so V_k is a subset of V_{k+1}
    system = ifsmod.derive_ifs(2, PI2)
    coarse = ifsmod.attractor(system, depth=3)
    fine = ifsmod.attractor(system, depth=4)
    d2 = ((coarse[:, None, :] - fine[None, :, :]) ** 2).sum(axis=2)
    assert float(d2.min(axis=1).max()) < 1e-24


@pytest.mark.parametrize("i", [2, 3])
@pytest.mark.parametrize("alpha", [math.pi / 6, math.pi / 4, math.pi / 3, PI2])
def test_open_set_condition(i, alpha):
    report = ifsmod.verify_osc(ifsmod.derive_ifs(i, alpha))
    assert report.contained
    assert report.pairwise_disjoint
    assert report.margin > 0.0


def test_osc_negative_control_duplicate_map():
    system = ifsmod.derive_ifs(2, PI2)
    m = system.maps
    broken = ifsmod.IFS(maps=(m[0], m[0], m[2], m[3], m[4]),
                        alpha=system.alpha, parity=system.parity,
                        frame=system.frame)
    report = ifsmod.verify_osc(broken)
    assert not report.pairwise_disjoint
    assert report.margin <= 0.0


@pytest.mark.parametrize("alpha", [0.2, math.pi / 3, PI2])
def test_invariance_residual_small(alpha):
    system = ifsmod.derive_ifs(2, alpha)
    pts = ifsmod.attractor(system, depth=6)
    diam = math.hypot(*(pts.max(axis=0) - pts.min(axis=0)))
    assert ifsmod.invariance_residual(system, pts) < 0.02 * diam


def test_json_round_trip_exact():
    system = ifsmod.derive_ifs(2, 0.8)
    back = ifsmod.from_json(ifsmod.to_json(system))
    assert back.alpha == system.alpha
    assert back.parity == system.parity
    assert back.frame.chord_direction == system.frame.chord_direction
    assert back.maps == system.maps


def test_json_layout():
    import json

    doc = json.loads(ifsmod.to_json(ifsmod.derive_ifs(2, PI2)))
    assert set(doc) == {"alpha", "parity", "chord_direction", "maps"}
    assert len(doc["maps"]) == 5
    assert set(doc["maps"][0]) == {"scale", "rotation", "reflect", "tx", "ty"}
