import itertools
import math
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import make_scene, ped
from crfintent.graph import (
    GraphConfig,
    UnusedProbabilityWarning,
    build_graph,
    pairwise_distance,
    pedestrian_center,
)
from crfintent.scene import Orientation, PedestrianObservation, pair_key


def test_center_of_box():
    p = PedestrianObservation("a", ((0, 0, 10, 20), (100, 50, 140, 150)))
    assert pedestrian_center(p, 0) == (5.0, 10.0)
    assert pedestrian_center(p, 1) == (120.0, 100.0)
    with pytest.raises(IndexError):
        pedestrian_center(p, 2)


@pytest.mark.parametrize(
    "ca, cb, expected",
    [((0, 0), (3, 4), 5.0), ((7, 7), (7, 7), 0.0), ((10, 0), (70, 0), 60.0)],
)
def test_pairwise_distance(ca, cb, expected):
    a, b = ped("a", ca), ped("b", cb)
    assert pairwise_distance(a, b) == expected
    assert pairwise_distance(b, a) == expected


def test_distance_uses_last_frame():
    a = PedestrianObservation("a", ((0, 0, 10, 10), (100, 0, 110, 10)))
    b = PedestrianObservation("b", ((0, 0, 10, 10), (0, 0, 10, 10)))
    assert pairwise_distance(a, b) == 100.0


def test_distance_length_mismatch():
    with pytest.raises(ValueError):
        pairwise_distance(ped("a", frames=2), ped("b", frames=3))


def test_delta_d_must_be_positive():
    with pytest.raises(ValueError):
        GraphConfig(0.0)


def test_two_left_pedestrians_close():
    scene = make_scene([ped("a", (0, 0), orientation="left"), ped("b", (30, 0), orientation="left")])
    g = build_graph(scene, GraphConfig(50))
    assert g.pp_edges == (("a", "b"),)
    assert g.pe_edges == ("a", "b")
    assert g.clustered


def test_single_pedestrian():
    g = build_graph(make_scene([ped("a", orientation="right")]))
    assert g.pp_edges == ()
    assert g.pe_edges == ("a",)


def test_inter_cluster_link_ignores_threshold():
    scene = make_scene(
        [
            ped("l1", (0, 0), orientation="left"),
            ped("l2", (200, 0), orientation="left"),
            ped("r1", (500, 0), orientation="right"),
        ]
    )
    g = build_graph(scene, GraphConfig(50))
    assert g.pp_edges == (("l2", "r1"),)


def test_unknown_orientation_triggers_fallback():
    # l and r face opposite ways and are far apart; cluster mode would link them
    peds = [
        ped("l", (0, 0), orientation="left"),
        ped("r", (500, 0), orientation="right"),
        ped("u", (520, 0)),
    ]
    g = build_graph(make_scene(peds), GraphConfig(50))
    assert not g.clustered
    assert g.pp_edges == (("r", "u"),)


def test_tie_breaks_on_lexicographic_pair():
    peds = [
        ped("b", (0, 0), orientation="left"),
        ped("z", (100, 0), orientation="right"),
        ped("a", (-100, 0), orientation="right"),
    ]
    # z and a are both 100 px from b
    g = build_graph(make_scene(peds), GraphConfig(10))
    assert g.pp_edges == (("a", "b"),)


def test_unused_pp_entries_warn():
    scene = make_scene([ped("a", (0, 0)), ped("b", (500, 0))], pp={("a", "b"): (0.2, 0.3, 0.5)})
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        g = build_graph(scene)
    assert g.pp_edges == ()
    assert any(issubclass(c.category, UnusedProbabilityWarning) for c in caught)


def test_deterministic():
    peds = [ped(f"p{k}", (k * 20.0, (k % 3) * 15.0), orientation="left" if k % 2 else "right")
            for k in range(8)]
    scene = make_scene(peds)
    assert build_graph(scene) == build_graph(scene)


# ---------------------------------------------------------------------------
# properties over random layouts

orientations = st.sampled_from(["left", "right", None])
layouts = st.lists(
    st.tuples(st.floats(0, 300), st.floats(0, 300), orientations), min_size=1, max_size=9
)


def _scene(layout, flip=False):
    swap = {"left": "right", "right": "left", None: None}
    return make_scene(
        [ped(f"p{k}", (x, y), orientation=swap[o] if flip else o) for k, (x, y, o) in enumerate(layout)]
    )


def _dist(a, b):
    (ax, ay), (bx, by) = pedestrian_center(a, -1), pedestrian_center(b, -1)
    return math.hypot(ax - bx, ay - by)


@given(layouts, st.floats(1, 200))
@settings(max_examples=150, deadline=None)
def test_graph_rules(layout, delta):
    scene = _scene(layout)
    g = build_graph(scene, GraphConfig(delta))
    edges = set(g.pp_edges)
    assert len(edges) == len(g.pp_edges)
    assert all(a != b for a, b in edges)
    assert g.pe_edges == scene.ids

    peds = scene.pedestrians
    if any(p.orientation is Orientation.UNKNOWN for p in peds):
        expected = {pair_key(a.id, b.id) for a, b in itertools.combinations(peds, 2) if _dist(a, b) < delta}
        assert edges == expected
        return
    left = [p for p in peds if p.orientation is Orientation.LEFT]
    right = [p for p in peds if p.orientation is Orientation.RIGHT]
    for group in (left, right):
        for a, b in itertools.combinations(group, 2):
            assert (pair_key(a.id, b.id) in edges) == (_dist(a, b) < delta)
    cross = [pair_key(a.id, b.id) for a in left for b in right]
    linked = [e for e in cross if e in edges]
    if left and right:
        assert len(linked) == 1
        best = min(_dist(a, b) for a in left for b in right)
        a, b = linked[0]
        assert _dist(scene.pedestrian(a), scene.pedestrian(b)) == best
    else:
        assert linked == []


@given(layouts, st.floats(1, 200))
@settings(max_examples=100, deadline=None)
def test_orientation_swap_symmetry(layout, delta):
    cfg = GraphConfig(delta)
    assert build_graph(_scene(layout), cfg).pp_edges == build_graph(_scene(layout, flip=True), cfg).pp_edges


@given(st.lists(st.tuples(st.floats(0, 300), st.floats(0, 300)), min_size=1, max_size=9),
       st.floats(1, 200), st.floats(0, 200))
@settings(max_examples=100, deadline=None)
def test_fallback_monotone_in_delta(points, delta, extra):
    scene = make_scene([ped(f"p{k}", xy) for k, xy in enumerate(points)])
    small = set(build_graph(scene, GraphConfig(delta)).pp_edges)
    large = set(build_graph(scene, GraphConfig(delta + extra)).pp_edges)
    assert small <= large
