"""Placement diagnosis: counting test, disjoint-path test, tree test,
and the exact-rank fallback, with the frozen demo networks as witnesses."""

import pytest

from flowscope.conditions import (
    ComponentDiagnosis,
    Verdict,
    diagnose,
    explain_component,
    is_tree,
    legacy_count_condition,
    min_vertex_cut,
)
from flowscope.errors import InvalidCutError
from flowscope.monitoring import Placement, unmonitored_components
from flowscope.network import RoadNetwork
from flowscope.scenarios import (
    CITY_BLOCKED_MONITORS,
    CITY_FIXED_MONITORS,
    city_blocked_placement,
    city_demo,
    city_fixed_placement,
    crossed_pairs_demo,
    crossed_pairs_placement,
    ring_demo,
    ring_placement,
)

from oracles import (
    CITY_BLOCKED_LEFT,
    CITY_BLOCKED_RIGHT,
    CITY_X,
    GATEWAY_CUT,
    OBSTRUCTION_RANK_BOUND,
    OBSTRUCTION_ZERO_ROWS,
)


def single_component(net, placement):
    components = unmonitored_components(net, placement)
    assert len(components) == 1
    return components[0]


class TestCountCondition:
    def test_gateway_passes_the_count(self, gateway_net, gateway_placement):
        comp = single_component(gateway_net, gateway_placement)
        # two centroids, two border vertices: counting alone is satisfied
        assert legacy_count_condition(comp)

    def test_star_with_shared_border_fails(self):
        net = RoadNetwork.from_edges(
            ["a", "b", "c", "d"],
            [("a", "b"), ("b", "c"), ("b", "d")],
            centroids=("c", "d"),
        )
        comp = single_component(net, Placement(monitored=frozenset({"a"})))
        assert not legacy_count_condition(comp)


class TestMinVertexCut:
    def test_gateway_bottleneck(self, gateway_net, gateway_placement):
        comp = single_component(gateway_net, gateway_placement)
        witness = min_vertex_cut(comp)
        assert witness.size == 1
        assert witness.cut == GATEWAY_CUT
        assert witness.paths == (("e", "d"),)
        assert witness.path_sources() == frozenset({"e"})

    def test_pentagon_routes_every_centroid(self, pentagon_net, pentagon_placement):
        comp = single_component(pentagon_net, pentagon_placement)
        witness = min_vertex_cut(comp)
        assert witness.size == 3
        assert witness.path_sources() == frozenset({"b", "d", "f"})
        # border centroids are their own length-zero routes
        assert ("d",) in witness.paths
        assert ("f",) in witness.paths
        # witness routes are vertex disjoint
        seen: set[str] = set()
        for path in witness.paths:
            assert seen.isdisjoint(path)
            seen.update(path)

    def test_singleton_component_needs_no_cut(self):
        net = RoadNetwork.from_edges(["m", "p"], [("m", "p")])
        comp = single_component(net, Placement(monitored=frozenset({"m"})))
        witness = min_vertex_cut(comp)
        assert witness.size == 0
        assert witness.cut == ()
        assert witness.paths == ()

    def test_cut_json_shape(self, gateway_net, gateway_placement):
        comp = single_component(gateway_net, gateway_placement)
        assert min_vertex_cut(comp).to_json() == {
            "size": 1,
            "cut": ["d"],
            "paths": [["e", "d"]],
        }


class TestTreeShape:
    def test_gateway_component_is_a_tree(self, gateway_net, gateway_placement):
        assert is_tree(single_component(gateway_net, gateway_placement))

    def test_ring_component_is_not(self):
        comp = single_component(ring_demo(), ring_placement())
        assert not is_tree(comp)


class TestDiagnoseGateway:
    def test_refuted_by_the_path_test(self, gateway_net, gateway_placement):
        report = diagnose(gateway_net, gateway_placement)
        assert report.overall is Verdict.NOT_CALCULABLE
        assert not report.rank_fallback_used
        assert len(report.components) == 1
        diag = report.components[0]
        assert diag.legacy_count_ok
        assert not diag.disjoint_paths_ok
        assert diag.tree
        assert diag.verdict is Verdict.NOT_CALCULABLE
        assert diag.rank is None
        assert diag.blocked_centroids == ("f",)
        assert "only 1 disjoint route" in diag.reason
        assert "cannot reach the border without crossing {d}" in diag.reason

    def test_report_json_shape(self, gateway_net, gateway_placement):
        data = diagnose(gateway_net, gateway_placement).to_json()
        assert data["overall"] == "not_calculable"
        assert data["monitored"] == ["a"]
        assert data["rank_fallback_used"] is False
        (comp,) = data["components"]
        assert comp["index"] == 0
        assert comp["vertices"] == ["b", "c", "d", "e", "f"]
        assert comp["border"] == ["b", "d"]
        assert comp["centroids"] == ["e", "f"]
        assert comp["cut"] == {"size": 1, "cut": ["d"], "paths": [["e", "d"]]}
        assert comp["blocked_centroids"] == ["f"]
        assert comp["tree"] is True
        assert "rank" not in comp


class TestDiagnosePentagon:
    def test_certified_by_the_tree_test(self, pentagon_net, pentagon_placement):
        report = diagnose(pentagon_net, pentagon_placement)
        assert report.overall is Verdict.CALCULABLE
        assert not report.rank_fallback_used
        diag = report.components[0]
        assert diag.verdict is Verdict.CALCULABLE
        assert diag.tree
        assert diag.disjoint_paths_ok
        assert diag.rank is None
        assert diag.reason == (
            "tree-shaped with one disjoint route to the border per centroid"
        )


class TestRankFallback:
    def test_ring_certified_by_rank(self):
        report = diagnose(ring_demo(), ring_placement())
        assert report.overall is Verdict.CALCULABLE
        assert report.rank_fallback_used
        diag = report.components[0]
        assert not diag.tree
        assert diag.disjoint_paths_ok
        assert diag.verdict is Verdict.CALCULABLE
        assert diag.rank is not None
        assert diag.rank.full_column_rank
        assert "full column rank" in diag.reason

    def test_crossed_pairs_refuted_by_rank(self):
        report = diagnose(crossed_pairs_demo(), crossed_pairs_placement())
        assert report.overall is Verdict.NOT_CALCULABLE
        assert report.rank_fallback_used
        diag = report.components[0]
        # the structural tests all pass...
        assert diag.legacy_count_ok
        assert diag.disjoint_paths_ok
        assert not diag.tree
        # ...yet the exact rank refutes the placement
        assert diag.verdict is Verdict.NOT_CALCULABLE
        assert diag.rank is not None
        assert diag.rank.columns == 4
        assert diag.rank.rank == 3
        assert not diag.rank.full_column_rank
        assert "leaving 1 degree" in diag.reason
        assert diag.blocked_centroids == ()

    def test_fallback_can_be_disabled(self):
        report = diagnose(
            crossed_pairs_demo(), crossed_pairs_placement(), rank_fallback=False
        )
        assert report.overall is Verdict.UNDETERMINED
        assert not report.rank_fallback_used
        diag = report.components[0]
        assert diag.verdict is Verdict.UNDETERMINED
        assert diag.rank is None
        assert diag.reason == "contains cycles; the structural tests cannot decide"


class TestDegenerateComponents:
    def test_plain_singletons_are_trivially_fine(self):
        net = RoadNetwork.from_edges(
            ["m", "p", "q"], [("m", "p"), ("m", "q")]
        )
        report = diagnose(net, Placement(monitored=frozenset({"m"})))
        assert report.overall is Verdict.CALCULABLE
        assert not report.rank_fallback_used
        assert len(report.components) == 2
        for diag in report.components:
            assert diag.component.trivial
            assert diag.verdict is Verdict.CALCULABLE
            assert diag.reason == "carries no unknown flows"

    def test_isolated_centroid_is_pinned_to_zero(self):
        net = RoadNetwork.from_edges(
            ["m", "p", "z"], [("m", "p")], centroids=("z",)
        )
        report = diagnose(net, Placement(monitored=frozenset({"m", "p"})))
        assert report.overall is Verdict.CALCULABLE
        (diag,) = report.components
        assert diag.component.vertices == frozenset({"z"})
        assert diag.verdict is Verdict.CALCULABLE
        assert diag.reason == (
            "isolated vertex; its balancing flow is forced to zero"
        )

    def test_detached_cycle_has_a_free_level(self):
        net = RoadNetwork.from_edges(
            ["m", "p", "w", "x", "y"],
            [("m", "p"), ("w", "x"), ("x", "y"), ("y", "w")],
        )
        report = diagnose(net, Placement(monitored=frozenset({"m", "p"})))
        assert report.overall is Verdict.NOT_CALCULABLE
        (diag,) = report.components
        assert diag.component.adjacent == frozenset()
        assert diag.verdict is Verdict.NOT_CALCULABLE
        assert diag.reason == (
            "detached from every monitored vertex; the overall flow level is free"
        )

    def test_everything_monitored_is_calculable(self, gateway_net):
        report = diagnose(
            gateway_net,
            Placement(monitored=frozenset(gateway_net.vertices)),
        )
        assert report.overall is Verdict.CALCULABLE
        assert report.components == ()


class TestExplainComponent:
    def test_gateway_obstruction_certificate(self, gateway_net, gateway_placement):
        diag, obstruction = explain_component(gateway_net, gateway_placement, 0)
        assert isinstance(diag, ComponentDiagnosis)
        assert diag.verdict is Verdict.NOT_CALCULABLE
        assert obstruction is not None
        assert obstruction.cut == GATEWAY_CUT
        assert set(obstruction.zero_rows) == OBSTRUCTION_ZERO_ROWS
        assert obstruction.rank_bound == OBSTRUCTION_RANK_BOUND
        assert obstruction.obstructed

    def test_pentagon_needs_no_certificate(self, pentagon_net, pentagon_placement):
        diag, obstruction = explain_component(pentagon_net, pentagon_placement, 0)
        assert diag.verdict is Verdict.CALCULABLE
        assert obstruction is None

    def test_unknown_index_is_rejected(self, gateway_net, gateway_placement):
        with pytest.raises(InvalidCutError, match="no unmonitored component with index 5"):
            explain_component(gateway_net, gateway_placement, 5)


class TestCityPlacements:
    def test_blocked_monitors_fail_on_one_component(self):
        net = city_demo()
        report = diagnose(net, city_blocked_placement())
        assert report.overall is Verdict.NOT_CALCULABLE
        assert report.monitored == tuple(sorted(CITY_BLOCKED_MONITORS))
        assert len(report.components) == 2
        by_membership = {
            frozenset(d.component.vertices): d for d in report.components
        }
        left = by_membership[frozenset(CITY_BLOCKED_LEFT)]
        right = by_membership[frozenset(CITY_BLOCKED_RIGHT)]
        # the left half is recoverable, but only the exact rank shows it
        assert left.verdict is Verdict.CALCULABLE
        assert not left.tree
        assert left.rank is not None and left.rank.full_column_rank
        # the right half funnels two centroids through one gateway
        assert right.verdict is Verdict.NOT_CALCULABLE
        assert not right.disjoint_paths_ok
        assert right.blocked_centroids == (CITY_X,)

    def test_fixed_monitors_certify_structurally(self):
        net = city_demo()
        report = diagnose(net, city_fixed_placement())
        assert report.overall is Verdict.CALCULABLE
        assert report.monitored == tuple(sorted(CITY_FIXED_MONITORS))
        assert not report.rank_fallback_used
        assert all(
            d.component.trivial or d.tree for d in report.components
        )

    def test_variants_differ_by_two_moves(self):
        before = frozenset(CITY_BLOCKED_MONITORS)
        after = frozenset(CITY_FIXED_MONITORS)
        assert len(before - after) == 2
        assert len(after - before) == 2
