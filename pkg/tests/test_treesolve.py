"""Constructive tree reconstruction: centroid/border pairing, the
path-propagation solver, hanging-subtree solving, and whole-state assembly."""

from fractions import Fraction

import pytest

from flowscope.errors import (
    CentroidPresentError,
    ConservationError,
    PairingConditionError,
    UnderdeterminedBoundaryError,
    ValidationError,
)
from flowscope.monitoring import Placement, unmonitored_components
from flowscope.network import RoadNetwork, check_flow_state
from flowscope.treesolve import (
    CentroidPairing,
    pair_centroids,
    solve_by_trees,
    solve_centroid_free_subtree,
    solve_tree_component,
)

from oracles import PENTAGON_BALANCING, PENTAGON_FLOWS

F = Fraction


def single_component(net, placement):
    components = unmonitored_components(net, placement)
    assert len(components) == 1
    return components[0]


class TestPairCentroids:
    def test_pentagon_pairs_every_centroid(self, pentagon_net, pentagon_placement):
        comp = single_component(pentagon_net, pentagon_placement)
        pairing = pair_centroids(comp)
        by_centroid = {p.centroid: p for p in pairing.pairs}
        assert set(by_centroid) == {"b", "d", "f"}
        # border centroids pair with themselves through a length-one path
        assert by_centroid["d"].border == "d"
        assert by_centroid["d"].path == ("d",)
        assert by_centroid["f"].border == "f"
        # the interior centroid walks out through the remaining border vertex
        assert by_centroid["b"].border == "c"
        assert by_centroid["b"].path == ("c", "a", "b")
        assert pairing.unpaired_border == ()

    def test_leftover_border_is_reported(self):
        # p and q both border m; the lone centroid r needs only one of
        # them, leaving the other off every pairing path
        net = RoadNetwork.from_edges(
            ["m", "p", "q", "r"],
            [("m", "p"), ("m", "q"), ("p", "r"), ("q", "r")],
            centroids=("r",),
        )
        comp = single_component(net, Placement(monitored=frozenset({"m"})))
        pairing = pair_centroids(comp)
        assert [p.centroid for p in pairing.pairs] == ["r"]
        used = pairing.pairs[0].border
        assert {used, *pairing.unpaired_border} == {"p", "q"}
        assert len(pairing.unpaired_border) == 1
        assert pairing.unpaired_border[0] != used

    def test_bottleneck_prevents_pairing(self, gateway_net, gateway_placement):
        comp = single_component(gateway_net, gateway_placement)
        with pytest.raises(
            PairingConditionError,
            match="only 1 disjoint route to the border for 2 centroids",
        ):
            pair_centroids(comp)


class TestSolveTreeComponent:
    def test_pentagon_component(self, pentagon_net, pentagon_placement):
        comp = single_component(pentagon_net, pentagon_placement)
        solution = solve_tree_component(pentagon_net, comp)
        expected_arcs = {
            arc: value for arc, value in PENTAGON_FLOWS.items() if arc in comp.arcs
        }
        assert dict(solution.arc_flow) == expected_arcs
        assert dict(solution.balancing) == {
            "b": PENTAGON_BALANCING["b"],
            "d": PENTAGON_BALANCING["d"],
            "f": PENTAGON_BALANCING["f"],
        }
        assert solution.warnings == ()

    def test_negative_flow_is_flagged(self):
        net = RoadNetwork.from_edges(
            ["m", "a", "b"], [("m", "a"), ("a", "b")], centroids=("b",)
        )
        placement = Placement(
            monitored=frozenset({"m"}),
            observed_flow={("a", "m"): F(4), ("m", "a"): F(10)},
        )
        comp = single_component(net, placement)
        solution = solve_tree_component(net, comp)
        assert dict(solution.arc_flow) == {("a", "b"): F(4), ("b", "a"): F(-2)}
        assert dict(solution.balancing) == {"b": F(-6)}
        assert solution.warnings == ("negative flow -2 on b->a",)

    def test_cyclic_component_is_rejected(self):
        from flowscope.scenarios import crossed_pairs_demo, crossed_pairs_placement

        comp = single_component(crossed_pairs_demo(), crossed_pairs_placement())
        with pytest.raises(PairingConditionError, match="not tree-shaped"):
            solve_tree_component(crossed_pairs_demo(), comp)

    def test_undeducible_border_is_rejected(self):
        net = RoadNetwork.from_edges(
            ["m", "w", "x"],
            [("m", "w"), ("w", "x")],
            ratios={
                ("m", "w"): F(1),
                ("w", "m"): F(0),
                ("w", "x"): F(1),
                ("x", "w"): F(1),
            },
        )
        placement = Placement(
            monitored=frozenset({"m"}),
            observed_flow={("m", "w"): F(3), ("w", "m"): F(0)},
        )
        comp = single_component(net, placement)
        with pytest.raises(
            UnderdeterminedBoundaryError, match="border outflow not deducible at: w"
        ):
            solve_tree_component(net, comp)

    def test_missing_observations_are_rejected(self, pentagon_net):
        topology_only = Placement(monitored=frozenset({"e"}))
        comp = single_component(pentagon_net, topology_only)
        with pytest.raises(ValidationError) as excinfo:
            solve_tree_component(pentagon_net, comp)
        assert any("border vertex" in msg for msg in excinfo.value.violations)

    def test_partial_pairing_is_rejected(self, pentagon_net, pentagon_placement):
        comp = single_component(pentagon_net, pentagon_placement)
        empty = CentroidPairing(pairs=(), unpaired_border=())
        with pytest.raises(PairingConditionError, match="does not cover every centroid"):
            solve_tree_component(pentagon_net, comp, pairing=empty)


class TestCentroidFreeSubtree:
    def test_path_carries_the_inflow_through(self):
        net = RoadNetwork.from_edges(["m", "a", "b"], [("m", "a"), ("a", "b")])
        flows = solve_centroid_free_subtree(net, "m", "a", F(4))
        assert flows == {
            ("m", "a"): F(4),
            ("a", "m"): F(4),
            ("a", "b"): F(4),
            ("b", "a"): F(4),
        }

    def test_star_with_uneven_ratios(self):
        net = RoadNetwork.from_edges(
            ["m", "r", "s", "t"],
            [("m", "r"), ("r", "s"), ("r", "t")],
            ratios={
                ("m", "r"): F(1),
                ("r", "m"): F(1, 2),
                ("r", "s"): F(1, 4),
                ("r", "t"): F(1, 4),
                ("s", "r"): F(1),
                ("t", "r"): F(1),
            },
        )
        flows = solve_centroid_free_subtree(net, "m", "r", F(6))
        assert flows == {
            ("m", "r"): F(6),
            ("r", "m"): F(6),
            ("r", "s"): F(3),
            ("s", "r"): F(3),
            ("r", "t"): F(3),
            ("t", "r"): F(3),
        }

    def test_every_edge_is_balanced(self):
        # with no centroid inside, each edge must carry equal and opposite
        # flow: every subtree below an edge conserves flow on its own
        net = RoadNetwork.from_edges(
            ["m", "a", "b", "c", "d"],
            [("m", "a"), ("a", "b"), ("a", "c"), ("c", "d")],
            ratios={
                ("m", "a"): F(1),
                ("a", "m"): F(1, 2), ("a", "b"): F(1, 6), ("a", "c"): F(1, 3),
                ("b", "a"): F(1),
                ("c", "a"): F(3, 5), ("c", "d"): F(2, 5),
                ("d", "c"): F(1),
            },
        )
        flows = solve_centroid_free_subtree(net, "m", "a", F(10))
        for (tail, head), value in flows.items():
            assert flows[(head, tail)] == value

    def test_centroid_inside_is_rejected(self):
        net = RoadNetwork.from_edges(
            ["m", "a", "b"], [("m", "a"), ("a", "b")], centroids=("b",)
        )
        with pytest.raises(CentroidPresentError, match="subtree contains centroids: b"):
            solve_centroid_free_subtree(net, "m", "a", F(4))

    def test_cycle_inside_is_rejected(self):
        net = RoadNetwork.from_edges(
            ["m", "a", "b", "c"],
            [("m", "a"), ("a", "b"), ("b", "c"), ("c", "a")],
        )
        with pytest.raises(ValidationError, match="subtree contains a cycle"):
            solve_centroid_free_subtree(net, "m", "a", F(4))

    def test_double_attachment_is_rejected(self):
        net = RoadNetwork.from_edges(
            ["m", "a", "b"], [("m", "a"), ("m", "b"), ("a", "b")]
        )
        with pytest.raises(ValidationError, match="touches the subtree more than once"):
            solve_centroid_free_subtree(net, "m", "a", F(4))

    def test_missing_attachment_arc_is_rejected(self):
        net = RoadNetwork.from_edges(["m", "a", "b"], [("m", "a"), ("a", "b")])
        with pytest.raises(ValidationError, match="no arc b->m"):
            solve_centroid_free_subtree(net, "b", "m", F(4))


class TestSolveByTrees:
    def test_pentagon_reconstruction(self, pentagon_net, pentagon_placement):
        state = solve_by_trees(pentagon_net, pentagon_placement)
        assert dict(state.arc_flow) == PENTAGON_FLOWS
        assert dict(state.balancing) == PENTAGON_BALANCING
        assert check_flow_state(pentagon_net, state)

    def test_requires_observations(self, pentagon_net):
        with pytest.raises(ValidationError, match="carries no observations"):
            solve_by_trees(pentagon_net, Placement(monitored=frozenset({"e"})))

    def test_bottlenecked_placement_cannot_be_solved(
        self, gateway_net, gateway_placement
    ):
        with pytest.raises(PairingConditionError):
            solve_by_trees(gateway_net, gateway_placement)

    def test_inconsistent_balancing_is_caught(self, pentagon_net, pentagon_placement):
        corrupted = Placement(
            monitored=pentagon_placement.monitored,
            observed_flow=pentagon_placement.observed_flow,
            observed_balancing={"e": F(-4)},
        )
        with pytest.raises(ConservationError, match="does not satisfy conservation"):
            solve_by_trees(pentagon_net, corrupted)

    def test_isolated_centroid_gets_zero(self):
        net = RoadNetwork.from_edges(
            ["m", "p", "z"], [("m", "p")], centroids=("z",)
        )
        placement = Placement(
            monitored=frozenset({"m", "p"}),
            observed_flow={("m", "p"): F(4), ("p", "m"): F(4)},
        )
        state = solve_by_trees(net, placement)
        assert state.balancing["z"] == 0
        assert check_flow_state(net, state)
