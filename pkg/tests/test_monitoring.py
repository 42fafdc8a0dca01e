from fractions import Fraction

import pytest

from flowscope.errors import ValidationError
from flowscope.monitoring import (
    Placement,
    adjacent_set,
    combined_cutset,
    deduced_outflow_totals,
    deducible_boundary,
    require_valid_placement,
    unmonitored_components,
    validate_placement,
)
from flowscope.network import RoadNetwork

from oracles import (
    GATEWAY_BORDER,
    GATEWAY_CENTROIDS,
    GATEWAY_COMPONENT_VERTICES,
    GATEWAY_CUTSET,
)

F = Fraction


class TestValidatePlacement:
    def test_clean(self, gateway_net, gateway_placement):
        assert validate_placement(gateway_net, gateway_placement) == []

    def test_unknown_vertex(self, gateway_net):
        placement = Placement(monitored=frozenset({"zz"}))
        violations = validate_placement(gateway_net, placement)
        assert violations and "zz" in violations[0]

    def test_monitored_only_placement_is_fine(self, gateway_net):
        assert validate_placement(gateway_net, Placement(frozenset({"a"}))) == []

    def test_missing_observation_reported(self, gateway_net, gateway_placement):
        flows = dict(gateway_placement.observed_flow)
        del flows[("a", "b")]
        placement = Placement(frozenset({"a"}), observed_flow=flows)
        assert any("missing observation" in v and "a->b" in v
                   for v in validate_placement(gateway_net, placement))

    def test_stray_observation_reported(self, gateway_net, gateway_placement):
        flows = dict(gateway_placement.observed_flow)
        flows[("e", "d")] = F(1)
        placement = Placement(frozenset({"a"}), observed_flow=flows)
        assert any("not incident" in v
                   for v in validate_placement(gateway_net, placement))

    def test_balancing_requires_flows(self, gateway_net):
        placement = Placement(frozenset({"a"}), observed_balancing={"a": F(1)})
        assert any("without observed flows" in v
                   for v in validate_placement(gateway_net, placement))

    def test_monitored_centroid_needs_balancing(self, pentagon_net, pentagon_placement):
        placement = Placement(
            pentagon_placement.monitored,
            observed_flow=pentagon_placement.observed_flow,
            observed_balancing={},
        )
        assert any("missing balancing" in v
                   for v in validate_placement(pentagon_net, placement))

    def test_require_valid_placement_raises(self, gateway_net):
        with pytest.raises(ValidationError):
            require_valid_placement(gateway_net, Placement(frozenset({"zz"})))


class TestCutset:
    def test_gateway_cutset(self, gateway_net):
        assert combined_cutset(gateway_net, frozenset({"a"})) == GATEWAY_CUTSET

    def test_empty_monitor_set(self, gateway_net):
        assert combined_cutset(gateway_net, frozenset()) == frozenset()

    def test_border_to_border_arcs_are_included(self, gateway_net):
        # monitoring d puts a, c, e, f on the border; every arc among
        # {d, a, c, e, f} disappears, including c->d's partner arcs via a
        cutset = combined_cutset(gateway_net, frozenset({"d"}))
        expected = {
            (t, h)
            for (t, h) in gateway_net.arcs
            if {t, h} <= {"a", "c", "d", "e", "f"}
        }
        assert cutset == expected
        assert ("b", "c") not in cutset  # b is outside the closed neighborhood

    def test_adjacent_set(self, gateway_net):
        assert adjacent_set(gateway_net, frozenset({"a"})) == frozenset({"b", "d"})
        assert adjacent_set(gateway_net, frozenset()) == frozenset()


class TestComponents:
    def test_gateway_single_component(self, gateway_net, gateway_placement):
        comps = unmonitored_components(gateway_net, gateway_placement)
        assert len(comps) == 1
        comp = comps[0]
        assert comp.vertices == GATEWAY_COMPONENT_VERTICES
        assert comp.adjacent == GATEWAY_BORDER
        assert comp.unmonitored_centroids == GATEWAY_CENTROIDS
        assert comp.undeduced == frozenset()

    def test_gateway_boundary_inflows(self, gateway_net, gateway_placement):
        comp = unmonitored_components(gateway_net, gateway_placement)[0]
        # b and d each send observed flow 4 into a, so their total outflow
        # is 4 / ratio(->a); every surviving arc they feed carries an equal
        # share under uniform ratios.
        assert comp.boundary_inflows[("b", "c")] == F(4)
        assert comp.boundary_inflows[("d", "c")] == F(4)
        assert comp.boundary_inflows[("d", "e")] == F(4)
        assert comp.boundary_inflows[("d", "f")] == F(4)

    def test_gateway_known_net(self, gateway_net, gateway_placement):
        comp = unmonitored_components(gateway_net, gateway_placement)[0]
        # border b: observed 4 in from a, deduced outflow 4 toward a -> net 0
        assert comp.known_net["b"] == F(0)
        assert comp.known_net["d"] == F(0)

    def test_monitor_everything(self, gateway_net):
        assert unmonitored_components(
            gateway_net, Placement(frozenset(gateway_net.vertices))
        ) == []

    def test_no_monitors_single_component(self, gateway_net):
        comps = unmonitored_components(gateway_net, Placement(frozenset()))
        assert len(comps) == 1
        assert comps[0].vertices == frozenset(gateway_net.vertices)
        assert comps[0].adjacent == frozenset()

    def test_isolated_border_vertex_is_trivial(self):
        # star: m in the middle, spokes only — monitoring m strands each
        # leaf as a singleton border component with no arcs left
        net = RoadNetwork.from_edges(
            ["m", "p", "q"], [("m", "p"), ("m", "q")]
        )
        placement = Placement(frozenset({"m"}))
        comps = unmonitored_components(net, placement)
        assert [c.vertices for c in comps] == [frozenset({"p"}), frozenset({"q"})]
        assert all(c.trivial for c in comps)
        assert all(c.arcs == frozenset() for c in comps)

    def test_component_split_by_border_border_arcs(self):
        # path p - m - q: monitoring m leaves two singletons because the
        # only arcs among unmonitored vertices would touch the border pair
        net = RoadNetwork.from_edges(
            ["p", "m", "q", "r", "s"],
            [("p", "m"), ("m", "q"), ("p", "r"), ("q", "s")],
        )
        comps = unmonitored_components(net, Placement(frozenset({"m"})))
        assert sorted(sorted(c.vertices) for c in comps) == [
            ["p", "r"], ["q", "s"],
        ]

    def test_undeduced_border(self):
        # w's only arc into m carries ratio zero: its outflow total cannot
        # be recovered from observations
        net = RoadNetwork.from_edges(
            ["m", "w", "x"],
            [("m", "w"), ("w", "x")],
            ratios={
                ("m", "w"): F(1),
                ("w", "m"): F(0), ("w", "x"): F(1),
                ("x", "w"): F(1),
            },
        )
        comp = unmonitored_components(net, Placement(frozenset({"m"})))[0]
        assert comp.undeduced == frozenset({"w"})


class TestDeducedTotals:
    def test_totals_from_observations(self, gateway_net, gateway_placement):
        totals = deduced_outflow_totals(gateway_net, gateway_placement)
        assert totals == {"b": F(8), "d": F(16)}

    def test_deducible_boundary_flags(self, gateway_net):
        flags = deducible_boundary(gateway_net, frozenset({"a"}))
        assert flags == {"b": True, "d": True}
