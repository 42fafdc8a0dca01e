"""Monitoring placements and the subgraph they leave unobserved.

Monitoring a vertex records the flow on every arc touching it plus its
balancing flow. The arcs running between monitored vertices and their
neighbors are thereby known, so the open question lives entirely in the
components of the graph that remains after deleting monitored vertices
and all arcs among the monitored set and its neighborhood.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import InconsistentObservationsError, ValidationError
from .network import Arc, RoadNetwork
from .rational import ZERO


@dataclass(frozen=True)
class Placement:
    """A monitored vertex set, optionally with the observations it yields.

    ``observed_flow`` covers exactly the arcs with tail or head in the
    monitored set; ``observed_balancing`` covers exactly the monitored
    centroids. Both may be None for topology-only questions (diagnosis
    does not need values, only the monitored set).
    """

    monitored: frozenset[str]
    observed_flow: Mapping[Arc, Fraction] | None = None
    observed_balancing: Mapping[str, Fraction] | None = None

    @property
    def has_observations(self) -> bool:
        return self.observed_flow is not None


@dataclass(frozen=True)
class UnmonitoredComponent:
    """One connected piece of the network left over after monitoring.

    ``adjacent`` lists the component's members that border the monitored
    set; they are the only places where knowledge enters the component.
    ``boundary_inflows`` holds the flows those border vertices push along
    component arcs, already deduced from observations via turning ratios.
    ``known_net`` gives, for each border vertex, its net known flow over
    non-component arcs: observed inflows from monitored vertices plus
    deduced inflows from other border vertices, minus every outflow on
    removed arcs. ``undeduced`` names border vertices whose outflow totals
    this component's reconstruction needs but cannot recover because every
    arc they send into the monitored set has a zero turning ratio; besides
    the component's own border members this includes border vertices of
    other components feeding it across removed arcs.
    """

    index: int
    vertices: frozenset[str]
    arcs: frozenset[Arc]
    adjacent: frozenset[str]
    unmonitored_centroids: frozenset[str]
    undeduced: frozenset[str]
    boundary_inflows: Mapping[Arc, Fraction] = field(default_factory=dict)
    known_net: Mapping[str, Fraction] = field(default_factory=dict)

    @property
    def trivial(self) -> bool:
        """True when the component carries no unknowns at all.

        That happens exactly for a lone border vertex that kept no arcs:
        its outgoing flows are deduced and it has no balancing unknown
        (a balancing unknown there is pinned directly by its own row).
        """
        return not self.arcs and not self.unmonitored_centroids and not self.undeduced


def validate_placement(net: RoadNetwork, placement: Placement) -> list[str]:
    """Return violations of the placement contract against ``net``."""
    violations: list[str] = []
    for v in placement.monitored:
        if not net.has_vertex(v):
            violations.append(f"monitored vertex {v!r} is not in the network")
    if placement.observed_flow is None:
        if placement.observed_balancing is not None:
            violations.append("observed balancing given without observed flows")
        return violations
    expected = {
        arc
        for arc in net.arcs
        if arc[0] in placement.monitored or arc[1] in placement.monitored
    }
    given = set(placement.observed_flow)
    for arc in given - expected:
        violations.append(f"observation on arc {arc[0]}->{arc[1]} not incident to a monitored vertex")
    for arc in expected - given:
        violations.append(f"missing observation on arc {arc[0]}->{arc[1]}")
    balancing = placement.observed_balancing or {}
    expected_centroids = placement.monitored & net.centroids
    for v in set(balancing) - expected_centroids:
        violations.append(f"balancing observation at {v} which is not a monitored centroid")
    for v in expected_centroids - set(balancing):
        violations.append(f"missing balancing observation at monitored centroid {v}")
    return violations


def require_valid_placement(net: RoadNetwork, placement: Placement) -> None:
    violations = validate_placement(net, placement)
    if violations:
        raise ValidationError(violations)


def adjacent_set(net: RoadNetwork, monitored: frozenset[str]) -> frozenset[str]:
    """Unmonitored vertices with at least one arc to or from the monitored set."""
    adjacent: set[str] = set()
    for m in monitored:
        for _, head in net.out_arcs(m):
            if head not in monitored:
                adjacent.add(head)
        for tail, _ in net.in_arcs(m):
            if tail not in monitored:
                adjacent.add(tail)
    return frozenset(adjacent)


def combined_cutset(net: RoadNetwork, monitored: frozenset[str]) -> frozenset[Arc]:
    """Arcs whose both endpoints lie in the monitored set or its neighborhood.

    Monitoring pins the flow on each of these arcs, either directly or by
    applying turning factors at a border vertex, so they are removed from
    the unknown part of the network.
    """
    covered = set(monitored) | set(adjacent_set(net, monitored))
    return frozenset(arc for arc in net.arcs if arc[0] in covered and arc[1] in covered)


def deduced_outflow_totals(
    net: RoadNetwork, placement: Placement
) -> dict[str, Fraction | None]:
    """Per border vertex, the total outflow deduced from observations.

    A border vertex sends observed flow into the monitored set; dividing
    one such observation by its turning ratio gives the vertex's total
    outgoing traffic, from which every outgoing flow follows. The total is
    None when every arc into the monitored set has a zero ratio. With no
    observations attached, vertices keep None but deducibility can still be
    read off from :func:`deducible_boundary`.
    """
    totals: dict[str, Fraction | None] = {}
    observed = placement.observed_flow
    for a in net.sorted_vertices(adjacent_set(net, placement.monitored)):
        total: Fraction | None = None
        if observed is not None:
            for arc in net.out_arcs(a):
                if arc[1] in placement.monitored and net.ratio(arc) != 0:
                    total = observed[arc] / net.ratio(arc)
                    break
            if total is not None:
                # Every observed arc into the monitored set must agree with
                # the deduced total, otherwise the observations are not a
                # snapshot of any single flow.
                for arc in net.out_arcs(a):
                    if arc[1] in placement.monitored and observed[arc] != net.ratio(arc) * total:
                        raise InconsistentObservationsError(
                            f"observations at {a} disagree across arcs into the monitored set"
                        )
        totals[a] = total
    return totals


def deducible_boundary(net: RoadNetwork, monitored: frozenset[str]) -> dict[str, bool]:
    """Which border vertices admit outflow deduction, by topology alone."""
    result: dict[str, bool] = {}
    for a in adjacent_set(net, monitored):
        result[a] = any(
            arc[1] in monitored and net.ratio(arc) != 0 for arc in net.out_arcs(a)
        )
    return result


def unmonitored_components(
    net: RoadNetwork, placement: Placement
) -> list[UnmonitoredComponent]:
    """Split the unmonitored subgraph into connected components.

    Connectivity ignores arc direction, which loses nothing because the
    network is two-way. Isolated border vertices become singleton
    components; their flows are fully deduced and they are flagged trivial
    so later stages can skip them. Component indices follow the network's
    vertex ordering of each component's smallest member.
    """
    monitored = placement.monitored
    cutset = combined_cutset(net, monitored)
    remaining = [v for v in net.vertices if v not in monitored]
    live_arcs = [arc for arc in net.arcs if arc not in cutset]

    adjacency: dict[str, list[str]] = {v: [] for v in remaining}
    for tail, head in live_arcs:
        adjacency[tail].append(head)

    component_of: dict[str, int] = {}
    groups: list[list[str]] = []
    for v in remaining:
        if v in component_of:
            continue
        stack = [v]
        component_of[v] = len(groups)
        members = []
        while stack:
            u = stack.pop()
            members.append(u)
            for w in adjacency[u]:
                if w not in component_of:
                    component_of[w] = len(groups)
                    stack.append(w)
        groups.append(net.sorted_vertices(members))

    adjacent = adjacent_set(net, monitored)
    totals = deduced_outflow_totals(net, placement)
    deducible = deducible_boundary(net, monitored)
    centroids = net.centroids

    components: list[UnmonitoredComponent] = []
    for idx, members in enumerate(groups):
        member_set = frozenset(members)
        comp_arcs = frozenset(a for a in live_arcs if a[0] in member_set)
        comp_adjacent = frozenset(member_set & adjacent)
        comp_centroids = frozenset(v for v in member_set if v in centroids and v not in monitored)
        undeduced = set()
        boundary: dict[Arc, Fraction] = {}
        known_net: dict[str, Fraction] = {}
        for a in net.sorted_vertices(comp_adjacent):
            if not deducible[a]:
                undeduced.add(a)
            # Conservation at this border also involves removed arcs from
            # other border vertices; if one of those cannot deduce its
            # outflow, this component inherits the obstruction.
            for arc in net.in_arcs(a):
                tail = arc[0]
                if arc not in comp_arcs and tail not in monitored and not deducible[tail]:
                    undeduced.add(tail)
        for a in net.sorted_vertices(comp_adjacent):
            if not deducible[a]:
                continue
            total = totals.get(a)
            if total is None:
                continue  # topology-only placement: values unavailable
            for arc in net.out_arcs(a):
                if arc in comp_arcs:
                    boundary[arc] = net.ratio(arc) * total
            net_known = ZERO
            complete = True
            for arc in net.in_arcs(a):
                if arc in comp_arcs:
                    continue
                tail = arc[0]
                if tail in monitored:
                    net_known += placement.observed_flow[arc]  # type: ignore[index]
                else:
                    tail_total = totals.get(tail)
                    if tail_total is None:
                        complete = False
                        break
                    net_known += net.ratio(arc) * tail_total
            if not complete:
                continue
            for arc in net.out_arcs(a):
                if arc not in comp_arcs:
                    net_known -= net.ratio(arc) * total
            known_net[a] = net_known
        components.append(
            UnmonitoredComponent(
                index=idx,
                vertices=member_set,
                arcs=comp_arcs,
                adjacent=comp_adjacent,
                unmonitored_centroids=comp_centroids,
                undeduced=frozenset(undeduced),
                boundary_inflows=boundary,
                known_net=known_net,
            )
        )
    return components
