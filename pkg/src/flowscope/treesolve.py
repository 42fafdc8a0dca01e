"""Constructive flow recovery on tree-shaped unmonitored components.

The solver mirrors the structural certificate: each centroid is paired
with its own border vertex through vertex-disjoint paths, and the
component is peeled along those paths. Hanging subtrees without a paired
centroid are resolved by a two-pass dynamic program that propagates
affine relations f[child->parent] = u * f[parent->child] + w up the tree
and concrete values back down. Walking a pairing path then determines one
unknown per step from conservation at the previous vertex, and the
centroid at the far end absorbs the final imbalance as its balancing
flow.

Everything is exact rational arithmetic; a failed balance check at the
end means the observations themselves are inconsistent.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import (
    CentroidPresentError,
    ConservationError,
    PairingConditionError,
    UnderdeterminedBoundaryError,
    ValidationError,
    ZeroReferenceError,
)
from .conditions import is_tree, min_vertex_cut
from .monitoring import (
    Placement,
    UnmonitoredComponent,
    deduced_outflow_totals,
    unmonitored_components,
)
from .network import Arc, FlowState, RoadNetwork, check_flow_state
from .rational import ZERO

Flows = dict[Arc, Fraction]


@dataclass(frozen=True)
class PairedPath:
    """A border vertex matched to a centroid along a concrete path."""

    border: str
    centroid: str
    path: tuple[str, ...]  # border first, centroid last


@dataclass(frozen=True)
class CentroidPairing:
    pairs: tuple[PairedPath, ...]
    unpaired_border: tuple[str, ...]


@dataclass(frozen=True)
class TreeSolution:
    arc_flow: Mapping[Arc, Fraction]
    balancing: Mapping[str, Fraction]
    warnings: tuple[str, ...]


def pair_centroids(component: UnmonitoredComponent) -> CentroidPairing:
    """Match each centroid to its own border vertex via disjoint paths.

    Uses the separator witness: when the smallest separator has the same
    size as the centroid set, the max-flow decomposition yields one
    vertex-disjoint border-to-centroid path per centroid. Path interiors
    contain neither border vertices nor centroids, which the walk relies
    on. Raises PairingConditionError when no full pairing exists.
    """
    witness = min_vertex_cut(component)
    n = len(component.unmonitored_centroids)
    if witness.size < n:
        routes = "route" if witness.size == 1 else "routes"
        heads = "centroid" if n == 1 else "centroids"
        raise PairingConditionError(
            f"only {witness.size} disjoint {routes} to the border for {n} {heads}"
        )
    pairs = []
    for path in witness.paths:
        centroid, border = path[0], path[-1]
        pairs.append(PairedPath(border=border, centroid=centroid, path=tuple(reversed(path))))
    pairs.sort(key=lambda p: p.centroid)
    used = {p.border for p in pairs}
    unpaired = tuple(sorted(component.adjacent - used))
    return CentroidPairing(pairs=tuple(pairs), unpaired_border=unpaired)


class _TreeSolver:
    """Shared machinery for whole components and bare subtrees."""

    def __init__(
        self,
        net: RoadNetwork,
        adjacency: Mapping[str, tuple[str, ...]],
        anchors: frozenset[str],
        centroids: frozenset[str],
        known_flows: Flows,
        known_net: Mapping[str, Fraction],
    ) -> None:
        self.net = net
        self.adj = adjacency
        self.anchors = anchors
        self.centroids = centroids
        self.flows: Flows = dict(known_flows)
        self.known_net = known_net
        self.balancing: dict[str, Fraction] = {}
        self._up: dict[tuple[str, str], tuple[Fraction, Fraction, Fraction, Fraction]] = {}

    def ratio(self, tail: str, head: str) -> Fraction:
        return self.net.ratio((tail, head))

    def _outside_inflow(self, v: str, piece: frozenset[str], parent: str) -> Fraction:
        total = ZERO
        for w in self.adj[v]:
            if w not in piece and w != parent:
                flow = self.flows.get((w, v))
                if flow is None:
                    raise ValidationError(
                        [f"flow entering the subtree on {w}->{v} is not known yet"]
                    )
                total += flow
        return total

    def _upward(
        self, v: str, parent: str, piece: frozenset[str]
    ) -> tuple[Fraction, Fraction]:
        """Affine relation f[v->parent] = u * f[parent->v] + w for the piece
        hanging below v. Anchors contribute their already-known flow."""
        if v in self.anchors:
            return ZERO, self.flows[(v, parent)]
        key = (v, parent)
        if key in self._up:
            u, w, _, _ = self._up[key]
            return u, w
        r_parent = self.ratio(v, parent)
        children = [n for n in self.adj[v] if n != parent and n in piece]
        w_sum = self._outside_inflow(v, piece, parent)
        u_sum = ZERO
        for c in children:
            u_c, w_c = self._upward(c, v, piece)
            w_sum += w_c
            u_sum += u_c * self.ratio(v, c)
        denom = 1 - u_sum
        if denom == 0:
            raise ZeroReferenceError(
                f"zero turning ratios at {v} leave no route toward the border"
            )
        u = r_parent / denom
        w = r_parent * w_sum / denom
        self._up[key] = (u, w, denom, w_sum)
        return u, w

    def _downward(self, v: str, parent: str, inflow: Fraction, piece: frozenset[str]) -> None:
        self.flows[(parent, v)] = inflow
        if v in self.anchors:
            for c in self.adj[v]:
                if c != parent and c in piece:
                    self._downward(c, v, self.flows[(v, c)], piece)
            return
        self._upward(v, parent, piece)  # ensure memo
        _, _, denom, w_sum = self._up[(v, parent)]
        total = (inflow + w_sum) / denom
        for n in self.adj[v]:
            self.flows[(v, n)] = self.ratio(v, n) * total
        for c in self.adj[v]:
            if c != parent and c in piece:
                self._downward(c, v, self.flows[(v, c)], piece)

    def _collect(self, piece: frozenset[str], start: str, blocked: str) -> frozenset[str]:
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in self.adj[v]:
                if w in piece and w != blocked and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return frozenset(seen)

    def _in_total(self, v: str, skip: str | None = None) -> Fraction:
        total = ZERO
        for n in self.adj[v]:
            if n == skip:
                continue
            flow = self.flows.get((n, v))
            if flow is None:
                raise ValidationError([f"flow on {n}->{v} is not known yet"])
            total += flow
        return total

    def _out_total(self, v: str) -> Fraction:
        return sum((self.flows[(v, n)] for n in self.adj[v]), start=ZERO)

    def solve_piece(self, piece: frozenset[str], pairs: list[PairedPath]) -> None:
        if not pairs:
            self._solve_plain(piece)
            return
        pair = pairs[0]
        remaining = list(pairs[1:])

        def take(branch: frozenset[str]) -> list[PairedPath]:
            inside = [p for p in remaining if p.path[0] in branch]
            for p in inside:
                remaining.remove(p)
            return inside

        spine = pair.path
        border = spine[0]
        if border not in self.anchors:
            raise PairingConditionError(f"pairing path does not start on the border: {border}")
        nxt = spine[1] if len(spine) > 1 else None
        for n in sorted(self.adj[border]):
            if n == nxt or n not in piece:
                continue
            branch = self._collect(piece, n, blocked=border)
            self.solve_piece(branch, take(branch))

        kappa = self.known_net[border]
        if len(spine) == 1:
            # Border vertex and centroid coincide: the balancing flow soaks
            # up whatever conservation leaves over.
            self.balancing[border] = self._out_total(border) - self._in_total(border) - kappa
        else:
            self.flows[(spine[1], border)] = (
                self._out_total(border) - kappa - self._in_total(border, skip=spine[1])
            )
            for i in range(1, len(spine)):
                v, prev = spine[i], spine[i - 1]
                r = self.ratio(v, prev)
                if r == 0:
                    raise ZeroReferenceError(
                        f"turning ratio on {v}->{prev} is zero; the path flow cannot be scaled"
                    )
                total = self.flows[(v, prev)] / r
                for n in self.adj[v]:
                    self.flows[(v, n)] = self.ratio(v, n) * total
                after = spine[i + 1] if i + 1 < len(spine) else None
                for n in sorted(self.adj[v]):
                    if n == prev or n == after or n not in piece:
                        continue
                    branch = self._collect(piece, n, blocked=v)
                    self.solve_piece(branch, take(branch))
                if after is not None:
                    self.flows[(after, v)] = total - self._in_total(v, skip=after)
                else:
                    self.balancing[v] = total - self._in_total(v)
        if remaining:
            raise PairingConditionError(
                "pairing paths are not vertex-disjoint within the component"
            )

    def _solve_plain(self, piece: frozenset[str]) -> None:
        """A piece with no centroid left: pin its level from an anchor or
        from any already-known flow crossing into it."""
        rooted_anchors = sorted(self.anchors & piece)
        if rooted_anchors:
            root = rooted_anchors[0]
            for c in self.adj[root]:
                if c in piece and c != root:
                    self._downward(c, root, self.flows[(root, c)], piece)
            return
        crossings = sorted(
            (w, t) for t in piece for w in self.adj[t] if w not in piece
        )
        for w, t in crossings:
            if (w, t) in self.flows:
                self._downward(t, w, self.flows[(w, t)], piece)
                return
        raise PairingConditionError(
            "piece has neither a border vertex nor a known entering flow"
        )


def _component_adjacency(component: UnmonitoredComponent) -> dict[str, tuple[str, ...]]:
    out: dict[str, set[str]] = {v: set() for v in component.vertices}
    for tail, head in component.arcs:
        out[tail].add(head)
    return {v: tuple(sorted(ns)) for v, ns in out.items()}


def solve_tree_component(
    net: RoadNetwork,
    component: UnmonitoredComponent,
    pairing: CentroidPairing | None = None,
) -> TreeSolution:
    """Recover every flow in a tree-shaped component from its boundary data.

    Requires the component's border flows to be fully deduced (no
    undeduced border vertices, boundary inflows and net border totals
    available) and a full centroid pairing to exist. The result is
    verified against conservation at every vertex before it is returned.
    """
    if not is_tree(component):
        raise PairingConditionError("component is not tree-shaped")
    if component.undeduced:
        names = ", ".join(sorted(component.undeduced))
        raise UnderdeterminedBoundaryError(
            f"border outflow not deducible at: {names}"
        )
    missing = [a for a in sorted(component.adjacent) if a not in component.known_net]
    if missing:
        raise ValidationError(
            [f"net observed flow at border vertex {a} is unavailable" for a in missing]
        )
    if pairing is None:
        pairing = pair_centroids(component)
    if len(pairing.pairs) != len(component.unmonitored_centroids):
        raise PairingConditionError("pairing does not cover every centroid")

    adjacency = _component_adjacency(component)
    solver = _TreeSolver(
        net,
        adjacency,
        anchors=frozenset(component.adjacent),
        centroids=frozenset(component.unmonitored_centroids),
        known_flows=dict(component.boundary_inflows),
        known_net=component.known_net,
    )
    piece = frozenset(component.vertices)
    if component.vertices and (component.arcs or component.adjacent):
        solver.solve_piece(piece, list(pairing.pairs))
    for v in sorted(component.unmonitored_centroids):
        solver.balancing.setdefault(v, ZERO)

    flows = solver.flows
    missing_arcs = [a for a in component.arcs if a not in flows]
    if missing_arcs:
        raise ConservationError(
            f"solver left {len(missing_arcs)} arcs unresolved; component is not fully attached"
        )
    warnings: list[str] = []
    for v in sorted(component.vertices):
        inflow = sum((flows[(n, v)] for n in adjacency[v]), start=ZERO)
        outflow = sum((flows[(v, n)] for n in adjacency[v]), start=ZERO)
        kappa = component.known_net.get(v, ZERO) if v in component.adjacent else ZERO
        balance = solver.balancing.get(v, ZERO)
        if inflow + kappa + balance - outflow != 0:
            raise ConservationError(
                f"conservation fails at {v}; the observations are inconsistent"
            )
    for arc, value in flows.items():
        if value < 0:
            warnings.append(f"negative flow {value} on {arc[0]}->{arc[1]}")
    return TreeSolution(
        arc_flow=dict(flows),
        balancing=dict(solver.balancing),
        warnings=tuple(warnings),
    )


def solve_centroid_free_subtree(
    net: RoadNetwork, attach: str, root: str, inflow: Fraction
) -> Flows:
    """Solve a hanging subtree from the single flow entering it.

    ``attach`` is the outside vertex feeding the subtree through the arc
    attach->root with the given flow. The subtree is everything reachable
    from ``root`` without passing through ``attach``; it must be a tree,
    touch ``attach`` only through ``root`` and contain no centroids.
    Returns every arc flow inside the subtree plus both flows on the
    attachment edge.
    """
    if not net.has_arc((attach, root)):
        raise ValidationError([f"no arc {attach}->{root} in the network"])
    members = {root}
    stack = [root]
    while stack:
        v = stack.pop()
        for w in net.neighbors(v):
            if w != attach and w not in members:
                members.add(w)
                stack.append(w)
    inside_centroids = sorted(members & net.centroids)
    if inside_centroids:
        raise CentroidPresentError(
            f"subtree contains centroids: {', '.join(inside_centroids)}"
        )
    edges = set()
    for v in members:
        for w in net.neighbors(v):
            if w in members:
                edges.add(frozenset((v, w)))
    if len(edges) != len(members) - 1:
        raise ValidationError(["subtree contains a cycle"])
    doors = [v for v in members if attach in net.neighbors(v)]
    if doors != [root]:
        raise ValidationError(["the attachment vertex touches the subtree more than once"])

    adjacency = {v: tuple(sorted(net.neighbors(v))) for v in members}
    adjacency[attach] = (root,)
    solver = _TreeSolver(
        net,
        adjacency,
        anchors=frozenset(),
        centroids=frozenset(),
        known_flows={(attach, root): inflow},
        known_net={},
    )
    solver._downward(root, attach, inflow, frozenset(members))
    return dict(solver.flows)


def solve_by_trees(net: RoadNetwork, placement: Placement) -> FlowState:
    """Reconstruct the complete flow state via per-component tree solving.

    Every nontrivial unmonitored component must be tree-shaped and fully
    anchored; this is the constructive counterpart of the algebraic
    solver and the two must agree wherever both apply.
    """
    if placement.observed_flow is None:
        raise ValidationError(["cannot solve: placement carries no observations"])
    arc_flow: dict[Arc, Fraction] = dict(placement.observed_flow)
    balancing: dict[str, Fraction] = dict(placement.observed_balancing or {})
    for comp in unmonitored_components(net, placement):
        if comp.trivial:
            continue
        if not comp.arcs and not comp.adjacent:
            for v in comp.unmonitored_centroids:
                balancing[v] = ZERO
            continue
        solution = solve_tree_component(net, comp)
        arc_flow.update(solution.arc_flow)
        balancing.update(solution.balancing)
    # Arcs removed between two border vertices belong to no component, so
    # no component solution covers them; their flows follow from the
    # deduced outflow totals of their tails.
    totals = deduced_outflow_totals(net, placement)
    for arc in net.arcs:
        if arc not in arc_flow:
            total = totals.get(arc[0])
            if total is not None:
                arc_flow[arc] = net.ratio(arc) * total
    for v in net.centroids:
        balancing.setdefault(v, ZERO)
    state = FlowState(arc_flow=arc_flow, balancing=balancing)
    if not check_flow_state(net, state):
        raise ConservationError(
            "tree reconstruction does not satisfy conservation; observations are inconsistent"
        )
    return state
