"""Road networks with turning ratios, plus flow states over them.

A network is a directed graph in which every arc has a reverse twin (the
two-way property) and every vertex splits its outgoing traffic according
to fixed rational turning ratios that sum to one. Centroids are the only
vertices allowed to create or absorb traffic; the amount they create or
absorb is their balancing flow.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import ValidationError, ZeroReferenceError
from .rational import ZERO

Arc = tuple[str, str]


def _uniform_ratios(vertices: Iterable[str], arcs: Iterable[Arc]) -> dict[Arc, Fraction]:
    out_count: dict[str, int] = {}
    for tail, _ in arcs:
        out_count[tail] = out_count.get(tail, 0) + 1
    return {(t, h): Fraction(1, out_count[t]) for t, h in arcs}


@dataclass(frozen=True)
class RoadNetwork:
    """Immutable two-way road network.

    ``vertices`` fixes a deterministic ordering used everywhere a stable
    iteration order matters (matrix rows, component numbering, pivoting).
    """

    vertices: tuple[str, ...]
    arcs: tuple[Arc, ...]
    turning_ratio: Mapping[Arc, Fraction]
    centroids: frozenset[str]
    _out: dict[str, tuple[Arc, ...]] = field(init=False, repr=False, compare=False)
    _in: dict[str, tuple[Arc, ...]] = field(init=False, repr=False, compare=False)
    _arc_set: frozenset[Arc] = field(init=False, repr=False, compare=False)
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        out: dict[str, list[Arc]] = {v: [] for v in self.vertices}
        into: dict[str, list[Arc]] = {v: [] for v in self.vertices}
        for arc in self.arcs:
            tail, head = arc
            if tail in out:
                out[tail].append(arc)
            if head in into:
                into[head].append(arc)
        object.__setattr__(self, "_out", {v: tuple(a) for v, a in out.items()})
        object.__setattr__(self, "_in", {v: tuple(a) for v, a in into.items()})
        object.__setattr__(self, "_arc_set", frozenset(self.arcs))
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.vertices)})

    @classmethod
    def from_edges(
        cls,
        vertices: Iterable[str],
        edges: Iterable[tuple[str, str]],
        ratios: Mapping[Arc, Fraction] | str = "uniform",
        centroids: Iterable[str] = (),
    ) -> "RoadNetwork":
        """Build a network from undirected edges, expanding each into both arcs."""
        verts = tuple(vertices)
        arcs: list[Arc] = []
        for u, v in edges:
            arcs.append((u, v))
            arcs.append((v, u))
        arc_tuple = tuple(arcs)
        if ratios == "uniform":
            ratio_map: Mapping[Arc, Fraction] = _uniform_ratios(verts, arc_tuple)
        elif isinstance(ratios, str):
            raise ValueError(f"unknown ratio rule {ratios!r}")
        else:
            ratio_map = dict(ratios)
        return cls(verts, arc_tuple, ratio_map, frozenset(centroids))

    def index(self, vertex: str) -> int:
        return self._index[vertex]

    def has_vertex(self, vertex: str) -> bool:
        return vertex in self._index

    def has_arc(self, arc: Arc) -> bool:
        return arc in self._arc_set

    def out_arcs(self, vertex: str) -> tuple[Arc, ...]:
        return self._out[vertex]

    def in_arcs(self, vertex: str) -> tuple[Arc, ...]:
        return self._in[vertex]

    def neighbors(self, vertex: str) -> tuple[str, ...]:
        return tuple(head for _, head in self._out[vertex])

    def ratio(self, arc: Arc) -> Fraction:
        return self.turning_ratio[arc]

    def sorted_vertices(self, items: Iterable[str]) -> list[str]:
        """Sort vertex labels by their position in the network ordering."""
        return sorted(items, key=self._index.__getitem__)


@dataclass(frozen=True)
class FlowState:
    """A complete assignment of arc flows and balancing flows.

    Arc flows are expected to be nonnegative in physically meaningful
    states; solvers that produce negative values report a warning rather
    than rejecting the state, since the algebra is indifferent to sign.
    Balancing is zero for every vertex absent from the map.
    """

    arc_flow: Mapping[Arc, Fraction]
    balancing: Mapping[str, Fraction]

    def flow(self, arc: Arc) -> Fraction:
        return self.arc_flow[arc]

    def balance(self, vertex: str) -> Fraction:
        return self.balancing.get(vertex, ZERO)


def validate_network(net: RoadNetwork) -> list[str]:
    """Return every invariant violation, empty when the network is sound.

    Checked invariants: unique known vertices and arcs, no self-loops, the
    two-way property, a ratio for exactly each arc, per-vertex ratio sums
    of one, ratios within [0, 1], and no vertex that receives traffic
    without a way to send any onward. Fully isolated vertices are allowed.
    """
    violations: list[str] = []
    seen_vertices = set()
    for v in net.vertices:
        if v in seen_vertices:
            violations.append(f"duplicate vertex {v!r}")
        seen_vertices.add(v)
    seen_arcs = set()
    for arc in net.arcs:
        tail, head = arc
        if tail not in seen_vertices or head not in seen_vertices:
            violations.append(f"arc {tail}->{head} references unknown vertex")
            continue
        if tail == head:
            violations.append(f"self-loop at {tail}")
        if arc in seen_arcs:
            violations.append(f"duplicate arc {tail}->{head}")
        seen_arcs.add(arc)
    for tail, head in seen_arcs:
        if (head, tail) not in seen_arcs:
            violations.append(f"arc {tail}->{head} has no reverse arc")
    ratio_keys = set(net.turning_ratio)
    for arc in ratio_keys - seen_arcs:
        violations.append(f"ratio given for unknown arc {arc[0]}->{arc[1]}")
    for arc in seen_arcs - ratio_keys:
        violations.append(f"missing turning ratio for arc {arc[0]}->{arc[1]}")
    for arc, value in net.turning_ratio.items():
        if arc in seen_arcs and not (0 <= value <= 1):
            violations.append(f"turning ratio of {arc[0]}->{arc[1]} outside [0, 1]")
    for v in net.vertices:
        out = net.out_arcs(v)
        if not out:
            if net.in_arcs(v):
                violations.append(f"vertex {v} receives traffic but has no outgoing arc")
            continue
        total = sum((net.turning_ratio.get(a, ZERO) for a in out), start=ZERO)
        if total != 1:
            violations.append(f"turning ratios at {v} sum to {total}, expected 1")
    for c in net.centroids:
        if c not in seen_vertices:
            violations.append(f"centroid {c!r} is not a vertex")
    return violations


def require_valid(net: RoadNetwork) -> None:
    violations = validate_network(net)
    if violations:
        raise ValidationError(violations)


def turning_factor(net: RoadNetwork, arc: Arc, reference: Arc) -> Fraction:
    """Ratio of ``arc``'s turning ratio to ``reference``'s, both leaving one vertex.

    This is the constant tying the two outgoing flows together: the flow on
    ``arc`` equals the factor times the flow on ``reference``.
    """
    if arc[0] != reference[0]:
        raise ValueError("arcs must share their tail vertex")
    if not net.has_arc(arc) or not net.has_arc(reference):
        raise ValueError("unknown arc")
    ref_ratio = net.ratio(reference)
    if ref_ratio == 0:
        raise ZeroReferenceError(
            f"reference arc {reference[0]}->{reference[1]} has zero turning ratio"
        )
    return net.ratio(arc) / ref_ratio


def check_flow_state(net: RoadNetwork, state: FlowState) -> bool:
    """Exact feasibility check for a complete flow state.

    True iff every arc has a flow, conservation holds exactly at every
    vertex (inflow minus outflow plus balancing equals zero), balancing is
    zero away from centroids, and at every vertex the outgoing flows split
    the vertex's total outflow exactly in proportion to the turning ratios.
    At a vertex that neither creates nor absorbs traffic that last check is
    the familiar statement that each outgoing flow is its ratio times the
    incoming flow.
    """
    for arc in net.arcs:
        if arc not in state.arc_flow:
            return False
    for v, value in state.balancing.items():
        if value != 0 and v not in net.centroids:
            return False
    for v in net.vertices:
        inflow = sum((state.arc_flow[a] for a in net.in_arcs(v)), start=ZERO)
        out_arcs = net.out_arcs(v)
        outflow = sum((state.arc_flow[a] for a in out_arcs), start=ZERO)
        if inflow - outflow + state.balance(v) != 0:
            return False
        for arc in out_arcs:
            if state.arc_flow[arc] != net.ratio(arc) * outflow:
                return False
    return True
