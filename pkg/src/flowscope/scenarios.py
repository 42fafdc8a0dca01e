"""Scenario generation: networks, ground-truth flows and observations.

Three generator families (grids, random trees, random graphs with
chords), an exact simulator that fabricates a consistent flow state for
chosen balancing values, and the fixed demonstration networks used by
documentation, tests and the placement UI. Everything is deterministic
for a given seed and exact over the rationals.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import (
    InconsistentSystemError,
    NoConsistentFlowError,
    ScenarioError,
    ValidationError,
)
from .monitoring import Placement
from .network import Arc, FlowState, RoadNetwork, check_flow_state
from .rational import ZERO, general_solution

Edge = tuple[str, str]


@dataclass(frozen=True)
class ScenarioSpec:
    """Deterministic recipe for a generated network plus monitor set.

    ``kind`` is one of ``grid`` (width x height lattice), ``random_tree``
    (size vertices) or ``random_graph`` (a random tree plus
    ``extra_edges`` chords). Centroid and monitor rules either sample
    pseudo-randomly from the seed, follow a fixed tiling (grids only) or
    take explicit lists.
    """

    kind: str
    width: int = 0
    height: int = 0
    size: int = 0
    extra_edges: int = 0
    centroid_rule: str = "random"  # none | random | tile_centers | listed
    centroid_count: int | None = None
    centroids: tuple[str, ...] = ()
    monitor_rule: str = "random"  # none | random | tile_pair | listed
    monitor_count: int | None = None
    monitors: tuple[str, ...] = ()
    ratio_rule: str = "uniform"  # uniform | random
    seed: int = 0


def grid_label(row: int, col: int) -> str:
    return f"n{row}x{col}"


def parse_grid_label(label: str) -> tuple[int, int] | None:
    if not label.startswith("n") or "x" not in label:
        return None
    row_text, _, col_text = label[1:].partition("x")
    if row_text.isdigit() and col_text.isdigit():
        return int(row_text), int(col_text)
    return None


def _grid_edges(width: int, height: int) -> tuple[list[str], list[Edge]]:
    if width < 1 or height < 1:
        raise ScenarioError("grid needs positive width and height")
    vertices = [grid_label(i, j) for i in range(height) for j in range(width)]
    edges: list[Edge] = []
    for i in range(height):
        for j in range(width):
            if j + 1 < width:
                edges.append((grid_label(i, j), grid_label(i, j + 1)))
            if i + 1 < height:
                edges.append((grid_label(i, j), grid_label(i + 1, j)))
    return vertices, edges


def _tree_edges(size: int, rng: random.Random) -> tuple[list[str], list[Edge]]:
    if size < 1:
        raise ScenarioError("tree needs at least one vertex")
    vertices = [f"t{k}" for k in range(size)]
    edges = [(vertices[rng.randrange(k)], vertices[k]) for k in range(1, size)]
    return vertices, edges


def _random_ratios(
    vertices: Sequence[str], edges: Sequence[Edge], rng: random.Random
) -> dict[Arc, Fraction]:
    out: dict[str, list[str]] = {v: [] for v in vertices}
    for a, b in edges:
        out[a].append(b)
        out[b].append(a)
    ratios: dict[Arc, Fraction] = {}
    for v in vertices:
        heads = sorted(out[v])
        d = len(heads)
        if d == 0:
            continue
        if d == 1:
            ratios[(v, heads[0])] = Fraction(1)
            continue
        denom = rng.randint(max(d, 2), max(d, 2) + 8)
        cuts = sorted(rng.sample(range(1, denom), d - 1))
        bounds = [0] + cuts + [denom]
        for head, lo, hi in zip(heads, bounds, bounds[1:]):
            ratios[(v, head)] = Fraction(hi - lo, denom)
    return ratios


def generate(spec: ScenarioSpec) -> tuple[RoadNetwork, frozenset[str]]:
    """Build the network and monitor set a scenario request describes.

    The random stream is consumed in a fixed order (topology, ratios,
    centroids, monitors) so earlier choices stay stable when only the
    later fields change.
    """
    rng = random.Random(spec.seed)
    if spec.kind == "grid":
        vertices, edges = _grid_edges(spec.width, spec.height)
    elif spec.kind == "random_tree":
        vertices, edges = _tree_edges(spec.size, rng)
    elif spec.kind == "random_graph":
        vertices, edges = _tree_edges(spec.size, rng)
        present = {frozenset(e) for e in edges}
        candidates = [
            (a, b)
            for i, a in enumerate(vertices)
            for b in vertices[i + 1 :]
            if frozenset((a, b)) not in present
        ]
        count = min(spec.extra_edges, len(candidates))
        edges.extend(sorted(rng.sample(candidates, count)))
    else:
        raise ScenarioError(f"unknown scenario kind: {spec.kind}")

    ratios: dict[Arc, Fraction] | str
    if spec.ratio_rule == "uniform":
        ratios = "uniform"
    elif spec.ratio_rule == "random":
        ratios = _random_ratios(vertices, edges, rng)
    else:
        raise ScenarioError(f"unknown ratio rule: {spec.ratio_rule}")

    centroids = _pick_vertices(
        spec.centroid_rule, spec.centroids, spec.centroid_count,
        vertices, rng, default_share=5, tile=_tile_centers,
    )
    monitors = _pick_vertices(
        spec.monitor_rule, spec.monitors, spec.monitor_count,
        vertices, rng, default_share=6, tile=_tile_pair,
    )
    net = RoadNetwork.from_edges(vertices, edges, ratios=ratios, centroids=centroids)
    return net, frozenset(monitors)


def _tile_centers(label: str) -> bool:
    coords = parse_grid_label(label)
    return coords is not None and coords[0] % 3 == 2 and coords[1] % 3 == 2


def _tile_pair(label: str) -> bool:
    coords = parse_grid_label(label)
    if coords is None:
        return False
    i, j = coords
    return (i % 3 == 0 and j % 3 == 0) or (i % 3 == 1 and j % 3 == 1)


def _pick_vertices(
    rule: str,
    listed: tuple[str, ...],
    count: int | None,
    vertices: Sequence[str],
    rng: random.Random,
    default_share: int,
    tile,
) -> frozenset[str]:
    if rule == "none":
        return frozenset()
    if rule == "listed":
        missing = [v for v in listed if v not in set(vertices)]
        if missing:
            raise ScenarioError(f"listed vertices not in the network: {', '.join(missing)}")
        return frozenset(listed)
    if rule == "random":
        k = count if count is not None else max(1, len(vertices) // default_share)
        k = min(k, len(vertices))
        return frozenset(rng.sample(sorted(vertices), k))
    if rule in ("tile_centers", "tile_pair"):
        return frozenset(v for v in vertices if tile(v))
    raise ScenarioError(f"unknown selection rule: {rule}")


def random_balancing(
    net: RoadNetwork, seed: int = 0, magnitude: int = 9
) -> dict[str, Fraction]:
    """Draw balancing values for every centroid, cancelling per component.

    Within each connected piece of the network the balancing flows must
    sum to zero for any consistent flow to exist; the last centroid of
    each piece absorbs the remainder.
    """
    rng = random.Random(seed)
    component_of: dict[str, int] = {}
    for v in net.vertices:
        if v in component_of:
            continue
        index = len(component_of)
        stack = [v]
        component_of[v] = index
        while stack:
            x = stack.pop()
            for w in net.neighbors(x):
                if w not in component_of:
                    component_of[w] = component_of[x]
                    stack.append(w)
    groups: dict[int, list[str]] = {}
    for c in net.sorted_vertices(net.centroids):
        groups.setdefault(component_of[c], []).append(c)
    values: dict[str, Fraction] = {}
    for members in groups.values():
        total = ZERO
        for c in members[:-1]:
            value = Fraction(rng.randint(-magnitude, magnitude))
            values[c] = value
            total += value
        values[members[-1]] = -total
    return values


def simulate_ground_truth(
    net: RoadNetwork, balancing: Mapping[str, Fraction], seed: int = 0
) -> FlowState:
    """Fabricate an exact flow state realising the given balancing values.

    Substituting each arc flow by ratio times the tail's total outflow
    turns conservation into a linear system over the per-vertex totals.
    The system has at least one degree of freedom per connected piece
    (scaling the circulating flow); the free parameters are seeded
    pseudo-randomly and pushed up until every total is positive, so the
    resulting flows are nonnegative. Raises NoConsistentFlowError when
    the balancing values cannot cancel or positivity is unreachable.
    """
    stray = [v for v in balancing if v not in net.centroids]
    if stray:
        raise ValidationError(
            [f"balancing given for non-centroid vertex {v}" for v in sorted(stray)]
        )
    columns = [v for v in net.vertices if net.out_arcs(v)]
    col_index = {v: j for j, v in enumerate(columns)}
    matrix: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for u in net.vertices:
        row = [ZERO] * len(columns)
        for arc in net.in_arcs(u):
            row[col_index[arc[0]]] += net.ratio(arc)
        if u in col_index:
            row[col_index[u]] -= 1
        matrix.append(row)
        rhs.append(-balancing.get(u, ZERO))
    try:
        particular, basis = general_solution(matrix, rhs)
    except InconsistentSystemError as exc:
        raise NoConsistentFlowError(
            "balancing flows do not cancel within some connected piece"
        ) from exc

    rng = random.Random(seed)
    flipped = []
    for vector in basis:
        if all(x <= 0 for x in vector):
            vector = [-x for x in vector]
        flipped.append(vector)
    lam = [Fraction(rng.randint(3, 11)) for _ in flipped]

    def totals() -> list[Fraction]:
        result = list(particular)
        for factor, vector in zip(lam, flipped):
            for i, x in enumerate(vector):
                if x != 0:
                    result[i] += factor * x
        return result

    for _ in range(200):
        current = totals()
        bad = next((i for i, x in enumerate(current) if x <= 0), None)
        if bad is None:
            break
        helper = next(
            (k for k, vector in enumerate(flipped) if vector[bad] > 0), None
        )
        if helper is None:
            raise NoConsistentFlowError(
                f"no nonnegative flow reaches vertex {columns[bad]}"
            )
        deficit = 1 - current[bad]
        lam[helper] += deficit / flipped[helper][bad] + 1
    else:
        raise NoConsistentFlowError("could not scale the flow to positive totals")

    final = totals()
    arc_flow: dict[Arc, Fraction] = {}
    for v in columns:
        for arc in net.out_arcs(v):
            arc_flow[arc] = net.ratio(arc) * final[col_index[v]]
    state_balancing = {v: balancing.get(v, ZERO) for v in net.centroids}
    state = FlowState(arc_flow=arc_flow, balancing=state_balancing)
    if not check_flow_state(net, state):
        raise NoConsistentFlowError("simulated state failed its own verification")
    return state


def observe(net: RoadNetwork, state: FlowState, monitored: frozenset[str]) -> Placement:
    """Record exactly what monitors at the given vertices would see."""
    observed_flow: dict[Arc, Fraction] = {}
    for m in monitored:
        for arc in net.out_arcs(m):
            observed_flow[arc] = state.flow(arc)
        for arc in net.in_arcs(m):
            observed_flow[arc] = state.flow(arc)
    observed_balancing = {
        m: state.balance(m) for m in monitored if m in net.centroids
    }
    return Placement(
        monitored=frozenset(monitored),
        observed_flow=observed_flow,
        observed_balancing=observed_balancing,
    )


# ---------------------------------------------------------------------------
# Fixed demonstration networks.
# ---------------------------------------------------------------------------


def gateway_demo() -> RoadNetwork:
    """Two centroid cul-de-sacs behind a single gateway vertex.

    The head-count test passes (two centroids, two border vertices) yet
    both centroids must route through the same gateway, so their flows
    mix and the placement cannot be certified; this is the canonical
    counterexample separating the head-count from the disjoint-path test.
    """
    return RoadNetwork.from_edges(
        vertices=["a", "b", "c", "d", "e", "f"],
        edges=[("a", "b"), ("a", "d"), ("b", "c"), ("c", "d"), ("d", "e"), ("d", "f")],
        ratios="uniform",
        centroids=("e", "f"),
    )


def gateway_observations() -> Placement:
    four = Fraction(4)
    return Placement(
        monitored=frozenset({"a"}),
        observed_flow={
            ("a", "b"): four, ("b", "a"): four,
            ("a", "d"): four, ("d", "a"): four,
        },
        observed_balancing={},
    )


def pentagon_demo() -> RoadNetwork:
    """Six-vertex network whose single monitor leaves a solvable tree.

    All ratios are uniform except at the monitored vertex, which splits
    its outflow 1/4, 1/4, 1/2. The unmonitored remainder is a tree with
    three centroids, each with its own route to the border, so the whole
    flow state is recoverable from the one monitor.
    """
    return RoadNetwork.from_edges(
        vertices=["a", "b", "c", "d", "e", "f"],
        edges=[
            ("a", "b"), ("a", "c"), ("b", "d"), ("b", "f"),
            ("c", "e"), ("d", "e"), ("e", "f"),
        ],
        ratios={
            ("a", "b"): Fraction(1, 2), ("a", "c"): Fraction(1, 2),
            ("b", "a"): Fraction(1, 3), ("b", "d"): Fraction(1, 3), ("b", "f"): Fraction(1, 3),
            ("c", "a"): Fraction(1, 2), ("c", "e"): Fraction(1, 2),
            ("d", "b"): Fraction(1, 2), ("d", "e"): Fraction(1, 2),
            ("e", "c"): Fraction(1, 4), ("e", "d"): Fraction(1, 4), ("e", "f"): Fraction(1, 2),
            ("f", "b"): Fraction(1, 2), ("f", "e"): Fraction(1, 2),
        },
        centroids=("b", "d", "e", "f"),
    )


def pentagon_observations() -> Placement:
    return Placement(
        monitored=frozenset({"e"}),
        observed_flow={
            ("c", "e"): Fraction(3), ("d", "e"): Fraction(1), ("f", "e"): Fraction(5),
            ("e", "c"): Fraction(1), ("e", "d"): Fraction(1), ("e", "f"): Fraction(2),
        },
        observed_balancing={"e": Fraction(-5)},
    )


def crossed_pairs_demo() -> RoadNetwork:
    """Two centroids, two disjoint routes, yet still not recoverable.

    The disjoint-path test passes but the component has cycles, and its
    block of the flow system is rank-deficient: the two centroids can
    trade flow through the crossed connections without any monitor
    noticing. Only the exact rank fallback refutes this placement.
    """
    return RoadNetwork.from_edges(
        vertices=["c", "d", "e", "g", "h"],
        edges=[
            ("e", "c"), ("e", "d"),
            ("g", "c"), ("g", "d"),
            ("h", "c"), ("h", "d"),
        ],
        ratios="uniform",
        centroids=("g", "h"),
    )


def crossed_pairs_placement() -> Placement:
    return Placement(monitored=frozenset({"e"}))


def ring_demo() -> RoadNetwork:
    """A four-cycle with one centroid, plus a monitored stub.

    The component keeps its cycle, so the structural tree test cannot
    certify it; the exact rank fallback shows the block has full column
    rank and flows are recoverable anyway.
    """
    return RoadNetwork.from_edges(
        vertices=["m", "w", "x", "y", "z"],
        edges=[("m", "w"), ("w", "x"), ("x", "y"), ("y", "z"), ("z", "w")],
        ratios="uniform",
        centroids=("y",),
    )


def ring_placement() -> Placement:
    return Placement(monitored=frozenset({"m"}))


def tiled_grid_demo(width: int = 18, height: int = 18) -> tuple[RoadNetwork, frozenset[str]]:
    """Large lattice with the repeating monitor tiling.

    Monitors sit on two of the nine offsets of a 3x3 tiling; the
    unmonitored remainder splinters into small star-shaped trees around
    the tile centers, which carry the centroids. Every star keeps one
    disjoint route per centroid, so the placement is certified
    structurally at any grid size.
    """
    spec = ScenarioSpec(
        kind="grid", width=width, height=height,
        centroid_rule="tile_centers", monitor_rule="tile_pair",
        ratio_rule="uniform", seed=0,
    )
    return generate(spec)


# Five-by-five city used by the placement UI: seven centroids, four
# monitors. The two variants differ by exactly two monitor positions;
# the blocked variant funnels one centroid's traffic through a shared
# gateway while the fixed variant gives every centroid its own route and
# leaves only tree-shaped components.
CITY_WIDTH = 5
CITY_HEIGHT = 5
CITY_CENTROIDS: tuple[str, ...] = (
    "n0x0", "n0x1", "n0x2", "n0x3", "n0x4", "n2x0", "n2x4",
)
CITY_BLOCKED_MONITORS: tuple[str, ...] = ("n1x1", "n1x2", "n3x2", "n4x3")
CITY_FIXED_MONITORS: tuple[str, ...] = ("n1x1", "n1x3", "n3x2", "n4x2")


def city_demo() -> RoadNetwork:
    spec = ScenarioSpec(
        kind="grid", width=CITY_WIDTH, height=CITY_HEIGHT,
        centroid_rule="listed", centroids=CITY_CENTROIDS,
        monitor_rule="none", ratio_rule="uniform", seed=0,
    )
    net, _ = generate(spec)
    return net


def city_blocked_placement() -> Placement:
    return Placement(monitored=frozenset(CITY_BLOCKED_MONITORS))


def city_fixed_placement() -> Placement:
    return Placement(monitored=frozenset(CITY_FIXED_MONITORS))
