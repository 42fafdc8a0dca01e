"""Decide, per unmonitored component, whether flows are recoverable.

Two structural tests come first: a cheap count (enough border vertices
for the centroids) and the sharper separator test (no vertex set smaller
than the centroid count disconnects the centroids from the border, i.e.
the centroids own vertex-disjoint escape paths). The separator test
refutes recoverability outright; together with tree shape and a fully
deducible border it certifies it. Everything else falls back to an exact
rank computation on the component's block of the flow system.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import InvalidCutError
from .flowsystem import (
    FlowSystem,
    RankReport,
    build_flow_system,
    component_block,
    rank_certify,
    rank_obstruction,
)
from .monitoring import (
    Placement,
    UnmonitoredComponent,
    require_valid_placement,
    unmonitored_components,
)
from .network import RoadNetwork, require_valid


class Verdict(Enum):
    CALCULABLE = "calculable"
    NOT_CALCULABLE = "not_calculable"
    UNDETERMINED = "undetermined"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


@dataclass(frozen=True)
class CutWitness:
    """A smallest border/centroid separator plus disjoint witness paths.

    ``paths`` hold vertex-disjoint routes, one per centroid that obtained
    one, each starting at its centroid and cut short at the first border
    vertex reached. When ``size`` matches the centroid count every
    centroid has a path; otherwise the centroids missing from the path
    starts are exactly the ones that share a bottleneck.
    """

    size: int
    cut: tuple[str, ...]
    paths: tuple[tuple[str, ...], ...]

    def path_sources(self) -> frozenset[str]:
        return frozenset(p[0] for p in self.paths)

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "cut": list(self.cut),
            "paths": [list(p) for p in self.paths],
        }


def legacy_count_condition(component: UnmonitoredComponent) -> bool:
    """Necessary head-count: at least as many border vertices as centroids."""
    return len(component.unmonitored_centroids) <= len(component.adjacent)


def _undirected_adjacency(component: UnmonitoredComponent) -> dict[str, list[str]]:
    adjacency: dict[str, set[str]] = {v: set() for v in component.vertices}
    for tail, head in component.arcs:
        adjacency[tail].add(head)
        adjacency[head].add(tail)
    return {v: sorted(nbrs) for v, nbrs in adjacency.items()}


def min_vertex_cut(component: UnmonitoredComponent) -> CutWitness:
    """Smallest vertex set separating the component's centroids from its border.

    Computed as max flow in the vertex-split graph: every component vertex
    becomes an in/out pair joined by a unit-capacity edge, undirected
    component edges become a pair of uncapped directed edges, a source
    feeds every centroid and every border vertex drains to a sink. The
    max-flow value is the number of vertex-disjoint centroid-to-border
    paths; the saturated split edges reachable on the source side form the
    cut. A vertex that is both centroid and border is its own unavoidable
    separator and shows up as a length-one path.
    """
    sources = sorted(component.unmonitored_centroids)
    sinks = sorted(component.adjacent)
    if not sources:
        return CutWitness(0, (), ())
    if not sinks:
        return CutWitness(0, (), ())
    adjacency = _undirected_adjacency(component)
    order = sorted(component.vertices)
    node_in = {v: 2 * i for i, v in enumerate(order)}
    node_out = {v: 2 * i + 1 for i, v in enumerate(order)}
    source = 2 * len(order)
    sink = source + 1
    cap_big = len(sources) + 1

    graph: list[list[list[int]]] = [[] for _ in range(sink + 1)]
    forward: list[tuple[int, int]] = []  # (node, edge index) per real edge

    def add_edge(u: int, v: int, capacity: int) -> None:
        forward.append((u, len(graph[u])))
        graph[u].append([v, capacity, len(graph[v])])
        graph[v].append([u, 0, len(graph[u]) - 1])

    for v in order:
        add_edge(node_in[v], node_out[v], 1)
    for v in order:
        for w in adjacency[v]:
            add_edge(node_out[v], node_in[w], cap_big)
    for b in sources:
        add_edge(source, node_in[b], cap_big)
    for a in sinks:
        add_edge(node_out[a], sink, cap_big)

    def bfs_path() -> list[tuple[int, int]] | None:
        prev: dict[int, tuple[int, int]] = {}
        queue = [source]
        seen = {source}
        while queue:
            u = queue.pop(0)
            if u == sink:
                break
            for idx, edge in enumerate(graph[u]):
                v, capacity, _ = edge
                if capacity > 0 and v not in seen:
                    seen.add(v)
                    prev[v] = (u, idx)
                    queue.append(v)
        if sink not in prev:
            return None
        path = []
        node = sink
        while node != source:
            u, idx = prev[node]
            path.append((u, idx))
            node = u
        return path

    value = 0
    while True:
        path = bfs_path()
        if path is None:
            break
        for u, idx in path:
            edge = graph[u][idx]
            edge[1] -= 1
            graph[edge[0]][edge[2]][1] += 1
        value += 1

    # Source-side residual reachability: a split edge saturated across the
    # frontier marks a cut vertex.
    reachable = {source}
    stack = [source]
    while stack:
        u = stack.pop()
        for v, capacity, _ in graph[u]:
            if capacity > 0 and v not in reachable:
                reachable.add(v)
                stack.append(v)
    cut = tuple(
        v for v in order if node_in[v] in reachable and node_out[v] not in reachable
    )

    # Decompose the flow into one walk per fed centroid, consuming one unit
    # off each edge as the walk crosses it. Each reported path stops at the
    # first border vertex, which keeps the collection vertex-disjoint.
    flow_out: dict[int, list[list[int]]] = {}
    for u, idx in forward:
        v, _, rev = graph[u][idx]
        sent = graph[v][rev][1]  # reverse edge gained exactly the sent flow
        if sent > 0:
            flow_out.setdefault(u, []).append([v, sent])
    sink_set = set(sinks)
    paths: list[tuple[str, ...]] = []
    for b in sources:
        start = node_in[b]
        carried = False
        for slot in flow_out.get(source, []):
            if slot[0] == start and slot[1] > 0:
                slot[1] -= 1
                carried = True
                break
        if not carried:
            continue
        walk = [b]
        node = start
        while walk[-1] not in sink_set and node != sink:
            moved = False
            for slot in flow_out.get(node, []):
                if slot[1] > 0:
                    slot[1] -= 1
                    node = slot[0]
                    if node % 2 == 0 and node // 2 < len(order):
                        label = order[node // 2]
                        if label != walk[-1]:
                            walk.append(label)
                    moved = True
                    break
            if not moved:
                break
        paths.append(tuple(walk))
    paths.sort()
    return CutWitness(value, cut, tuple(paths))


def is_tree(component: UnmonitoredComponent) -> bool:
    """True when the component's undirected shape is acyclic (it is connected
    by construction, so this is an edge count check plus a safety sweep)."""
    adjacency = _undirected_adjacency(component)
    edges = sum(len(nbrs) for nbrs in adjacency.values()) // 2
    return edges == len(component.vertices) - 1


@dataclass(frozen=True)
class ComponentDiagnosis:
    component: UnmonitoredComponent
    legacy_count_ok: bool
    cut: CutWitness
    disjoint_paths_ok: bool
    tree: bool
    verdict: Verdict
    reason: str
    rank: RankReport | None = None
    blocked_centroids: tuple[str, ...] = ()

    def to_json(self) -> dict:
        data = {
            "index": self.component.index,
            "vertices": sorted(self.component.vertices),
            "border": sorted(self.component.adjacent),
            "centroids": sorted(self.component.unmonitored_centroids),
            "legacy_count_ok": self.legacy_count_ok,
            "cut": self.cut.to_json(),
            "disjoint_paths_ok": self.disjoint_paths_ok,
            "tree": self.tree,
            "verdict": self.verdict.value,
            "reason": self.reason,
            "blocked_centroids": list(self.blocked_centroids),
        }
        if self.rank is not None:
            data["rank"] = self.rank.to_json()
        return data


@dataclass(frozen=True)
class DiagnosisReport:
    monitored: tuple[str, ...]
    overall: Verdict
    components: tuple[ComponentDiagnosis, ...]
    rank_fallback_used: bool
    notes: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "monitored": list(self.monitored),
            "overall": self.overall.value,
            "components": [c.to_json() for c in self.components],
            "rank_fallback_used": self.rank_fallback_used,
            "notes": list(self.notes),
        }


def diagnose(
    net: RoadNetwork,
    placement: Placement,
    rank_fallback: bool = True,
    strict: bool = False,
) -> DiagnosisReport:
    """Full placement diagnosis with one verdict per unmonitored component.

    Verdict rules, in order: a trivial component (no arcs, no centroids,
    nothing undeduced) is calculable; too few disjoint paths refutes; a
    component detached from every monitored vertex has a free overall
    level and is refuted; a tree whose border flows are all deducible is
    certified; everything else is undetermined structurally and, when
    ``rank_fallback`` is on, resolved by the exact rank of its block.
    """
    require_valid(net)
    require_valid_placement(net, placement)
    components = unmonitored_components(net, placement)
    system: FlowSystem | None = None
    notes: list[str] = []
    results: list[ComponentDiagnosis] = []
    pending: list[tuple[int, ComponentDiagnosis]] = []

    for comp in components:
        legacy = legacy_count_condition(comp)
        cut = min_vertex_cut(comp)
        n_centroids = len(comp.unmonitored_centroids)
        paths_ok = cut.size == n_centroids
        blocked = tuple(sorted(comp.unmonitored_centroids - cut.path_sources()))
        tree = is_tree(comp)
        if paths_ok and not legacy:
            raise AssertionError("disjoint paths found despite failing head-count")

        if comp.trivial:
            diag = ComponentDiagnosis(
                comp, legacy, cut, paths_ok, tree, Verdict.CALCULABLE,
                "carries no unknown flows",
            )
        elif not comp.arcs and not comp.adjacent:
            # A fully isolated centroid: its conservation row alone pins the
            # balancing flow to zero.
            diag = ComponentDiagnosis(
                comp, legacy, cut, paths_ok, tree, Verdict.CALCULABLE,
                "isolated vertex; its balancing flow is forced to zero",
            )
        elif not paths_ok:
            missing = ", ".join(blocked) if blocked else "some centroids"
            routes = "route" if cut.size == 1 else "routes"
            heads = "centroid" if n_centroids == 1 else "centroids"
            diag = ComponentDiagnosis(
                comp, legacy, cut, paths_ok, tree, Verdict.NOT_CALCULABLE,
                f"only {cut.size} disjoint {routes} to the border for "
                f"{n_centroids} {heads}; {missing} cannot reach the border "
                f"without crossing {{{', '.join(cut.cut)}}}",
                blocked_centroids=blocked,
            )
        elif not comp.adjacent:
            # Centroid-free (a centroid here would already have failed the
            # path test), yet it carries flow: the turning ratios admit a
            # one-parameter family of circulating flows and nothing pins
            # the absolute level.
            diag = ComponentDiagnosis(
                comp, legacy, cut, paths_ok, tree, Verdict.NOT_CALCULABLE,
                "detached from every monitored vertex; the overall flow level is free",
            )
        elif tree and not comp.undeduced:
            diag = ComponentDiagnosis(
                comp, legacy, cut, paths_ok, tree, Verdict.CALCULABLE,
                "tree-shaped with one disjoint route to the border per centroid",
            )
        else:
            why = (
                "contains cycles" if not tree else "some border outflow is not deducible"
            )
            diag = ComponentDiagnosis(
                comp, legacy, cut, paths_ok, tree, Verdict.UNDETERMINED,
                f"{why}; the structural tests cannot decide",
            )
            if rank_fallback:
                pending.append((len(results), diag))
        results.append(diag)

    if pending:
        # The system is exactly block diagonal over components: every arc
        # from an unmonitored vertex either stays inside its component or
        # leads to a monitored vertex, whose row is gone.
        system = build_flow_system(net, placement, strict=strict)
        for pos, diag in pending:
            block = component_block(system, diag.component)
            report = rank_certify(block)
            if report.full_column_rank:
                verdict = Verdict.CALCULABLE
                reason = (
                    f"its {report.rows}x{report.columns} block has full column rank"
                )
            else:
                free = report.columns - report.rank
                degrees = "degree" if free == 1 else "degrees"
                verdict = Verdict.NOT_CALCULABLE
                reason = (
                    f"its {report.rows}x{report.columns} block has rank "
                    f"{report.rank}, leaving {free} {degrees} of freedom"
                )
            results[pos] = ComponentDiagnosis(
                diag.component, diag.legacy_count_ok, diag.cut,
                diag.disjoint_paths_ok, diag.tree, verdict, reason,
                rank=report, blocked_centroids=diag.blocked_centroids,
            )

    if any(d.verdict is Verdict.NOT_CALCULABLE for d in results):
        overall = Verdict.NOT_CALCULABLE
    elif any(d.verdict is Verdict.UNDETERMINED for d in results):
        overall = Verdict.UNDETERMINED
    else:
        overall = Verdict.CALCULABLE
    return DiagnosisReport(
        monitored=tuple(sorted(placement.monitored)),
        overall=overall,
        components=tuple(results),
        rank_fallback_used=bool(pending),
        notes=tuple(notes),
    )


def explain_component(
    net: RoadNetwork, placement: Placement, index: int
) -> tuple[ComponentDiagnosis, "ObstructionReport | None"]:
    """Diagnose one component and, if its separator is too small, attach the
    rank-obstruction certificate built from that separator."""
    from .flowsystem import ObstructionReport  # noqa: F401 (typing)

    report = diagnose(net, placement)
    for diag in report.components:
        if diag.component.index == index:
            break
    else:
        raise InvalidCutError(f"no unmonitored component with index {index}")
    obstruction = None
    if not diag.disjoint_paths_ok and diag.component.arcs:
        system = build_flow_system(net, placement)
        obstruction = rank_obstruction(system, diag.component, diag.cut.cut)
    return diag, obstruction
