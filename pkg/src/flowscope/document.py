"""Plain-text documents describing a network, monitors and observations.

The format is line-oriented with bracketed section headers:

    # comments start with a hash
    [vertices]
    a b c d e f
    [arcs]
    a b 1/2
    b a 1/3
    [centroids]
    e f
    [monitored]
    a
    [observations]
    a b 4
    [observed_balancing]
    e -5

``[vertices]`` and ``[arcs]`` are required. Each arc line is one
direction with its turning ratio (fractions or decimal strings, parsed
exactly). ``[observations]`` and ``[observed_balancing]`` are optional;
their presence, even empty, means observed values are being supplied.
Serialization is canonical: fixed section order, network vertex order,
one arc per line.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping

from .errors import DocumentError
from .monitoring import Placement
from .network import Arc, RoadNetwork, require_valid
from .rational import format_fraction, parse_fraction

_SECTIONS = (
    "vertices",
    "arcs",
    "centroids",
    "monitored",
    "observations",
    "observed_balancing",
)


@dataclass(frozen=True)
class NetworkDocument:
    network: RoadNetwork
    monitored: frozenset[str]
    observed_flow: Mapping[Arc, Fraction] | None = None
    observed_balancing: Mapping[str, Fraction] | None = None

    @property
    def placement(self) -> Placement:
        return Placement(
            monitored=self.monitored,
            observed_flow=self.observed_flow,
            observed_balancing=self.observed_balancing,
        )

    def with_monitors(self, monitored: frozenset[str]) -> "NetworkDocument":
        """Same network, different monitor set, observations dropped."""
        return NetworkDocument(network=self.network, monitored=monitored)


def parse_document(text: str) -> NetworkDocument:
    sections: dict[str, list[tuple[int, list[str]]]] = {}
    current: str | None = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip().lower()
            if name not in _SECTIONS:
                raise DocumentError(f"unknown section [{name}]", line=number)
            if name in sections:
                raise DocumentError(f"duplicate section [{name}]", line=number)
            sections[name] = []
            current = name
            continue
        if current is None:
            raise DocumentError("content before the first section header", line=number)
        sections[current].append((number, line.split()))

    for required in ("vertices", "arcs"):
        if required not in sections:
            raise DocumentError(f"missing required section [{required}]")

    vertices: list[str] = []
    for _, tokens in sections["vertices"]:
        vertices.extend(tokens)

    arcs: list[Arc] = []
    ratios: dict[Arc, Fraction] = {}
    for number, tokens in sections["arcs"]:
        if len(tokens) != 3:
            raise DocumentError(
                "arc lines need exactly: tail head ratio", line=number
            )
        tail, head, ratio_text = tokens
        try:
            ratio = parse_fraction(ratio_text)
        except ValueError as exc:
            raise DocumentError(f"bad ratio {ratio_text!r}: {exc}", line=number) from exc
        arc = (tail, head)
        if arc in ratios:
            raise DocumentError(f"arc {tail}->{head} appears twice", line=number)
        arcs.append(arc)
        ratios[arc] = ratio

    centroids: list[str] = []
    for _, tokens in sections.get("centroids", []):
        centroids.extend(tokens)
    monitored: list[str] = []
    for _, tokens in sections.get("monitored", []):
        monitored.extend(tokens)

    observed_flow: dict[Arc, Fraction] | None = None
    if "observations" in sections:
        observed_flow = {}
        for number, tokens in sections["observations"]:
            if len(tokens) != 3:
                raise DocumentError(
                    "observation lines need exactly: tail head flow", line=number
                )
            tail, head, flow_text = tokens
            try:
                flow = parse_fraction(flow_text)
            except ValueError as exc:
                raise DocumentError(f"bad flow {flow_text!r}: {exc}", line=number) from exc
            if (tail, head) in observed_flow:
                raise DocumentError(f"observation {tail}->{head} appears twice", line=number)
            observed_flow[(tail, head)] = flow

    observed_balancing: dict[str, Fraction] | None = None
    if "observed_balancing" in sections:
        observed_balancing = {}
        for number, tokens in sections["observed_balancing"]:
            if len(tokens) != 2:
                raise DocumentError(
                    "balancing lines need exactly: vertex value", line=number
                )
            vertex, value_text = tokens
            try:
                value = parse_fraction(value_text)
            except ValueError as exc:
                raise DocumentError(f"bad value {value_text!r}: {exc}", line=number) from exc
            if vertex in observed_balancing:
                raise DocumentError(f"balancing for {vertex} appears twice", line=number)
            observed_balancing[vertex] = value

    network = RoadNetwork(
        vertices=tuple(vertices),
        arcs=tuple(arcs),
        turning_ratio=ratios,
        centroids=frozenset(centroids),
    )
    require_valid(network)
    unknown_monitors = [m for m in monitored if not network.has_vertex(m)]
    if unknown_monitors:
        raise DocumentError(
            f"monitored vertices not in the network: {', '.join(sorted(unknown_monitors))}"
        )
    return NetworkDocument(
        network=network,
        monitored=frozenset(monitored),
        observed_flow=observed_flow,
        observed_balancing=observed_balancing,
    )


def serialize_document(doc: NetworkDocument) -> str:
    net = doc.network
    lines: list[str] = ["# flowscope network document", "[vertices]"]
    for start in range(0, len(net.vertices), 12):
        lines.append(" ".join(net.vertices[start : start + 12]))
    lines.append("[arcs]")
    for arc in net.arcs:
        lines.append(f"{arc[0]} {arc[1]} {format_fraction(net.ratio(arc))}")
    if net.centroids:
        lines.append("[centroids]")
        lines.append(" ".join(net.sorted_vertices(net.centroids)))
    if doc.monitored:
        lines.append("[monitored]")
        lines.append(" ".join(net.sorted_vertices(doc.monitored)))
    if doc.observed_flow is not None:
        lines.append("[observations]")
        for arc in net.arcs:
            if arc in doc.observed_flow:
                lines.append(
                    f"{arc[0]} {arc[1]} {format_fraction(doc.observed_flow[arc])}"
                )
    if doc.observed_balancing is not None:
        lines.append("[observed_balancing]")
        for v in net.sorted_vertices(doc.observed_balancing):
            lines.append(f"{v} {format_fraction(doc.observed_balancing[v])}")
    return "\n".join(lines) + "\n"


def load_document(path: str | Path) -> NetworkDocument:
    return parse_document(Path(path).read_text(encoding="utf-8"))


def save_document(doc: NetworkDocument, path: str | Path) -> None:
    Path(path).write_text(serialize_document(doc), encoding="utf-8")


def document_from_parts(
    net: RoadNetwork,
    monitored: frozenset[str] = frozenset(),
    placement: Placement | None = None,
) -> NetworkDocument:
    if placement is not None:
        return NetworkDocument(
            network=net,
            monitored=placement.monitored,
            observed_flow=placement.observed_flow,
            observed_balancing=placement.observed_balancing,
        )
    return NetworkDocument(network=net, monitored=monitored)
