"""Command-line interface: verify, solve, explain, generate, serve."""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .conditions import Verdict, diagnose, explain_component
from .document import (
    NetworkDocument,
    document_from_parts,
    load_document,
    save_document,
    serialize_document,
)
from .errors import DocumentError, FlowscopeError, ValidationError
from .flowsystem import solve_flow
from .monitoring import Placement
from .rational import format_fraction
from .scenarios import (
    ScenarioSpec,
    generate,
    observe,
    random_balancing,
    simulate_ground_truth,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CALCULABLE = 2
EXIT_UNDETERMINED = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowscope",
        description=(
            "Decide whether monitored intersections pin down all traffic in a "
            "road network, explain failures, and reconstruct the flows."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="diagnose a monitoring placement")
    verify.add_argument("network", help="network document file")
    verify.add_argument("--monitored", help="comma-separated vertices overriding the document")
    verify.add_argument("--strict", action="store_true",
                        help="fail when a border outflow cannot be deduced")
    verify.add_argument("--no-rank-fallback", action="store_true",
                        help="skip the exact rank fallback for undetermined components")
    verify.add_argument("--json", action="store_true", help="machine-readable output")

    solve = sub.add_parser("solve", help="reconstruct every flow from the observations")
    solve.add_argument("network", help="network document file with observations")
    solve.add_argument("--json", action="store_true", help="machine-readable output")

    explain = sub.add_parser("explain", help="detail one unmonitored component")
    explain.add_argument("network", help="network document file")
    explain.add_argument("--component", type=int, default=0, help="component index")
    explain.add_argument("--monitored", help="comma-separated vertices overriding the document")
    explain.add_argument("--json", action="store_true", help="machine-readable output")

    gen = sub.add_parser("generate", help="emit a generated network document")
    gen.add_argument("kind", choices=["grid", "random_tree", "random_graph"])
    gen.add_argument("--width", type=int, default=5)
    gen.add_argument("--height", type=int, default=5)
    gen.add_argument("--size", type=int, default=12)
    gen.add_argument("--extra-edges", type=int, default=3)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--ratios", choices=["uniform", "random"], default="uniform")
    gen.add_argument("--centroids", default="random",
                     help="none | random | tile_centers | list:a,b,c")
    gen.add_argument("--monitors", default="random",
                     help="none | random | tile_pair | list:a,b,c")
    gen.add_argument("--observe", action="store_true",
                     help="also simulate a ground truth and record observations")
    gen.add_argument("-o", "--output", help="write the document here instead of stdout")

    serve = sub.add_parser("serve", help="serve the HTTP interface for a network")
    serve.add_argument("network", help="network document file")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int,
                       default=int(os.environ.get("FLOWSCOPE_PORT", "8787")))
    return parser


def _load(path: str) -> NetworkDocument:
    try:
        return load_document(path)
    except FileNotFoundError:
        raise FlowscopeError(f"no such file: {path}")
    except DocumentError as exc:
        raise FlowscopeError(f"{path}: {exc}")


def _placement(doc: NetworkDocument, override: str | None) -> Placement:
    if override is None:
        return doc.placement
    names = [v for v in override.split(",") if v]
    unknown = sorted(v for v in names if not doc.network.has_vertex(v))
    if unknown:
        raise FlowscopeError(f"unknown vertices: {', '.join(unknown)}")
    return Placement(monitored=frozenset(names))


def _verdict_exit(verdict: Verdict) -> int:
    if verdict is Verdict.CALCULABLE:
        return EXIT_OK
    if verdict is Verdict.NOT_CALCULABLE:
        return EXIT_NOT_CALCULABLE
    return EXIT_UNDETERMINED


def _print_component(diag, out) -> None:
    comp = diag.component
    centroids = ", ".join(sorted(comp.unmonitored_centroids)) or "none"
    border = ", ".join(sorted(comp.adjacent)) or "none"
    print(f"component {comp.index}: {diag.verdict.value} — {diag.reason}", file=out)
    print(f"  vertices: {', '.join(sorted(comp.vertices))}", file=out)
    print(f"  border: {border} | centroids: {centroids}", file=out)
    if comp.unmonitored_centroids:
        print(
            f"  smallest separator: {{{', '.join(diag.cut.cut)}}} "
            f"(size {diag.cut.size})",
            file=out,
        )
        for path in diag.cut.paths:
            print(f"  route: {' -> '.join(path)}", file=out)
        for blocked in diag.blocked_centroids:
            print(f"  blocked centroid: {blocked}", file=out)
    if diag.rank is not None:
        print(
            f"  block rank: {diag.rank.rank} of {diag.rank.columns} columns",
            file=out,
        )


def _cmd_verify(args) -> int:
    doc = _load(args.network)
    placement = _placement(doc, args.monitored)
    report = diagnose(
        doc.network,
        placement,
        rank_fallback=not args.no_rank_fallback,
        strict=args.strict,
    )
    if args.json:
        print(json.dumps(report.to_json(), indent=2))
        return _verdict_exit(report.overall)
    out = sys.stdout
    print(f"monitored: {', '.join(report.monitored) or 'none'}", file=out)
    print(f"overall: {report.overall.value}", file=out)
    for diag in report.components:
        _print_component(diag, out)
    return _verdict_exit(report.overall)


def _cmd_solve(args) -> int:
    doc = _load(args.network)
    placement = doc.placement
    report = diagnose(doc.network, placement)
    if report.overall is not Verdict.CALCULABLE:
        if args.json:
            print(json.dumps({"error": "placement is not calculable",
                              "diagnosis": report.to_json()}, indent=2))
        else:
            print("cannot solve: placement is not calculable", file=sys.stderr)
            for diag in report.components:
                if diag.verdict is not Verdict.CALCULABLE:
                    print(f"  component {diag.component.index}: {diag.reason}",
                          file=sys.stderr)
        return _verdict_exit(report.overall)
    solution = solve_flow(doc.network, placement)
    if args.json:
        payload = {
            "flows": [
                {"tail": a[0], "head": a[1], "flow": format_fraction(x)}
                for a, x in sorted(solution.full_flow.arc_flow.items())
            ],
            "balancing": {
                v: format_fraction(x)
                for v, x in sorted(solution.full_flow.balancing.items())
            },
        }
        print(json.dumps(payload, indent=2))
        return EXIT_OK
    width = max((len(a) + len(b) for a, b in solution.full_flow.arc_flow), default=4)
    for arc in doc.network.arcs:
        value = solution.full_flow.arc_flow[arc]
        name = f"{arc[0]}->{arc[1]}"
        print(f"{name:<{width + 2}} {format_fraction(value)}")
    for v in doc.network.sorted_vertices(solution.full_flow.balancing):
        print(f"S[{v}] {format_fraction(solution.full_flow.balancing[v])}")
    return EXIT_OK


def _cmd_explain(args) -> int:
    doc = _load(args.network)
    placement = _placement(doc, args.monitored)
    diag, obstruction = explain_component(doc.network, placement, args.component)
    if args.json:
        payload = {"component": diag.to_json()}
        if obstruction is not None:
            payload["obstruction"] = obstruction.to_json()
        print(json.dumps(payload, indent=2))
        return _verdict_exit(diag.verdict)
    _print_component(diag, sys.stdout)
    if obstruction is not None:
        print("rank obstruction:")
        print(f"  columns ({obstruction.column_count}): "
              + ", ".join(str(u) for u in obstruction.columns))
        print(f"  zero rows ({len(obstruction.zero_rows)}): "
              + (", ".join(obstruction.zero_rows) or "none"))
        print(f"  rank bound {obstruction.rank_bound} < {obstruction.column_count} columns"
              if obstruction.obstructed else "  no obstruction from this separator")
    return _verdict_exit(diag.verdict)


def _parse_rule(text: str) -> tuple[str, tuple[str, ...]]:
    if text.startswith("list:"):
        return "listed", tuple(v for v in text[5:].split(",") if v)
    return text, ()


def _cmd_generate(args) -> int:
    centroid_rule, centroid_list = _parse_rule(args.centroids)
    monitor_rule, monitor_list = _parse_rule(args.monitors)
    spec = ScenarioSpec(
        kind=args.kind,
        width=args.width,
        height=args.height,
        size=args.size,
        extra_edges=args.extra_edges,
        centroid_rule=centroid_rule,
        centroids=centroid_list,
        monitor_rule=monitor_rule,
        monitors=monitor_list,
        ratio_rule=args.ratios,
        seed=args.seed,
    )
    net, monitored = generate(spec)
    if args.observe:
        balancing = random_balancing(net, seed=spec.seed)
        truth = simulate_ground_truth(net, balancing, seed=spec.seed)
        placement = observe(net, truth, monitored)
        doc = document_from_parts(net, placement=placement)
    else:
        doc = document_from_parts(net, monitored=monitored)
    if args.output:
        save_document(doc, args.output)
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(serialize_document(doc))
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    doc = _load(args.network)
    app = create_app(doc)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "verify": _cmd_verify,
        "solve": _cmd_solve,
        "explain": _cmd_explain,
        "generate": _cmd_generate,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except ValidationError as exc:
        for violation in exc.violations:
            print(f"error: {violation}", file=sys.stderr)
        return EXIT_ERROR
    except FlowscopeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
