"""HTTP interface exposing diagnosis and reconstruction over a network.

The app is created around one network document; clients send monitor
sets (and optionally observations) and get back JSON verdicts, witness
structures and reconstructed flows. All numbers travel as exact
fraction strings ("4", "-5", "7/2") to keep the wire format lossless.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Mapping

from fastapi import Body, FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .conditions import Verdict, diagnose, explain_component
from .document import NetworkDocument
from .errors import (
    FlowscopeError,
    InconsistentObservationsError,
    InvalidCutError,
    ValidationError,
)
from .flowsystem import solve_flow
from .monitoring import Placement
from .network import Arc, RoadNetwork
from .rational import format_fraction, parse_fraction


def _network_json(doc: NetworkDocument) -> dict:
    net = doc.network
    return {
        "vertices": list(net.vertices),
        "arcs": [
            {"tail": a[0], "head": a[1], "ratio": format_fraction(net.ratio(a))}
            for a in net.arcs
        ],
        "centroids": net.sorted_vertices(net.centroids),
        "monitored": net.sorted_vertices(doc.monitored),
        "has_observations": doc.observed_flow is not None,
    }


def _error(status: int, message: str, violations: list[str] | None = None) -> JSONResponse:
    payload: dict[str, Any] = {"error": message}
    if violations:
        payload["violations"] = violations
    return JSONResponse(status_code=status, content=payload)


def _parse_monitored(net: RoadNetwork, payload: Mapping[str, Any], fallback: frozenset[str]) -> frozenset[str]:
    raw = payload.get("monitored")
    if raw is None:
        return fallback
    if not isinstance(raw, list) or not all(isinstance(v, str) for v in raw):
        raise ValidationError(["monitored must be a list of vertex names"])
    unknown = sorted(v for v in raw if not net.has_vertex(v))
    if unknown:
        raise ValidationError([f"unknown vertex: {v}" for v in unknown])
    return frozenset(raw)


def _parse_observations(payload: Mapping[str, Any]) -> dict[Arc, Fraction] | None:
    raw = payload.get("observations")
    if raw is None:
        return None
    if not isinstance(raw, list):
        raise ValidationError(["observations must be a list of {tail, head, flow}"])
    result: dict[Arc, Fraction] = {}
    for item in raw:
        if (
            not isinstance(item, dict)
            or not isinstance(item.get("tail"), str)
            or not isinstance(item.get("head"), str)
            or not isinstance(item.get("flow"), str)
        ):
            raise ValidationError(["each observation needs string tail, head and flow"])
        try:
            flow = parse_fraction(item["flow"])
        except ValueError as exc:
            raise ValidationError([f"bad flow value {item['flow']!r}"]) from exc
        result[(item["tail"], item["head"])] = flow
    return result


def _parse_balancing(payload: Mapping[str, Any]) -> dict[str, Fraction] | None:
    raw = payload.get("observed_balancing")
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise ValidationError(["observed_balancing must map vertex to value"])
    result: dict[str, Fraction] = {}
    for vertex, text in raw.items():
        if not isinstance(vertex, str) or not isinstance(text, str):
            raise ValidationError(["observed_balancing entries must be strings"])
        try:
            result[vertex] = parse_fraction(text)
        except ValueError as exc:
            raise ValidationError([f"bad balancing value {text!r}"]) from exc
    return result


def create_app(document: NetworkDocument, cors_origins: list[str] | None = None) -> FastAPI:
    app = FastAPI(title="flowscope", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins if cors_origins is not None else ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    net = document.network

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.get("/network")
    def network() -> dict:
        return _network_json(document)

    @app.post("/diagnose")
    def run_diagnose(payload: dict = Body(default={})) -> Any:
        try:
            monitored = _parse_monitored(net, payload, document.monitored)
            report = diagnose(net, Placement(monitored=monitored))
        except ValidationError as exc:
            return _error(400, "invalid request", exc.violations)
        return report.to_json()

    @app.post("/explain")
    def run_explain(payload: dict = Body(default={})) -> Any:
        try:
            monitored = _parse_monitored(net, payload, document.monitored)
            index = payload.get("component", 0)
            if not isinstance(index, int):
                raise ValidationError(["component must be an integer index"])
            diag, obstruction = explain_component(net, Placement(monitored=monitored), index)
        except InvalidCutError as exc:
            return _error(404, str(exc))
        except ValidationError as exc:
            return _error(400, "invalid request", exc.violations)
        result = {"component": diag.to_json()}
        if obstruction is not None:
            result["obstruction"] = obstruction.to_json()
        return result

    @app.post("/solve")
    def run_solve(payload: dict = Body(default={})) -> Any:
        try:
            monitored = _parse_monitored(net, payload, document.monitored)
            observed_flow = _parse_observations(payload)
            observed_balancing = _parse_balancing(payload)
            if observed_flow is None and monitored == document.monitored:
                observed_flow = document.observed_flow
                if observed_balancing is None:
                    observed_balancing = document.observed_balancing
            if observed_flow is None:
                return _error(
                    400,
                    "observed flows are required to solve; "
                    "send observations or use the document's monitor set",
                )
            placement = Placement(
                monitored=monitored,
                observed_flow=observed_flow,
                observed_balancing=observed_balancing or {},
            )
            report = diagnose(net, placement)
            if report.overall is not Verdict.CALCULABLE:
                return JSONResponse(
                    status_code=422,
                    content={
                        "error": "placement is not calculable",
                        "diagnosis": report.to_json(),
                    },
                )
            solution = solve_flow(net, placement)
        except InconsistentObservationsError as exc:
            return _error(422, str(exc))
        except ValidationError as exc:
            return _error(400, "invalid request", exc.violations)
        except FlowscopeError as exc:
            return _error(422, str(exc))
        flows = [
            {"tail": arc[0], "head": arc[1], "flow": format_fraction(value)}
            for arc, value in sorted(solution.full_flow.arc_flow.items())
        ]
        return {
            "flows": flows,
            "balancing": {
                v: format_fraction(x)
                for v, x in sorted(solution.full_flow.balancing.items())
            },
            "unknowns": {
                str(u): format_fraction(x) for u, x in solution.values.items()
            },
        }

    return app
