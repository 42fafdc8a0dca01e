"""Record service responses as JSON fixtures for the frontend contract tests.

Run from the repository root after any change to the service or the city
demo documents:

    python3 tools/record_fixtures.py

The frontend tests replay these files instead of talking to a live
service, so they stay hermetic while still pinning the real wire format.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi.testclient import TestClient

from flowscope.document import load_document
from flowscope.scenarios import CITY_FIXED_MONITORS
from flowscope.service import create_app

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "frontend" / "tests" / "fixtures"


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    document = load_document(ROOT / "demos" / "city-blocked.net")
    client = TestClient(create_app(document))

    recordings: dict[str, dict] = {}
    recordings["network.json"] = client.get("/network").json()
    recordings["diagnose-blocked.json"] = client.post("/diagnose", json={}).json()
    recordings["diagnose-fixed.json"] = client.post(
        "/diagnose", json={"monitored": list(CITY_FIXED_MONITORS)}
    ).json()

    blocked = recordings["diagnose-blocked.json"]
    failing = [c for c in blocked["components"] if c["verdict"] != "calculable"]
    assert len(failing) == 1, "expected exactly one failing component"
    recordings["explain-blocked.json"] = client.post(
        "/explain", json={"component": failing[0]["index"]}
    ).json()

    for name, payload in recordings.items():
        path = FIXTURES / name
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        print(f"wrote {path.relative_to(ROOT)}")


if __name__ == "__main__":
    main()
