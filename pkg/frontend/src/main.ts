/** Browser entry point: fetch the network, render it, and re-diagnose on
 * every monitor toggle. */

import { ApiClient, HttpTransport, ServiceError } from "./api.js";
import { describeDiagnosis, failingComponent, verdictLabel } from "./panel.js";
import { highlightFromComponent, renderNetwork } from "./render.js";
import { PlacementSession } from "./session.js";
import type { DiagnosisInfo, NetworkInfo } from "./types.js";

function serviceBase(): string {
  const meta = document.querySelector<HTMLMetaElement>(
    'meta[name="service-base"]',
  );
  return meta?.content ?? "http://127.0.0.1:8000";
}

function requireElement(id: string): HTMLElement {
  const element = document.getElementById(id);
  if (!element) throw new Error(`missing page element #${id}`);
  return element;
}

function draw(
  net: NetworkInfo,
  session: PlacementSession,
  report: DiagnosisInfo,
): void {
  const spotlight = failingComponent(report);
  const svg = renderNetwork(net, {
    monitored: new Set(session.monitoredVertices()),
    centroids: new Set(net.centroids),
    highlight: spotlight ? highlightFromComponent(spotlight) : undefined,
  });
  requireElement("network").innerHTML = svg;

  const banner = requireElement("verdict");
  banner.textContent = verdictLabel(report.overall);
  banner.dataset.verdict = report.overall;

  const panel = requireElement("panel");
  panel.textContent = describeDiagnosis(report).join("\n");
}

async function boot(): Promise<void> {
  const api = new ApiClient(new HttpTransport(serviceBase()));
  const net = await api.network();
  const session = new PlacementSession(net.monitored, {
    diagnose: (monitored) => api.diagnose(monitored),
  });

  const refresh = async (): Promise<void> => {
    try {
      const report = await session.refresh();
      if (report) draw(net, session, report);
    } catch (error) {
      const banner = requireElement("verdict");
      banner.textContent =
        error instanceof ServiceError ? error.message : String(error);
      banner.dataset.verdict = "error";
    }
  };

  requireElement("network").addEventListener("click", (event) => {
    const target = event.target as Element | null;
    const vertex = target?.closest("[data-vertex]")?.getAttribute("data-vertex");
    if (vertex) {
      session.toggle(vertex);
      void refresh();
    }
  });

  await refresh();
}

boot().catch((error) => {
  document.body.textContent = `failed to start: ${String(error)}`;
});
