/** SVG rendering of the network, the monitor set, and the diagnosis
 * highlights. Pure string building so it is testable without a DOM. */

import { layoutVertices, type Point } from "./layout.js";
import type { ComponentReportInfo, NetworkInfo } from "./types.js";

export interface HighlightState {
  /** Vertex-disjoint routes from centroids to the border; a single-vertex
   * route is a centroid that already sits on the border. */
  routes: string[][];
  /** Centroids the separator strands: they have no route of their own. */
  blockedCentroids: string[];
}

export function highlightFromComponent(
  component: ComponentReportInfo,
): HighlightState {
  return {
    routes: component.cut.paths.map((p) => [...p]),
    blockedCentroids: [...component.blocked_centroids],
  };
}

export interface RenderOptions {
  monitored: Set<string>;
  centroids: Set<string>;
  highlight?: HighlightState;
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function edgeKey(a: string, b: string): string {
  return a < b ? `${a}|${b}` : `${b}|${a}`;
}

export function renderNetwork(net: NetworkInfo, options: RenderOptions): string {
  const layout = layoutVertices(net.vertices);
  const at = (v: string): Point => {
    const point = layout.points.get(v);
    if (!point) throw new Error(`vertex ${v} has no layout position`);
    return point;
  };

  const routeEdges = new Set<string>();
  const routeVertices = new Set<string>();
  for (const route of options.highlight?.routes ?? []) {
    for (const vertex of route) routeVertices.add(vertex);
    for (let i = 0; i + 1 < route.length; i += 1) {
      routeEdges.add(edgeKey(route[i]!, route[i + 1]!));
    }
  }
  const blocked = new Set(options.highlight?.blockedCentroids ?? []);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${layout.width} ${layout.height}" width="${layout.width}" height="${layout.height}">`,
  );

  const seen = new Set<string>();
  for (const arc of net.arcs) {
    const key = edgeKey(arc.tail, arc.head);
    if (seen.has(key)) continue;
    seen.add(key);
    const a = at(arc.tail);
    const b = at(arc.head);
    const classes = routeEdges.has(key) ? "edge route" : "edge";
    parts.push(
      `<line class="${classes}" data-edge="${escapeXml(key)}"` +
        `${routeEdges.has(key) ? ` data-route-edge="${escapeXml(key)}"` : ""}` +
        ` x1="${a.x}" y1="${a.y}" x2="${b.x}" y2="${b.y}"/>`,
    );
  }

  for (const vertex of net.vertices) {
    const point = at(vertex);
    const classes = ["vertex"];
    if (options.centroids.has(vertex)) classes.push("centroid");
    if (options.monitored.has(vertex)) classes.push("monitored");
    if (routeVertices.has(vertex)) classes.push("on-route");
    if (blocked.has(vertex)) classes.push("blocked");
    const label = escapeXml(vertex);
    if (blocked.has(vertex)) {
      // Dashed ring marking a centroid with no route to the border.
      parts.push(
        `<circle class="missing-route" data-missing-route="${label}"` +
          ` cx="${point.x}" cy="${point.y}" r="22"/>`,
      );
    }
    parts.push(
      `<circle class="${classes.join(" ")}" data-vertex="${label}"` +
        ` cx="${point.x}" cy="${point.y}" r="13"/>`,
    );
    parts.push(
      `<text class="label" x="${point.x}" y="${point.y + 28}"` +
        ` text-anchor="middle">${label}</text>`,
    );
  }

  parts.push("</svg>");
  return parts.join("");
}
