/** Text lines for the diagnosis side panel. Pure functions over the wire
 * shapes so the panel content is testable without a DOM. */

import type { ComponentReportInfo, DiagnosisInfo } from "./types.js";

export function verdictLabel(verdict: string): string {
  return verdict.replace(/_/g, " ");
}

export function describeComponent(component: ComponentReportInfo): string[] {
  const lines: string[] = [];
  lines.push(
    `component ${component.index}: ${verdictLabel(component.verdict)} — ${component.reason}`,
  );
  lines.push(`vertices: ${component.vertices.join(", ")}`);
  lines.push(
    `border: ${component.border.join(", ") || "none"} | centroids: ${
      component.centroids.join(", ") || "none"
    }`,
  );
  if (component.cut.size > 0 || component.centroids.length > 0) {
    lines.push(
      `smallest separator: {${component.cut.cut.join(", ")}} (size ${component.cut.size})`,
    );
  }
  for (const route of component.cut.paths) {
    lines.push(`route: ${route.join(" -> ")}`);
  }
  for (const centroid of component.blocked_centroids) {
    lines.push(`blocked centroid: ${centroid} (no route to the border)`);
  }
  if (component.rank) {
    lines.push(
      `block rank: ${component.rank.rank} of ${component.rank.columns} columns`,
    );
  }
  return lines;
}

export function describeDiagnosis(report: DiagnosisInfo): string[] {
  const lines: string[] = [];
  lines.push(`monitored: ${report.monitored.join(", ") || "none"}`);
  lines.push(`overall: ${verdictLabel(report.overall)}`);
  for (const component of report.components) {
    lines.push(...describeComponent(component));
  }
  lines.push(...report.notes);
  return lines;
}

/** The component to spotlight: the first one that is not calculable. */
export function failingComponent(
  report: DiagnosisInfo,
): ComponentReportInfo | null {
  return report.components.find((c) => c.verdict !== "calculable") ?? null;
}
