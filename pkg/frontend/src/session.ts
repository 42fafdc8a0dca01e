/** Client-side placement state: which intersections carry a monitor, and
 * the latest diagnosis for that set. */

import type { DiagnosisInfo } from "./types.js";

export interface DiagnoseService {
  diagnose(monitored: string[]): Promise<DiagnosisInfo>;
}

export class PlacementSession {
  private readonly monitored: Set<string>;
  private issued = 0;
  private applied = 0;
  private latest: DiagnosisInfo | null = null;

  constructor(
    initialMonitored: Iterable<string>,
    private readonly service: DiagnoseService,
  ) {
    this.monitored = new Set(initialMonitored);
  }

  /** The most recently applied diagnosis, if any request has finished. */
  get current(): DiagnosisInfo | null {
    return this.latest;
  }

  monitoredVertices(): string[] {
    return [...this.monitored].sort();
  }

  isMonitored(vertex: string): boolean {
    return this.monitored.has(vertex);
  }

  /** Add the monitor if absent, remove it if present. */
  toggle(vertex: string): void {
    if (!this.monitored.delete(vertex)) {
      this.monitored.add(vertex);
    }
  }

  /** Relocate one monitor: two toggles that must change both vertices. */
  moveMonitor(from: string, to: string): void {
    if (!this.monitored.has(from)) {
      throw new Error(`no monitor at ${from} to move`);
    }
    if (this.monitored.has(to)) {
      throw new Error(`monitor already present at ${to}`);
    }
    this.monitored.delete(from);
    this.monitored.add(to);
  }

  /** Ask the service to diagnose the current monitor set.
   *
   * Requests may finish out of order while the user keeps clicking; a
   * response is applied only if nothing newer has been applied already,
   * and a stale response resolves to null so callers skip redrawing. */
  async refresh(): Promise<DiagnosisInfo | null> {
    const ticket = ++this.issued;
    const report = await this.service.diagnose(this.monitoredVertices());
    if (ticket <= this.applied) {
      return null;
    }
    this.applied = ticket;
    this.latest = report;
    return report;
  }
}
