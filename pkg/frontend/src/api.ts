/** Thin HTTP client for the diagnosis service. */

import type {
  DiagnosisInfo,
  ExplainInfo,
  NetworkInfo,
  SolutionInfo,
} from "./types.js";

export interface Transport {
  get(path: string): Promise<unknown>;
  post(path: string, body: unknown): Promise<unknown>;
}

/** Error responses keep their parsed body so callers can show violations
 * or the embedded diagnosis of a not-calculable solve attempt. */
export class ServiceError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly body: unknown,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

export class HttpTransport implements Transport {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const body: unknown = await response.json().catch(() => null);
    if (!response.ok) {
      const message =
        body !== null &&
        typeof body === "object" &&
        "error" in body &&
        typeof (body as { error: unknown }).error === "string"
          ? (body as { error: string }).error
          : `request to ${path} failed with status ${response.status}`;
      throw new ServiceError(message, response.status, body);
    }
    return body;
  }

  get(path: string): Promise<unknown> {
    return this.request(path);
  }

  post(path: string, body: unknown): Promise<unknown> {
    return this.request(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }
}

export class ApiClient {
  constructor(private readonly transport: Transport) {}

  network(): Promise<NetworkInfo> {
    return this.transport.get("/network") as Promise<NetworkInfo>;
  }

  diagnose(monitored?: string[]): Promise<DiagnosisInfo> {
    const body = monitored === undefined ? {} : { monitored };
    return this.transport.post("/diagnose", body) as Promise<DiagnosisInfo>;
  }

  explain(component: number, monitored?: string[]): Promise<ExplainInfo> {
    const body: Record<string, unknown> = { component };
    if (monitored !== undefined) body.monitored = monitored;
    return this.transport.post("/explain", body) as Promise<ExplainInfo>;
  }

  solve(monitored?: string[]): Promise<SolutionInfo> {
    const body = monitored === undefined ? {} : { monitored };
    return this.transport.post("/solve", body) as Promise<SolutionInfo>;
  }
}
