import type {
  HealthInfo,
  InferResponse,
  MetricsResponse,
  PatientDocument,
  Recommendation,
  ReportDocument,
  SymptomSuggestion,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** The engine's JSON error envelope ({code, detail}) raised as an exception. */
export class EngineError extends Error {
  constructor(
    readonly code: string,
    detail: string,
    readonly status: number,
  ) {
    super(detail);
    this.name = "EngineError";
  }
}

/**
 * Typed client for the engine's REST API.
 *
 * The fetch implementation is injectable so tests can run the whole UI
 * against an in-memory engine; the default goes to the same origin.
 */
export class EngineClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, init);
    } catch (err) {
      throw new EngineError("unreachable", `engine not reachable: ${err}`, 0);
    }
    // error bodies are JSON {code, detail}; anything else gets a generic code
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      const code =
        body && typeof body.code === "string" ? body.code : "http_error";
      const detail =
        body && typeof body.detail === "string"
          ? body.detail
          : `request failed with status ${response.status}`;
      throw new EngineError(code, detail, response.status);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  health(): Promise<HealthInfo> {
    return this.request<HealthInfo>("/api/health");
  }

  diseases(): Promise<string[]> {
    return this.request<string[]>("/api/diseases");
  }

  suggestSymptoms(q: string, n = 5): Promise<SymptomSuggestion[]> {
    const query = new URLSearchParams({ q, n: String(n) });
    return this.request<SymptomSuggestion[]>(`/api/symptoms?${query}`);
  }

  predict(patient: PatientDocument): Promise<ReportDocument> {
    return this.post<ReportDocument>("/api/predict", { patient });
  }

  infer(patient: PatientDocument): Promise<InferResponse> {
    return this.post<InferResponse>("/api/infer", { patient });
  }

  recommendById(reportId: string): Promise<Recommendation> {
    return this.post<Recommendation>("/api/recommend", { report_id: reportId });
  }

  recommendReport(report: ReportDocument): Promise<Recommendation> {
    return this.post<Recommendation>("/api/recommend", { report });
  }

  metrics(): Promise<MetricsResponse> {
    return this.request<MetricsResponse>("/api/metrics");
  }
}

/**
 * Recommendation for a report we already hold: try the cheap cached lookup
 * first, resend the full document if the server has evicted it.
 */
export async function fetchRecommendation(
  client: EngineClient,
  report: ReportDocument,
): Promise<Recommendation> {
  try {
    return await client.recommendById(report.report_id);
  } catch (err) {
    if (err instanceof EngineError && err.code === "unknown_report") {
      return client.recommendReport(report);
    }
    throw err;
  }
}
