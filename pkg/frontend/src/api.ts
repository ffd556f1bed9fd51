// Thin typed client for the annotation service. The UI holds no
// authoritative state: every read goes back to these endpoints.

import type {
  AnnotationLabels,
  ApiError,
  ConflictEntry,
  Dimension,
  NextSampleResponse,
  SessionInfo,
} from "./types";

export class ApiRequestError extends Error {
  readonly status: number;
  readonly field?: string;

  constructor(status: number, body: ApiError) {
    super(body.error ?? `HTTP ${status}`);
    this.status = status;
    this.field = body.field;
  }
}

async function parseError(response: Response): Promise<ApiRequestError> {
  let body: ApiError;
  try {
    body = (await response.json()) as ApiError;
  } catch {
    body = { error: `HTTP ${response.status}` };
  }
  return new ApiRequestError(response.status, body);
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(this.baseUrl + path);
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  private async post<T>(path: string, payload: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  session(): Promise<SessionInfo> {
    return this.get("/api/session");
  }

  nextSample(annotator: string): Promise<NextSampleResponse> {
    return this.get(`/api/samples/next?annotator=${encodeURIComponent(annotator)}`);
  }

  submitAnnotation(
    sampleId: string,
    annotator: string,
    labels: AnnotationLabels,
    note = "",
  ): Promise<{ status: string }> {
    return this.post("/api/annotations", {
      sample_id: sampleId,
      annotator_id: annotator,
      labels,
      note,
    });
  }

  conflicts(): Promise<{ conflicts: ConflictEntry[] }> {
    return this.get("/api/conflicts");
  }

  resolve(
    sampleId: string,
    dimension: Dimension,
    value: unknown,
    note = "",
  ): Promise<{ status: string }> {
    return this.post("/api/resolutions", {
      sample_id: sampleId,
      dimension,
      value,
      note,
    });
  }

  async exportText(): Promise<string> {
    const response = await fetch(this.baseUrl + "/api/export");
    if (!response.ok) throw await parseError(response);
    return response.text();
  }
}
