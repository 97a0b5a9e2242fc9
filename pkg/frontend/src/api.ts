/** Thin typed client for the review service HTTP API.
 *
 * All access to the backend goes through this module; the only
 * configuration is the base URL.
 */

import type {
  ApiErrorDetail,
  ProgressResponse,
  QualifyResponse,
  SubmitResponse,
  TaskPayload,
  Taxonomy,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, detail: ApiErrorDetail | string) {
    const message = typeof detail === "string" ? detail : detail.message;
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = typeof detail === "string" ? "unknown" : detail.code;
  }
}

export class ApiClient {
  private readonly baseUrl: string;

  constructor(baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    const body: unknown = await response.json();
    if (!response.ok) {
      const detail = (body as { detail?: ApiErrorDetail | string }).detail;
      throw new ApiError(response.status, detail ?? response.statusText);
    }
    return body as T;
  }

  getTaxonomy(): Promise<Taxonomy> {
    return this.request<Taxonomy>("/api/taxonomy");
  }

  getQualification(): Promise<{ items: Array<{ text: string }> }> {
    return this.request("/api/qualification");
  }

  qualify(annotatorId: string, answers: string[]): Promise<QualifyResponse> {
    return this.request<QualifyResponse>("/api/qualify", {
      method: "POST",
      body: JSON.stringify({ annotator_id: annotatorId, answers }),
    });
  }

  nextTask(annotatorId: string): Promise<TaskPayload> {
    const query = new URLSearchParams({ annotator_id: annotatorId });
    return this.request<TaskPayload>(`/api/task?${query.toString()}`);
  }

  submitAnnotation(submission: {
    task_id: string;
    annotator_id: string;
    coarse: string;
    fine: string;
    elapsed_ms: number;
  }): Promise<SubmitResponse> {
    return this.request<SubmitResponse>("/api/annotation", {
      method: "POST",
      body: JSON.stringify(submission),
    });
  }

  getProgress(): Promise<ProgressResponse> {
    return this.request<ProgressResponse>("/api/progress");
  }
}
