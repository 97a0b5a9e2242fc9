/** Shared wire types for the review API. */

export type CoarseCode = "A" | "B" | "C";

export interface CoarseCategory {
  code: CoarseCode;
  title: string;
  description: string;
}

export interface FineLabel {
  id: string;
  canonical_id: string;
  coarse: CoarseCode;
  definition: string;
}

export interface Taxonomy {
  categories: CoarseCategory[];
  labels: FineLabel[];
}

/** One pre-annotated span as served to annotators. */
export interface TaskSpan {
  span: string;
  local_label: string;
  /** Present only when the server is configured to show explanations. */
  explanation?: string;
}

/** Annotator-facing task payload from `GET /api/task`. */
export interface TaskPayload {
  task_id: string;
  text: string;
  spans: TaskSpan[];
}

export interface QualifyResponse {
  passed: boolean;
  score: number;
}

export interface SubmitResponse {
  ok: boolean;
  server_elapsed_ms: number;
}

export interface ProgressResponse {
  tasks: number;
  redundancy: number;
  submissions: number;
  complete_tasks: number;
  qualified_annotators: string[];
}

export interface ApiErrorDetail {
  code: string;
  message: string;
}
