import type {
  HumanAnnotation,
  LoginResponse,
  StudyConfig,
  TaskDetail,
  TaskSummary,
} from "./types";

export interface FieldError {
  field: string;
  message: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
    public fieldErrors: FieldError[] = [],
  ) {
    super(message);
  }
}

/** Extract per-field messages from a FastAPI 422 detail array. */
function parseFieldErrors(detail: unknown): FieldError[] {
  if (!Array.isArray(detail)) return [];
  return detail.map((entry) => {
    const loc = Array.isArray(entry?.loc) ? entry.loc : [];
    const field = loc.filter((part: unknown) => part !== "body").join(".");
    return { field, message: String(entry?.msg ?? "invalid value") };
  });
}

export class ApiClient {
  token: string | null = null;

  constructor(
    private baseUrl = "",
    private fetchImpl: typeof fetch = globalThis.fetch.bind(globalThis),
  ) {}

  private async request<T>(path: string, init: RequestInit = {}): Promise<T> {
    const headers: Record<string, string> = {
      "Content-Type": "application/json",
      ...(init.headers as Record<string, string> | undefined),
    };
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, { ...init, headers });
    const text = await response.text();
    const data = text ? JSON.parse(text) : null;
    if (!response.ok) {
      const detail = data?.detail;
      const message = typeof detail === "string" ? detail : `request failed (${response.status})`;
      throw new ApiError(response.status, message, parseFieldErrors(detail));
    }
    return data as T;
  }

  async login(code: string): Promise<LoginResponse> {
    const result = await this.request<LoginResponse>("/api/login", {
      method: "POST",
      body: JSON.stringify({ code }),
    });
    this.token = result.token;
    return result;
  }

  studyConfig(): Promise<StudyConfig> {
    return this.request<StudyConfig>("/api/study-config");
  }

  async tasks(annotatorId: string): Promise<TaskSummary[]> {
    const data = await this.request<{ tasks: TaskSummary[] }>(
      `/api/tasks?annotator=${encodeURIComponent(annotatorId)}`,
    );
    return data.tasks;
  }

  task(taskId: string): Promise<TaskDetail> {
    return this.request<TaskDetail>(`/api/tasks/${encodeURIComponent(taskId)}`);
  }

  submit(taskId: string, annotation: HumanAnnotation): Promise<{ task_id: string; status: string }> {
    return this.request(`/api/tasks/${encodeURIComponent(taskId)}/annotation`, {
      method: "POST",
      body: JSON.stringify(annotation),
    });
  }

  agreement(): Promise<Record<string, unknown>> {
    return this.request("/api/agreement");
  }

  health(): Promise<{ status: string }> {
    return this.request("/api/health");
  }
}
