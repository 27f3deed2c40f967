/**
 * Typed client for the erd-mentor HTTP API. All reads and writes go through
 * here; the workbench never talks to an LLM or touches diagram logic on its
 * own. Errors arrive as problem-details JSON ({code, message, detail}) and
 * surface as ApiError so the UI can show the documented code.
 */

export interface Project {
  id: string;
  title: string;
  requirements_id: string;
  members: string[];
  created_at: string;
}

export interface Violation {
  code: string;
  location: string;
  message: string;
}

export interface ParseErrorDetail {
  line: number;
  column: number;
  message: string;
  code: string;
}

export interface Submission {
  id: string;
  project_id: string;
  text: string;
  schema_json: string;
  spans: { kind: string; name: string; start: number; end: number }[];
  violations: Violation[];
  parent_id: string | null;
  created_at: string;
}

export interface SubmissionResult {
  submission: Submission;
  violations: Violation[];
}

export interface FaqEntry {
  question: string;
  answer: string;
}

export interface DiscussionMessage {
  id: string;
  feedback_id: string;
  author_role: "student" | "staff";
  body: string;
  created_at: string;
}

export interface FeedbackRecord {
  id: string;
  submission_id: string;
  relationship: string;
  relevant_requirement_ids: string[];
  feedback: string;
  faq: FaqEntry[];
  exchange_ids: string[];
  status: "ai_only" | "staff_flagged" | "discussed";
  warning: string | null;
  created_at: string;
  discussion?: DiscussionMessage[];
}

export interface History {
  submissions: Submission[];
  feedback: FeedbackRecord[];
  discussions: DiscussionMessage[];
}

export interface ProblemDetails {
  code: string;
  message: string;
  detail?: unknown;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly problem: ProblemDetails,
  ) {
    super(`${problem.code}: ${problem.message}`);
    this.name = "ApiError";
  }

  get parseErrors(): ParseErrorDetail[] {
    if (this.problem.code !== "parse_failed" || !Array.isArray(this.problem.detail)) {
      return [];
    }
    return this.problem.detail as ParseErrorDetail[];
  }
}

async function problemFrom(response: Response): Promise<ProblemDetails> {
  try {
    const body = (await response.json()) as ProblemDetails;
    if (body && typeof body.code === "string") return body;
  } catch {
    // fall through to the generic problem below
  }
  return { code: `http_${response.status}`, message: response.statusText || "request failed" };
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async requestJson<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) throw new ApiError(response.status, await problemFrom(response));
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.requestJson<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  createProject(requirements: unknown): Promise<Project> {
    return this.post("/projects", requirements);
  }

  getProject(projectId: string): Promise<Project> {
    return this.requestJson(`/projects/${projectId}`);
  }

  submitErd(projectId: string, text: string, parent?: string): Promise<SubmissionResult> {
    const body: { text: string; parent?: string } = { text };
    if (parent) body.parent = parent;
    return this.post(`/projects/${projectId}/submissions`, body);
  }

  relationships(submissionId: string): Promise<string[]> {
    return this.requestJson<{ relationships: string[] }>(
      `/submissions/${submissionId}/relationships`,
    ).then((body) => body.relationships);
  }

  async diagramDot(submissionId: string, relationship?: string): Promise<string> {
    const query = relationship ? `?relationship=${encodeURIComponent(relationship)}` : "";
    const response = await this.fetchFn(
      `${this.baseUrl}/submissions/${submissionId}/diagram.dot${query}`,
    );
    if (!response.ok) throw new ApiError(response.status, await problemFrom(response));
    return response.text();
  }

  requestFeedback(submissionId: string, relationship: string): Promise<FeedbackRecord> {
    return this.post(`/submissions/${submissionId}/feedback`, { relationship });
  }

  getFeedback(feedbackId: string): Promise<FeedbackRecord & { discussion: DiscussionMessage[] }> {
    return this.requestJson(`/feedback/${feedbackId}`);
  }

  postDiscussion(
    feedbackId: string,
    role: "student" | "staff",
    body: string,
  ): Promise<DiscussionMessage> {
    return this.post(`/feedback/${feedbackId}/discussion`, { role, body });
  }

  history(projectId: string): Promise<History> {
    return this.requestJson(`/projects/${projectId}/history`);
  }
}
