/**
 * Workbench state machine: edit, submit, pick a relationship, read feedback,
 * discuss, resubmit. All data comes from the API; this module decides what
 * the panels show and when actions are allowed. The feedback panel is only
 * ever populated for the currently selected relationship of the current
 * submission, and at most one feedback request is in flight at a time
 * (mirroring the server's per-submission limit).
 */

import {
  ApiClient,
  ApiError,
  DiscussionMessage,
  FeedbackRecord,
  History,
  ParseErrorDetail,
  Project,
  Submission,
  Violation,
} from "./api.js";

export interface Notice {
  code: string;
  message: string;
}

export interface WorkbenchState {
  project: Project | null;
  submission: Submission | null;
  violations: Violation[];
  parseErrors: ParseErrorDetail[];
  relationships: string[];
  selected: string | null;
  diagramDot: string | null;
  feedback: FeedbackRecord | null;
  discussion: DiscussionMessage[];
  history: History | null;
  feedbackInFlight: boolean;
  notice: Notice | null;
}

function initialState(): WorkbenchState {
  return {
    project: null,
    submission: null,
    violations: [],
    parseErrors: [],
    relationships: [],
    selected: null,
    diagramDot: null,
    feedback: null,
    discussion: [],
    history: null,
    feedbackInFlight: false,
    notice: null,
  };
}

export class WorkbenchController {
  readonly state: WorkbenchState = initialState();
  private lastOperation: Promise<void> = Promise.resolve();

  constructor(
    private readonly api: ApiClient,
    private readonly onChange: (state: WorkbenchState) => void,
  ) {}

  /** Resolves when the most recently started operation has settled. */
  whenIdle(): Promise<void> {
    return this.lastOperation;
  }

  private emit(): void {
    this.onChange(this.state);
  }

  private track(work: () => Promise<void>): Promise<void> {
    const operation = work().catch((error: unknown) => {
      this.state.notice =
        error instanceof ApiError
          ? { code: error.problem.code, message: error.problem.message }
          : { code: "network_error", message: String(error) };
      this.emit();
    });
    this.lastOperation = operation;
    return operation;
  }

  openProject(requirements: unknown): Promise<void> {
    return this.track(async () => {
      const project = await this.api.createProject(requirements);
      Object.assign(this.state, initialState(), { project });
      this.emit();
    });
  }

  useProject(project: Project): void {
    Object.assign(this.state, initialState(), { project });
    this.emit();
  }

  editAndSubmit(text: string): Promise<void> {
    return this.track(async () => {
      const project = this.state.project;
      if (!project) throw new Error("no project open");
      this.state.notice = null;
      this.state.parseErrors = [];
      const parent = this.state.submission?.id;
      let result;
      try {
        result = await this.api.submitErd(project.id, text, parent);
      } catch (error) {
        if (error instanceof ApiError && error.problem.code === "parse_failed") {
          this.state.parseErrors = error.parseErrors;
          this.emit();
          return;
        }
        throw error;
      }
      this.state.submission = result.submission;
      this.state.violations = result.violations;
      // a new submission invalidates everything derived from the old one
      this.state.selected = null;
      this.state.feedback = null;
      this.state.discussion = [];
      this.state.relationships = await this.api.relationships(result.submission.id);
      this.state.diagramDot = await this.api.diagramDot(result.submission.id);
      this.state.history = await this.api.history(project.id);
      this.emit();
    });
  }

  selectRelationship(name: string | null): Promise<void> {
    return this.track(async () => {
      const submission = this.state.submission;
      if (!submission) throw new Error("nothing submitted yet");
      if (name !== null && !this.state.relationships.includes(name)) {
        this.state.selected = null;
        this.state.feedback = null;
        this.state.discussion = [];
        this.emit();
        return;
      }
      this.state.selected = name;
      this.state.feedback = null;
      this.state.discussion = [];
      this.state.notice = null;
      this.state.diagramDot = await this.api.diagramDot(submission.id, name ?? undefined);
      this.emit();
    });
  }

  requestFeedback(): Promise<void> {
    return this.track(async () => {
      const { submission, selected } = this.state;
      if (!submission || !selected || this.state.feedbackInFlight) return;
      this.state.feedbackInFlight = true;
      this.state.notice = null;
      this.emit();
      try {
        const record = await this.api.requestFeedback(submission.id, selected);
        this.state.feedback = record;
        this.state.discussion = record.discussion ?? [];
        this.state.history = this.state.project
          ? await this.api.history(this.state.project.id)
          : null;
      } finally {
        this.state.feedbackInFlight = false;
      }
      this.emit();
    });
  }

  postMessage(body: string, role: "student" | "staff" = "student"): Promise<void> {
    return this.track(async () => {
      const feedback = this.state.feedback;
      if (!feedback) throw new Error("no feedback to discuss");
      await this.api.postDiscussion(feedback.id, role, body);
      const refreshed = await this.api.getFeedback(feedback.id);
      this.state.feedback = refreshed;
      this.state.discussion = refreshed.discussion;
      this.emit();
    });
  }

  async refreshDiscussion(): Promise<void> {
    return this.track(async () => {
      const feedback = this.state.feedback;
      if (!feedback) return;
      const refreshed = await this.api.getFeedback(feedback.id);
      this.state.feedback = refreshed;
      this.state.discussion = refreshed.discussion;
      this.emit();
    });
  }
}
