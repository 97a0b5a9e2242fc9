/** Application flow: qualification first, then the annotate loop.
 *
 * One in-flight submission at a time; a failed submission keeps the draft
 * so it can be resubmitted. The server remains the source of truth for
 * timing and queue state.
 */

import { ApiClient, ApiError } from "./api.js";
import { TaskView, type SubmissionDraft } from "./task-view.js";
import type { Taxonomy } from "./types.js";

export interface AppConfig {
  baseUrl: string;
  annotatorId: string;
  kind?: "split" | "canonical";
}

export class App {
  private readonly api: ApiClient;
  private readonly config: AppConfig;
  private readonly root: HTMLElement;
  private taxonomy: Taxonomy | null = null;
  private taskView: TaskView | null = null;
  private pendingDraft: SubmissionDraft | null = null;
  private submitting = false;

  constructor(root: HTMLElement, config: AppConfig) {
    this.root = root;
    this.config = config;
    this.api = new ApiClient(config.baseUrl);
  }

  async start(): Promise<void> {
    this.taxonomy = await this.api.getTaxonomy();
    await this.renderQualification();
  }

  private async renderQualification(): Promise<void> {
    const { items } = await this.api.getQualification();
    this.root.innerHTML = "";
    const form = document.createElement("form");
    form.className = "qualification";

    const heading = document.createElement("h2");
    heading.textContent = "Qualification";
    form.appendChild(heading);

    const selects: HTMLSelectElement[] = [];
    for (const item of items) {
      const row = document.createElement("label");
      row.className = "qualification-item";
      const text = document.createElement("span");
      text.textContent = item.text;
      row.appendChild(text);
      const select = document.createElement("select");
      const placeholder = document.createElement("option");
      placeholder.value = "";
      placeholder.textContent = "choose a label";
      select.appendChild(placeholder);
      for (const label of this.taxonomy?.labels ?? []) {
        const option = document.createElement("option");
        option.value = label.id;
        option.textContent = label.id;
        select.appendChild(option);
      }
      row.appendChild(select);
      selects.push(select);
      form.appendChild(row);
    }

    const submit = document.createElement("button");
    submit.type = "submit";
    submit.textContent = "Submit answers";
    form.appendChild(submit);

    const status = document.createElement("p");
    status.className = "qualification-status";
    form.appendChild(status);

    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void (async () => {
        const answers = selects.map((s) => s.value);
        try {
          const result = await this.api.qualify(this.config.annotatorId, answers);
          if (result.passed) {
            await this.nextTask();
          } else {
            status.textContent =
              `Not passed (score ${(result.score * 100).toFixed(0)}%). You may retake.`;
          }
        } catch (error) {
          status.textContent = this.describeError(error);
        }
      })();
    });

    this.root.appendChild(form);
  }

  private async nextTask(): Promise<void> {
    if (!this.taxonomy) return;
    let task;
    try {
      task = await this.api.nextTask(this.config.annotatorId);
    } catch (error) {
      if (error instanceof ApiError && error.code === "queue-exhausted") {
        this.renderDone();
        return;
      }
      this.renderError(this.describeError(error), () => void this.nextTask());
      return;
    }
    this.taskView?.detachKeyboard();
    this.taskView = new TaskView(this.root, this.taxonomy, {
      kind: this.config.kind ?? "split",
      onSubmit: (draft) => void this.submit(draft),
    });
    this.taskView.render(task);
  }

  private async submit(draft: SubmissionDraft): Promise<void> {
    if (this.submitting) return;
    this.submitting = true;
    this.pendingDraft = draft;
    try {
      await this.api.submitAnnotation({
        task_id: draft.task_id,
        annotator_id: this.config.annotatorId,
        coarse: draft.coarse,
        fine: draft.fine,
        elapsed_ms: draft.elapsed_ms,
      });
      this.pendingDraft = null;
      await this.nextTask();
    } catch (error) {
      // the draft is retained; a retry resubmits the same selections
      this.renderError(this.describeError(error), () => {
        if (this.pendingDraft) void this.submit(this.pendingDraft);
      });
    } finally {
      this.submitting = false;
    }
  }

  private renderDone(): void {
    this.taskView?.detachKeyboard();
    this.root.innerHTML = "";
    const message = document.createElement("p");
    message.className = "queue-done";
    message.textContent = "All assigned tasks are complete. Thank you.";
    this.root.appendChild(message);
  }

  private renderError(message: string, retry: () => void): void {
    const banner = document.createElement("div");
    banner.className = "error-banner";
    const text = document.createElement("span");
    text.textContent = message;
    banner.appendChild(text);
    const button = document.createElement("button");
    button.textContent = "Retry";
    button.addEventListener("click", () => {
      banner.remove();
      retry();
    });
    banner.appendChild(button);
    this.root.prepend(banner);
  }

  private describeError(error: unknown): string {
    if (error instanceof ApiError) {
      return `${error.code}: ${error.message}`;
    }
    return error instanceof Error ? error.message : String(error);
  }
}
