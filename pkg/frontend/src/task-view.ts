/** Task view: renders the normalized text with inline span highlights, a
 * coarse-then-fine selector, keyboard shortcuts, and a render-to-submit
 * timer. Refuses to render payloads that violate the hiding contract.
 */

import {
  COARSE_SHORTCUTS,
  coarseOf,
  fineOptionsFor,
  shortcutKey,
  type LabelKind,
} from "./taxonomy.js";
import type { CoarseCode, TaskPayload, TaskSpan, Taxonomy } from "./types.js";

export interface SubmissionDraft {
  task_id: string;
  coarse: CoarseCode;
  fine: string;
  elapsed_ms: number;
}

export interface TaskViewOptions {
  kind?: LabelKind;
  /** Injectable clock for tests; defaults to performance.now. */
  now?: () => number;
  onSubmit: (draft: SubmissionDraft) => void;
}

export class ContractViolationError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ContractViolationError";
  }
}

interface HighlightSegment {
  text: string;
  span: TaskSpan | null;
}

/** Split the text into plain and highlighted segments by locating each span
 * at its first exact occurrence. Unlocatable spans are returned separately —
 * they are shown in a side list, never dropped.
 */
export function segmentText(
  text: string,
  spans: TaskSpan[],
): { segments: HighlightSegment[]; unlocatable: TaskSpan[] } {
  const located: Array<{ start: number; end: number; span: TaskSpan }> = [];
  const unlocatable: TaskSpan[] = [];
  for (const span of spans) {
    const start = span.span.length > 0 ? text.indexOf(span.span) : -1;
    const end = start + span.span.length;
    const overlaps = located.some((l) => start < l.end && end > l.start);
    if (start < 0 || overlaps) {
      unlocatable.push(span);
    } else {
      located.push({ start, end, span });
    }
  }
  located.sort((a, b) => a.start - b.start);

  const segments: HighlightSegment[] = [];
  let cursor = 0;
  for (const { start, end, span } of located) {
    if (start > cursor) {
      segments.push({ text: text.slice(cursor, start), span: null });
    }
    segments.push({ text: text.slice(start, end), span });
    cursor = end;
  }
  if (cursor < text.length) {
    segments.push({ text: text.slice(cursor), span: null });
  }
  return { segments, unlocatable };
}

/** Reject payloads that carry fields the annotator must never see. */
export function assertHidingContract(payload: TaskPayload): void {
  const record = payload as unknown as Record<string, unknown>;
  for (const key of Object.keys(record)) {
    if (key.toLowerCase().includes("global")) {
      throw new ContractViolationError(
        `task payload contains a forbidden field: ${key}`,
      );
    }
  }
  const expected = new Set(["task_id", "text", "spans"]);
  for (const key of Object.keys(record)) {
    if (!expected.has(key)) {
      throw new ContractViolationError(`unexpected task payload field: ${key}`);
    }
  }
}

export class TaskView {
  private readonly container: HTMLElement;
  private readonly taxonomy: Taxonomy;
  private readonly options: TaskViewOptions;
  private readonly now: () => number;

  private task: TaskPayload | null = null;
  private renderedAt = 0;
  private selectedCoarse: CoarseCode | null = null;
  private selectedFine: string | null = null;
  private keyHandler: ((event: KeyboardEvent) => void) | null = null;

  constructor(container: HTMLElement, taxonomy: Taxonomy, options: TaskViewOptions) {
    this.container = container;
    this.taxonomy = taxonomy;
    this.options = options;
    this.now = options.now ?? (() => performance.now());
  }

  render(task: TaskPayload): void {
    assertHidingContract(task);
    this.detachKeyboard();
    this.task = task;
    this.selectedCoarse = null;
    this.selectedFine = null;
    this.renderedAt = this.now();

    const { segments, unlocatable } = segmentText(task.text, task.spans);

    this.container.innerHTML = "";
    const root = document.createElement("div");
    root.className = "task-view";
    root.setAttribute("data-task-id", task.task_id);

    const textEl = document.createElement("p");
    textEl.className = "task-text";
    for (const segment of segments) {
      if (segment.span === null) {
        textEl.appendChild(document.createTextNode(segment.text));
        continue;
      }
      const mark = document.createElement("mark");
      mark.className = "span-highlight";
      mark.textContent = segment.text;
      const badge = document.createElement("span");
      badge.className = "span-badge";
      badge.textContent = segment.span.local_label;
      mark.appendChild(badge);
      if (segment.span.explanation) {
        mark.title = segment.span.explanation;
      }
      textEl.appendChild(mark);
    }
    root.appendChild(textEl);

    if (unlocatable.length > 0) {
      const aside = document.createElement("ul");
      aside.className = "unlocatable-spans";
      for (const span of unlocatable) {
        const item = document.createElement("li");
        item.textContent = `${span.span} — ${span.local_label}`;
        if (span.explanation) {
          item.title = span.explanation;
        }
        aside.appendChild(item);
      }
      root.appendChild(aside);
    }

    root.appendChild(this.buildCoarseSelector());
    const finePanel = document.createElement("div");
    finePanel.className = "fine-panel";
    root.appendChild(finePanel);

    const submitBtn = document.createElement("button");
    submitBtn.className = "submit-button";
    submitBtn.textContent = "Submit";
    submitBtn.disabled = true;
    submitBtn.addEventListener("click", () => this.submit());
    root.appendChild(submitBtn);

    this.container.appendChild(root);
    this.attachKeyboard();
  }

  private buildCoarseSelector(): HTMLElement {
    const group = document.createElement("div");
    group.className = "coarse-selector";
    for (const category of this.taxonomy.categories) {
      const button = document.createElement("button");
      button.className = "coarse-option";
      button.setAttribute("data-coarse", category.code);
      button.textContent = `${category.code} — ${category.title}`;
      button.title = category.description;
      button.addEventListener("click", () => this.selectCoarse(category.code));
      group.appendChild(button);
    }
    return group;
  }

  selectCoarse(code: CoarseCode): void {
    this.selectedCoarse = code;
    this.selectedFine = null;
    for (const button of this.container.querySelectorAll<HTMLButtonElement>(".coarse-option")) {
      button.classList.toggle("selected", button.getAttribute("data-coarse") === code);
    }
    this.renderFineOptions(code);
    this.updateSubmitState();
  }

  private renderFineOptions(code: CoarseCode): void {
    const panel = this.container.querySelector<HTMLElement>(".fine-panel");
    if (!panel) return;
    panel.innerHTML = "";
    const options = fineOptionsFor(this.taxonomy, code, this.options.kind ?? "split");
    options.forEach((label, index) => {
      const button = document.createElement("button");
      button.className = "fine-option";
      button.setAttribute("data-fine", label.id);
      button.title = label.definition;
      button.textContent = `${shortcutKey(index)}) ${label.id}`;
      button.addEventListener("click", () => this.selectFine(label.id));
      panel.appendChild(button);
    });
  }

  selectFine(fineId: string): void {
    // defense in depth: the panel only offers in-group labels, but a stale
    // click must not slip a cross-category label through
    if (coarseOf(this.taxonomy, fineId) !== this.selectedCoarse) return;
    this.selectedFine = fineId;
    for (const button of this.container.querySelectorAll<HTMLButtonElement>(".fine-option")) {
      button.classList.toggle("selected", button.getAttribute("data-fine") === fineId);
    }
    this.updateSubmitState();
  }

  private updateSubmitState(): void {
    const submitBtn = this.container.querySelector<HTMLButtonElement>(".submit-button");
    if (submitBtn) {
      submitBtn.disabled = this.selectedCoarse === null || this.selectedFine === null;
    }
  }

  submit(): void {
    if (!this.task || this.selectedCoarse === null || this.selectedFine === null) {
      return;
    }
    const elapsed = Math.max(0, Math.round(this.now() - this.renderedAt));
    this.options.onSubmit({
      task_id: this.task.task_id,
      coarse: this.selectedCoarse,
      fine: this.selectedFine,
      elapsed_ms: elapsed,
    });
  }

  private attachKeyboard(): void {
    this.keyHandler = (event: KeyboardEvent) => {
      const coarse = COARSE_SHORTCUTS[event.key];
      if (coarse) {
        this.selectCoarse(coarse);
        return;
      }
      if (this.selectedCoarse && /^[a-z]$/.test(event.key)) {
        const options = fineOptionsFor(
          this.taxonomy,
          this.selectedCoarse,
          this.options.kind ?? "split",
        );
        const index = event.key.charCodeAt(0) - "a".charCodeAt(0);
        const option = options[index];
        if (option) {
          this.selectFine(option.id);
        }
        return;
      }
      if (event.key === "Enter") {
        this.submit();
      }
    };
    document.addEventListener("keydown", this.keyHandler);
  }

  detachKeyboard(): void {
    if (this.keyHandler) {
      document.removeEventListener("keydown", this.keyHandler);
      this.keyHandler = null;
    }
  }
}
