// Session controller: fetch next item, render, validate locally, submit
// with the draft's idempotency key, advance. Answers live in the draft
// store from the first keystroke, so reloads resume mid-panel, and a
// network failure shows a retry banner without losing anything.

import { ApiError, SurveyApi } from "./api.js";
import type { Answers, Question, SurveyItem } from "./api.js";
import { DraftStore } from "./drafts.js";
import type { Draft } from "./drafts.js";
import { renderDone, renderFatal, renderItem, showValidation } from "./render.js";

export type FlowState = "loading" | "item" | "done" | "fatal";

export function firstInvalid(
  questions: Question[],
  answers: Answers,
): { questionId: string; message: string } | null {
  for (const question of questions) {
    const value = answers[question.id];
    if (question.kind === "multi_choice") {
      if (!Array.isArray(value) || value.length === 0) {
        return { questionId: question.id, message: "Select at least one option." };
      }
    } else if (question.required && (value === undefined || value === "")) {
      return { questionId: question.id, message: "An answer is required." };
    }
  }
  return null;
}

export class SessionFlow {
  state: FlowState = "loading";
  current: SurveyItem | null = null;
  private draft: Draft | null = null;

  constructor(
    private readonly api: SurveyApi,
    private readonly drafts: DraftStore,
    private readonly doc: Document,
    private readonly root: HTMLElement,
    private readonly banner: HTMLElement,
  ) {}

  async start(): Promise<void> {
    await this.advance();
  }

  private setBanner(message: string, retry: boolean): void {
    this.banner.textContent = "";
    if (!message) return;
    const text = this.doc.createElement("span");
    text.textContent = message;
    this.banner.appendChild(text);
    if (retry) {
      const button = this.doc.createElement("button");
      button.textContent = "Retry";
      button.className = "retry";
      button.addEventListener("click", () => {
        void this.retry();
      });
      this.banner.appendChild(button);
    }
  }

  private handleFailure(error: unknown, context: string): void {
    if (error instanceof ApiError) {
      if (error.status === 403) {
        this.state = "fatal";
        renderFatal(
          this.doc,
          this.root,
          "This rater link is not valid for the study. Check the URL you were sent.",
        );
        return;
      }
      this.setBanner(`The server rejected the ${context} (${error.status}). Retrying may help.`, true);
      return;
    }
    // network-level failure: keep everything, offer retry
    this.setBanner("Connection problem. Your answers are saved on this device.", true);
  }

  async retry(): Promise<void> {
    this.setBanner("", false);
    if (this.state === "item" && this.current) {
      await this.submitCurrent();
    } else {
      await this.advance();
    }
  }

  private async advance(): Promise<void> {
    this.state = "loading";
    let next;
    try {
      next = await this.api.nextItem();
    } catch (error) {
      this.handleFailure(error, "item request");
      return;
    }
    this.setBanner("", false);
    if (next.done || next.item === null) {
      this.state = "done";
      this.current = null;
      renderDone(this.doc, this.root);
      return;
    }
    this.current = next.item;
    this.draft = this.drafts.open(next.item.item_id);
    this.state = "item";
    this.renderCurrent();
  }

  private renderCurrent(): void {
    if (!this.current || !this.draft) return;
    renderItem(this.doc, this.root, this.current, this.draft, {
      onAnswer: (questionId, value) => {
        if (!this.current || !this.draft) return;
        this.draft = this.drafts.setAnswer(this.current.item_id, this.draft, questionId, value);
      },
      onSubmit: () => {
        void this.submitCurrent();
      },
    });
  }

  async submitCurrent(): Promise<void> {
    if (!this.current || !this.draft) return;
    const item = this.current;
    const answers: Answers = {};
    for (const question of item.questions) {
      const value = this.draft.answers[question.id];
      if (value !== undefined) answers[question.id] = value;
    }
    const invalid = firstInvalid(item.questions, answers);
    if (invalid) {
      showValidation(this.root, invalid.questionId, invalid.message);
      return;
    }
    try {
      await this.api.submit(this.draft.eventId, item.item_id, answers);
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        // session got ahead of us (another tab, or a resend after an ack
        // we never saw): resynchronize on the server's view
        this.drafts.clear(item.item_id);
        await this.advance();
        return;
      }
      if (error instanceof ApiError && error.status === 422) {
        const detail = error.detail as { field?: string; message?: string };
        showValidation(
          this.root,
          detail.field ?? item.questions[0]?.id ?? "",
          detail.message ?? "The server rejected this answer.",
        );
        return;
      }
      this.handleFailure(error, "submission");
      return;
    }
    this.drafts.clear(item.item_id);
    this.draft = null;
    await this.advance();
  }
}
