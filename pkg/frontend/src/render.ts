// DOM rendering for one survey item. Option labels and their order come
// straight from the served question payload; nothing about the scales is
// hardcoded here.

import type { Answers, Question, SurveyItem } from "./api.js";
import type { Draft } from "./drafts.js";

export interface RenderHandlers {
  onAnswer(questionId: string, value: Answers[string]): void;
  onSubmit(): void;
}

const PANEL_TITLES: Record<string, string> = {
  lay_original: "About the original sentence",
  lay_simplified: "With the simplification shown",
  lay_preference: "Compare the simplifications",
  expert_rating: "Rate this simplification",
};

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderRubric(doc: Document, item: SurveyItem): HTMLElement | null {
  if (!item.severity_rubric || item.severity_rubric.length === 0) return null;
  const details = el(doc, "details", "rubric");
  details.appendChild(el(doc, "summary", undefined, "What the severity levels mean"));
  const list = el(doc, "dl");
  for (const entry of item.severity_rubric) {
    list.appendChild(el(doc, "dt", undefined, entry.label));
    list.appendChild(el(doc, "dd", undefined, entry.description));
  }
  details.appendChild(list);
  return details;
}

function renderChoices(
  doc: Document,
  question: Question,
  current: Answers[string] | undefined,
  handlers: RenderHandlers,
): HTMLElement {
  const group = el(doc, "div", "options");
  const multi = question.kind === "multi_choice";
  const selected = new Set(
    multi && Array.isArray(current) ? current : current !== undefined ? [String(current)] : [],
  );
  for (const option of question.options) {
    const label = el(doc, "label", "option");
    const input = doc.createElement("input");
    input.type = multi ? "checkbox" : "radio";
    input.name = question.id;
    input.value = option.value;
    input.checked = selected.has(option.value);
    input.addEventListener("change", () => {
      if (multi) {
        const boxes = group.querySelectorAll<HTMLInputElement>("input:checked");
        handlers.onAnswer(
          question.id,
          Array.from(boxes).map((box) => box.value),
        );
      } else if (question.kind === "likert") {
        handlers.onAnswer(question.id, Number.parseInt(option.value, 10));
      } else {
        handlers.onAnswer(question.id, option.value);
      }
    });
    label.appendChild(input);
    label.appendChild(el(doc, "span", undefined, option.label));
    group.appendChild(label);
  }
  return group;
}

function renderQuestion(
  doc: Document,
  question: Question,
  current: Answers[string] | undefined,
  handlers: RenderHandlers,
): HTMLElement {
  const block = el(doc, "fieldset", "question");
  block.dataset.questionId = question.id;
  const legend = el(doc, "legend", undefined, question.prompt);
  if (!question.required) legend.appendChild(el(doc, "span", "optional", " (optional)"));
  block.appendChild(legend);
  if (question.kind === "text") {
    const area = doc.createElement("textarea");
    area.rows = 3;
    area.value = typeof current === "string" ? current : "";
    area.addEventListener("input", () => handlers.onAnswer(question.id, area.value));
    block.appendChild(area);
  } else {
    block.appendChild(renderChoices(doc, question, current, handlers));
  }
  block.appendChild(el(doc, "p", "validation"));
  return block;
}

export function renderItem(
  doc: Document,
  root: HTMLElement,
  item: SurveyItem,
  draft: Draft,
  handlers: RenderHandlers,
): void {
  root.textContent = "";
  const header = el(doc, "header");
  header.appendChild(el(doc, "h2", undefined, PANEL_TITLES[item.panel] ?? item.panel));
  header.appendChild(
    el(
      doc,
      "p",
      "progress",
      `Item ${item.progress.done + 1} of ${item.progress.total}`,
    ),
  );
  root.appendChild(header);

  const sentence = el(doc, "blockquote", "sentence");
  sentence.appendChild(el(doc, "p", undefined, item.sentence_text));
  root.appendChild(sentence);

  if (item.simplification_text) {
    const simplification = el(doc, "blockquote", "simplification");
    simplification.appendChild(el(doc, "h3", undefined, "Simplification"));
    simplification.appendChild(el(doc, "p", undefined, item.simplification_text));
    root.appendChild(simplification);
  }

  if (item.candidates) {
    const list = el(doc, "ol", "candidates");
    for (const candidate of item.candidates) {
      const entry = el(doc, "li");
      entry.appendChild(el(doc, "strong", undefined, `Simplification ${candidate.key}: `));
      entry.appendChild(el(doc, "span", undefined, candidate.text));
      list.appendChild(entry);
    }
    root.appendChild(list);
  }

  const form = el(doc, "form");
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    handlers.onSubmit();
  });
  for (const question of item.questions) {
    form.appendChild(renderQuestion(doc, question, draft.answers[question.id], handlers));
    if (question.id === "q3" || question.id === "severity") {
      const rubric = renderRubric(doc, item);
      if (rubric) form.appendChild(rubric);
    }
  }
  const submit = el(doc, "button", "submit", "Submit and continue");
  submit.type = "submit";
  form.appendChild(submit);
  root.appendChild(form);
}

export function showValidation(root: HTMLElement, questionId: string, message: string): void {
  const blocks = root.querySelectorAll<HTMLElement>(".question");
  for (const block of Array.from(blocks)) {
    const slot = block.querySelector<HTMLElement>(".validation");
    if (!slot) continue;
    slot.textContent = block.dataset.questionId === questionId ? message : "";
  }
}

export function renderDone(doc: Document, root: HTMLElement): void {
  root.textContent = "";
  root.appendChild(el(doc, "h2", undefined, "All done"));
  root.appendChild(
    el(doc, "p", undefined, "Every item is answered. Thank you for participating!"),
  );
}

export function renderFatal(doc: Document, root: HTMLElement, message: string): void {
  root.textContent = "";
  root.appendChild(el(doc, "h2", "error", "Cannot load the survey"));
  root.appendChild(el(doc, "p", undefined, message));
}
