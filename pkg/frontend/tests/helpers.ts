// Test scaffolding: a headless page (happy-dom), a spec-compliant in-memory
// Storage that survives simulated reloads, and DOM driving utilities.

import { Window } from "happy-dom";

import { SurveyApi } from "../src/api.js";
import type { FetchLike, SurveyItem } from "../src/api.js";
import { DraftStore } from "../src/drafts.js";
import { SessionFlow } from "../src/flow.js";

export class MemoryStorage implements Storage {
  private map = new Map<string, string>();

  get length(): number {
    return this.map.size;
  }

  clear(): void {
    this.map.clear();
  }

  getItem(key: string): string | null {
    return this.map.has(key) ? this.map.get(key)! : null;
  }

  key(index: number): string | null {
    return Array.from(this.map.keys())[index] ?? null;
  }

  removeItem(key: string): void {
    this.map.delete(key);
  }

  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }
}

export interface Page {
  window: Window;
  doc: Document;
  root: HTMLElement;
  banner: HTMLElement;
  flow: SessionFlow;
}

export function openPage(
  baseUrl: string,
  studyId: string,
  raterToken: string,
  storage: Storage,
  fetchImpl: FetchLike,
): Page {
  const window = new Window({ url: `${baseUrl}/?study=${studyId}&rater=${raterToken}` });
  const doc = window.document as unknown as Document;
  doc.body.innerHTML = '<div id="banner"></div><main id="app"></main>';
  const root = doc.getElementById("app") as HTMLElement;
  const banner = doc.getElementById("banner") as HTMLElement;
  const api = new SurveyApi(baseUrl, studyId, raterToken, fetchImpl);
  const drafts = new DraftStore(storage, `${studyId}:${raterToken}`);
  const flow = new SessionFlow(api, drafts, doc, root, banner);
  return { window, doc, root, banner, flow };
}

export async function until(predicate: () => boolean, timeoutMs = 10_000): Promise<void> {
  const start = Date.now();
  while (!predicate()) {
    if (Date.now() - start > timeoutMs) {
      throw new Error("condition not met in time");
    }
    await new Promise((resolve) => setTimeout(resolve, 20));
  }
}

export function chooseOption(page: Page, questionId: string, value: string): void {
  const input = page.root.querySelector<HTMLInputElement>(
    `.question[data-question-id="${questionId}"] input[value="${value}"]`,
  );
  if (!input) throw new Error(`no option ${value} for question ${questionId}`);
  input.checked = true;
  input.dispatchEvent(new (page.window as any).Event("change", { bubbles: true }));
}

export function typeText(page: Page, questionId: string, text: string): void {
  const area = page.root.querySelector<HTMLTextAreaElement>(
    `.question[data-question-id="${questionId}"] textarea`,
  );
  if (!area) throw new Error(`no textarea for question ${questionId}`);
  area.value = text;
  area.dispatchEvent(new (page.window as any).Event("input", { bubbles: true }));
}

export function submitForm(page: Page): void {
  const form = page.root.querySelector("form");
  if (!form) throw new Error("no form rendered");
  form.dispatchEvent(
    new (page.window as any).Event("submit", { bubbles: true, cancelable: true }),
  );
}

export function validationMessage(page: Page, questionId: string): string {
  const slot = page.root.querySelector<HTMLElement>(
    `.question[data-question-id="${questionId}"] .validation`,
  );
  return slot?.textContent ?? "";
}

export async function waitForItem(page: Page, previousItemId?: string): Promise<SurveyItem> {
  await until(
    () =>
      (page.flow.state === "item" && page.flow.current?.item_id !== previousItemId) ||
      page.flow.state === "done",
  );
  if (page.flow.state === "done") {
    throw new Error("flow finished while an item was expected");
  }
  return page.flow.current!;
}
