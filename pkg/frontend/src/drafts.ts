// Local draft persistence keyed by item_id. The draft is the single source
// of truth while a panel is open, so a reload before acknowledgment loses
// nothing, and the event id minted with the draft makes retries idempotent.

import type { Answers } from "./api.js";

export interface Draft {
  eventId: string;
  answers: Answers;
}

function randomSuffix(): string {
  const cryptoObj = globalThis.crypto;
  if (cryptoObj && "randomUUID" in cryptoObj) {
    return cryptoObj.randomUUID();
  }
  return `${Date.now().toString(36)}-${Math.random().toString(36).slice(2, 10)}`;
}

export class DraftStore {
  constructor(
    private readonly storage: Storage,
    private readonly scope: string, // study:rater, keeps parallel sessions apart
  ) {}

  private key(itemId: string): string {
    return `radsimp:${this.scope}:${itemId}`;
  }

  load(itemId: string): Draft | null {
    const raw = this.storage.getItem(this.key(itemId));
    if (raw === null) return null;
    try {
      const parsed = JSON.parse(raw) as Draft;
      if (typeof parsed.eventId === "string" && parsed.answers !== undefined) {
        return parsed;
      }
    } catch {
      // fall through: treat unreadable drafts as absent
    }
    return null;
  }

  /** Existing draft for the item, or a fresh one persisted immediately. */
  open(itemId: string): Draft {
    const existing = this.load(itemId);
    if (existing) return existing;
    const draft: Draft = { eventId: `evt-${randomSuffix()}`, answers: {} };
    this.save(itemId, draft);
    return draft;
  }

  save(itemId: string, draft: Draft): void {
    this.storage.setItem(this.key(itemId), JSON.stringify(draft));
  }

  setAnswer(itemId: string, draft: Draft, questionId: string, value: Answers[string]): Draft {
    const updated: Draft = { ...draft, answers: { ...draft.answers, [questionId]: value } };
    this.save(itemId, updated);
    return updated;
  }

  clear(itemId: string): void {
    this.storage.removeItem(this.key(itemId));
  }
}
