// Typed client for the survey service JSON API. The UI talks to the service
// exclusively through this module; scales, labels, and candidate orders all
// come from the server payloads.

export interface QuestionOption {
  value: string;
  label: string;
  numeric: number | null;
}

export type QuestionKind = "single_choice" | "multi_choice" | "likert" | "text";

export interface Question {
  id: string;
  prompt: string;
  kind: QuestionKind;
  required: boolean;
  options: QuestionOption[];
}

export interface Candidate {
  key: string;
  text: string;
}

export interface RubricEntry {
  level: string;
  label: string;
  description: string;
}

export type PanelKind =
  | "lay_original"
  | "lay_simplified"
  | "lay_preference"
  | "expert_rating";

export interface SurveyItem {
  item_id: string;
  rater_id: string;
  panel: PanelKind;
  sentence_id: string;
  sentence_text: string;
  simplification_text: string | null;
  candidates: Candidate[] | null;
  severity_rubric: RubricEntry[] | null;
  questions: Question[];
  progress: { done: number; total: number };
}

export interface NextResponse {
  done: boolean;
  item: SurveyItem | null;
}

export type AnswerValue = string | number | string[];
export type Answers = Record<string, AnswerValue>;

export type SubmitStatus = "accepted" | "duplicate";

/** Server rejected the request; `detail` carries the service's error body. */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: unknown,
  ) {
    super(`API error ${status}: ${JSON.stringify(detail)}`);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class SurveyApi {
  constructor(
    private readonly baseUrl: string,
    private readonly studyId: string,
    private readonly raterToken: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private url(path: string): string {
    return `${this.baseUrl}/api/studies/${encodeURIComponent(this.studyId)}${path}`;
  }

  private async parse(response: Response): Promise<unknown> {
    const text = await response.text();
    let body: unknown = text;
    try {
      body = JSON.parse(text);
    } catch {
      // non-JSON error bodies stay as text
    }
    if (!response.ok) {
      throw new ApiError(response.status, (body as { detail?: unknown }).detail ?? body);
    }
    return body;
  }

  async nextItem(): Promise<NextResponse> {
    const response = await this.fetchImpl(
      this.url(`/next?rater=${encodeURIComponent(this.raterToken)}`),
    );
    return (await this.parse(response)) as NextResponse;
  }

  async submit(eventId: string, itemId: string, answers: Answers): Promise<SubmitStatus> {
    const response = await this.fetchImpl(this.url("/responses"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        event_id: eventId,
        rater: this.raterToken,
        item_id: itemId,
        answers,
        submitted_at: new Date().toISOString(),
      }),
    });
    const body = (await this.parse(response)) as { status: SubmitStatus };
    return body.status;
  }
}
