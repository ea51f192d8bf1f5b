/** Typed client for the service JSON API.  The client holds no grading
 * logic: every mutation is a POST and the server's reply is the truth. */

import type {
  Arrangement,
  ApiErrorBody,
  ExecutionReport,
  GradeReport,
  HelpEffect,
  Representation,
  RenderedProblem,
  SessionStateDoc,
  SessionView,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface ProblemSummary {
  id: string;
  title: string;
  category: string;
  representations: Representation[];
}

async function parse<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let body: ApiErrorBody = { code: "Unknown", message: response.statusText };
    try {
      body = (await response.json()) as ApiErrorBody;
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(response.status, body.code, body.message);
  }
  if (response.status === 204) {
    return undefined as T;
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async get<T>(path: string): Promise<T> {
    return parse<T>(await this.fetchImpl(`${this.baseUrl}${path}`));
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    return parse<T>(
      await this.fetchImpl(`${this.baseUrl}${path}`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body ?? {}),
      }),
    );
  }

  listProblems(): Promise<ProblemSummary[]> {
    return this.get("/problems");
  }

  getProblem(
    id: string,
    rep: Representation,
    seed?: number,
  ): Promise<RenderedProblem> {
    const query = new URLSearchParams({ rep });
    if (seed !== undefined) query.set("seed", String(seed));
    return this.get(`/problems/${id}?${query}`);
  }

  createSession(
    learnerId: string,
    problemOrder: string[],
    representation: Representation = "Parsons2D",
  ): Promise<SessionView & { session_id: string }> {
    return this.post("/sessions", {
      learner_id: learnerId,
      problem_order: problemOrder,
      representation,
    });
  }

  getSession(id: string): Promise<SessionView> {
    return this.get(`/sessions/${id}`);
  }

  submitArrangement(
    id: string,
    arrangement: Arrangement,
  ): Promise<{ report: GradeReport; state: SessionStateDoc }> {
    return this.post(`/sessions/${id}/arrangement`, { arrangement });
  }

  runArrangement(
    id: string,
    arrangement: Arrangement,
  ): Promise<{ report: ExecutionReport; state: SessionStateDoc }> {
    return this.post(`/sessions/${id}/run`, { arrangement });
  }

  requestHelp(
    id: string,
    action: string,
  ): Promise<SessionView & { effect: HelpEffect }> {
    return this.post(`/sessions/${id}/help`, { action });
  }

  switchRepresentation(id: string, to: Representation): Promise<SessionView> {
    return this.post(`/sessions/${id}/representation`, { to });
  }

  pause(id: string): Promise<{ state: SessionStateDoc }> {
    return this.post(`/sessions/${id}/pause`, {});
  }

  resume(id: string): Promise<{ state: SessionStateDoc }> {
    return this.post(`/sessions/${id}/resume`, {});
  }

  giveUp(id: string): Promise<{ state: SessionStateDoc }> {
    return this.post(`/sessions/${id}/give-up`, {});
  }

  nextProblem(id: string): Promise<SessionView> {
    return this.post(`/sessions/${id}/next`, {});
  }

  recordPaas(id: string, rating: number, problemId?: string): Promise<void> {
    return this.post(`/sessions/${id}/paas`, {
      rating,
      ...(problemId ? { problem_id: problemId } : {}),
    });
  }

  submitQuestionnaire(
    id: string,
    items: Record<number, number>,
    freeText: Record<number, string> = {},
  ): Promise<void> {
    return this.post(`/sessions/${id}/questionnaire`, {
      items,
      free_text: freeText,
    });
  }
}
