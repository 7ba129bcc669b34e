/** Typed client for the registry HTTP API. The UI holds no state the
 * server does not confirm: every mutation is a round trip. */

import type { LeaderboardRow, ModelCard, SortKey } from "./model.js";

export interface SubmissionDoc {
  id: number;
  card: ModelCard;
  status: string;
  result: { mean_auc?: number; per_endpoint?: Record<string, number> } | null;
  review_decision: string | null;
  reviewer: string | null;
  review_note: string | null;
  timestamps: Record<string, string>;
}

/** Server-side rejection with the itemized problem list, when provided. */
export class ApiError extends Error {
  status: number;
  problems: string[];

  constructor(status: number, message: string, problems: string[] = []) {
    super(message);
    this.status = status;
    this.problems = problems;
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class RegistryClient {
  baseUrl: string;
  token: string | null;
  fetchImpl: FetchLike;

  constructor(baseUrl: string, token: string | null = null, fetchImpl: FetchLike = fetch) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.token = token;
    this.fetchImpl = fetchImpl;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) headers["X-Admin-Token"] = this.token;
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    let doc: unknown = null;
    try {
      doc = text ? JSON.parse(text) : null;
    } catch {
      doc = null;
    }
    if (!response.ok) {
      const error = (doc as { error?: { message?: string; problems?: string[] } })?.error;
      throw new ApiError(
        response.status,
        error?.message ?? `HTTP ${response.status}`,
        error?.problems ?? [],
      );
    }
    return doc as T;
  }

  async leaderboard(
    options: { status?: string; sort?: SortKey; dir?: "asc" | "desc"; q?: string } = {},
  ): Promise<LeaderboardRow[]> {
    const params = new URLSearchParams();
    if (options.status) params.set("status", options.status);
    if (options.sort) params.set("sort", options.sort);
    if (options.dir) params.set("dir", options.dir);
    if (options.q) params.set("q", options.q);
    const query = params.toString();
    const doc = await this.request<{ rows: LeaderboardRow[] }>(
      "GET",
      "/leaderboard" + (query ? `?${query}` : ""),
    );
    return doc.rows;
  }

  submission(id: number): Promise<SubmissionDoc> {
    return this.request("GET", `/submissions/${id}`);
  }

  submitCard(card: ModelCard): Promise<{ id: number; status: string }> {
    return this.request("POST", "/submissions", card);
  }

  review(id: number, decision: "approve" | "reject", reviewer: string, note = ""):
      Promise<SubmissionDoc> {
    return this.request("POST", `/submissions/${id}/review`, { decision, reviewer, note });
  }

  adminQueue(): Promise<LeaderboardRow[]> {
    return this.leaderboard({ status: "preliminary" });
  }
}
