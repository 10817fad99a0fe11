// Thin REST wrapper over the service's mutating + query endpoints.
// Errors surface the server's detail verbatim so the UI can show the
// exact WrongSlot / ValidationFailed message.

import type { SearchHit } from "./types";

export class ServiceError extends Error {
  readonly status: number;
  readonly code: string;
  readonly violations: string[];
  readonly expected: string | null;

  constructor(status: number, detail: unknown) {
    const info = typeof detail === "object" && detail !== null ? (detail as Record<string, any>) : {};
    const code = info.error ?? (typeof detail === "string" ? detail : "ServiceError");
    super(info.message ?? (typeof detail === "string" ? detail : code));
    this.status = status;
    this.code = code;
    this.violations = info.violations ?? [];
    this.expected = info.expected ?? null;
  }
}

export class ServiceApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
    private readonly token: string | null = null,
  ) {}

  private headers(): Record<string, string> {
    const headers: Record<string, string> = { "content-type": "application/json" };
    if (this.token) headers["x-debatesim-token"] = this.token;
    return headers;
  }

  private async request(path: string, init?: RequestInit): Promise<any> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      throw new ServiceError(response.status, (body as any).detail ?? body);
    }
    return body;
  }

  async createRound(resolution: string, humans: string[] = []): Promise<string> {
    const body = await this.request("/rounds", {
      method: "POST",
      headers: this.headers(),
      body: JSON.stringify({ resolution, humans }),
    });
    return body.round_id as string;
  }

  async proposeTopic(resolution: string): Promise<string> {
    const body = await this.request("/topics", {
      method: "POST",
      headers: this.headers(),
      body: JSON.stringify({ resolution }),
    });
    return body.round_id as string;
  }

  async submitSpeech(roundId: string, item: string, content: unknown): Promise<void> {
    await this.request(`/rounds/${roundId}/speeches/${item}`, {
      method: "POST",
      headers: this.headers(),
      body: JSON.stringify({ content }),
    });
  }

  async searchEvidence(query: string, k = 10): Promise<SearchHit[]> {
    const body = await this.request(`/search?q=${encodeURIComponent(query)}&k=${k}`);
    return body.hits as SearchHit[];
  }

  async roundStatus(roundId: string): Promise<{ status: string; cursor_item: string | null }> {
    return this.request(`/rounds/${roundId}`);
  }
}
