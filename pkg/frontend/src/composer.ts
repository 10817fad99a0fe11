// Human speech composer: a draft, an evidence search panel, and a
// submit that reports the service's validation verdict verbatim.

import { ServiceApi, ServiceError } from "./api";
import type { SearchHit } from "./types";

export class Composer {
  draft = "";
  searchHits: SearchHit[] = [];
  lastQuery = "";
  error: string | null = null;
  submitted = false;

  constructor(
    private readonly api: ServiceApi,
    readonly roundId: string,
    readonly item: string,
  ) {}

  async search(query: string): Promise<SearchHit[]> {
    this.lastQuery = query;
    this.searchHits = await this.api.searchEvidence(query);
    return this.searchHits;
  }

  /** Post the draft; returns true when the service accepts it. */
  async submit(): Promise<boolean> {
    this.error = null;
    const content = this.item.startsWith("CX-")
      ? parseExchanges(this.draft)
      : { text: this.draft };
    try {
      await this.api.submitSpeech(this.roundId, this.item, content);
    } catch (err) {
      if (err instanceof ServiceError) {
        this.error =
          err.violations.length > 0
            ? `${err.code}: ${err.violations.join("; ")}`
            : err.expected
              ? `${err.code}: round awaits ${err.expected}`
              : err.code;
        return false;
      }
      throw err;
    }
    this.submitted = true;
    return true;
  }
}

// CX drafts alternate question/answer lines; blank lines are ignored.
export function parseExchanges(draft: string): { exchanges: [string, string][] } {
  const lines = draft
    .split("\n")
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
  const exchanges: [string, string][] = [];
  for (let i = 0; i + 1 < lines.length; i += 2) {
    exchanges.push([lines[i]!, lines[i + 1]!]);
  }
  return { exchanges };
}
