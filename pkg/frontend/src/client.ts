// Event-stream consumer with resume: on any connection loss it
// reconnects at last-seen-sequence + 1, so the view model never sees a
// gap or a duplicate no matter how often the link drops.

import { SseParser } from "./sse";
import type { ConnectionStatus, RoundEvent } from "./types";

export interface StreamOptions {
  baseUrl: string;
  roundId: string;
  fromSequence?: number;
  fetchImpl?: typeof fetch;
  onEvent: (event: RoundEvent) => void;
  onStatus?: (status: ConnectionStatus) => void;
  backoffMs?: number;
  maxBackoffMs?: number;
  maxAttempts?: number; // safety valve for tests; 0 = unlimited
}

const TERMINAL_KINDS = new Set(["decision", "failed"]);

export class EventStreamClient {
  lastSequence: number;
  private stopped = false;
  private readonly options: StreamOptions;

  constructor(options: StreamOptions) {
    this.options = options;
    this.lastSequence = Math.max(0, (options.fromSequence ?? 1) - 1);
  }

  stop(): void {
    this.stopped = true;
  }

  private status(status: ConnectionStatus): void {
    this.options.onStatus?.(status);
  }

  async run(): Promise<void> {
    const fetchImpl = this.options.fetchImpl ?? fetch;
    let backoff = this.options.backoffMs ?? 500;
    const maxBackoff = this.options.maxBackoffMs ?? 15000;
    let attempts = 0;
    let sawTerminal = false;

    while (!this.stopped && !sawTerminal) {
      attempts += 1;
      if (this.options.maxAttempts && attempts > this.options.maxAttempts) {
        this.status("lost");
        return;
      }
      this.status("connecting");
      const url =
        `${this.options.baseUrl}/rounds/${this.options.roundId}/events` +
        `?from_sequence=${this.lastSequence + 1}`;
      try {
        const response = await fetchImpl(url, { headers: { accept: "text/event-stream" } });
        if (!response.ok || !response.body) {
          throw new Error(`stream returned ${response.status}`);
        }
        this.status("live");
        backoff = this.options.backoffMs ?? 500;
        const reader = response.body.getReader();
        const decoder = new TextDecoder();
        const parser = new SseParser();
        for (;;) {
          const { done, value } = await reader.read();
          if (done) break;
          for (const message of parser.push(decoder.decode(value, { stream: true }))) {
            const event = JSON.parse(message.data) as RoundEvent;
            if (event.sequence <= this.lastSequence) continue; // replay overlap
            this.lastSequence = event.sequence;
            this.options.onEvent(event);
            if (TERMINAL_KINDS.has(event.kind)) sawTerminal = true;
          }
          if (this.stopped) {
            await reader.cancel().catch(() => undefined);
            break;
          }
        }
        if (sawTerminal || this.stopped) break;
        // server ended the stream without a terminal event: reconnect
      } catch (err) {
        if (this.stopped) break;
        this.status("lost");
      }
      await sleep(backoff);
      backoff = Math.min(backoff * 2, maxBackoff);
    }
    this.status("closed");
  }
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
