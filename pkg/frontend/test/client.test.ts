// Stream client: reconnect with sequence resume, no gaps or duplicates.

import { describe, expect, it } from "vitest";

import { EventStreamClient } from "../src/client";
import type { ConnectionStatus, RoundEvent } from "../src/types";
import { fixtureEvents, sseBody } from "./helpers";

const events = fixtureEvents("round_ai.events.ndjson");

function streamResponse(body: string, failAtEnd = false): Response {
  const encoder = new TextEncoder();
  // uneven chunks exercise the incremental parser; pull() delivery lets
  // the reader drain everything before a simulated connection error
  const step = 700;
  let offset = 0;
  const stream = new ReadableStream<Uint8Array>({
    pull(controller) {
      if (offset < body.length) {
        controller.enqueue(encoder.encode(body.slice(offset, offset + step)));
        offset += step;
      } else if (failAtEnd) {
        controller.error(new Error("connection dropped"));
      } else {
        controller.close();
      }
    },
  });
  return new Response(stream, { status: 200 });
}

function fromSequenceOf(url: string): number {
  return Number(new URL(url, "http://mock").searchParams.get("from_sequence"));
}

describe("EventStreamClient", () => {
  it("receives a whole closed stream once", async () => {
    const received: RoundEvent[] = [];
    const fetchImpl = (async (url: any) => {
      expect(fromSequenceOf(String(url))).toBe(1);
      return streamResponse(sseBody(events));
    }) as typeof fetch;
    const client = new EventStreamClient({
      baseUrl: "http://mock",
      roundId: "r",
      onEvent: (event) => received.push(event),
      fetchImpl,
      backoffMs: 1,
    });
    await client.run();
    expect(received.map((e) => e.sequence)).toEqual(events.map((e) => e.sequence));
  });

  it("resumes after a mid-stream drop with no gap and no duplicate", async () => {
    const drop = Math.floor(events.length / 3);
    const calls: number[] = [];
    const statuses: ConnectionStatus[] = [];
    const fetchImpl = (async (url: any) => {
      const from = fromSequenceOf(String(url));
      calls.push(from);
      if (calls.length === 1) {
        // first connection dies after `drop` events
        return streamResponse(sseBody(events.slice(0, drop)), true);
      }
      return streamResponse(sseBody(events.filter((e) => e.sequence >= from)));
    }) as typeof fetch;

    const received: number[] = [];
    const client = new EventStreamClient({
      baseUrl: "http://mock",
      roundId: "r",
      onEvent: (event) => received.push(event.sequence),
      onStatus: (status) => statuses.push(status),
      fetchImpl,
      backoffMs: 1,
    });
    await client.run();

    expect(calls[0]).toBe(1);
    expect(calls[1]).toBe(drop + 1); // resume exactly after the last seen
    expect(received).toEqual(events.map((e) => e.sequence)); // gap-free, duplicate-free
    expect(statuses).toContain("lost");
    expect(statuses[statuses.length - 1]).toBe("closed");
  });

  it("drops overlapping replays if the server resends old events", async () => {
    const overlap = sseBody(events.slice(0, 10)) + sseBody(events.slice(4));
    const fetchImpl = (async () => streamResponse(overlap)) as typeof fetch;
    const received: number[] = [];
    const client = new EventStreamClient({
      baseUrl: "http://mock",
      roundId: "r",
      onEvent: (event) => received.push(event.sequence),
      fetchImpl,
      backoffMs: 1,
    });
    await client.run();
    expect(received).toEqual(events.map((e) => e.sequence));
  });

  it("gives up after maxAttempts when the server keeps failing", async () => {
    let calls = 0;
    const fetchImpl = (async () => {
      calls += 1;
      return new Response("nope", { status: 503 });
    }) as typeof fetch;
    const client = new EventStreamClient({
      baseUrl: "http://mock",
      roundId: "r",
      onEvent: () => undefined,
      fetchImpl,
      backoffMs: 1,
      maxAttempts: 3,
    });
    await client.run();
    expect(calls).toBe(3);
  });
});
