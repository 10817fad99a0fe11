// The dashboard view model is a pure fold over the round's event log.
// Events arriving twice (reconnect overlap) or out of order are handled
// by sequence-number dedupe, so fold(log) is deterministic for any
// delivery schedule that preserves per-connection ordering.

import type {
  ActivityLine,
  CardSummary,
  CxPayload,
  Decision,
  EntryView,
  RoundEvent,
  SpeechPayload,
} from "./types";

export interface ViewState {
  roundId: string | null;
  resolution: string | null;
  lastSequence: number;
  currentItem: string | null;
  pendingHumanItem: string | null;
  status: "running" | "awaiting_human" | "complete" | "failed";
  entries: EntryView[];
  activity: ActivityLine[];
  decision: Decision | null;
  audioReady: Record<string, string>; // slot -> format
  failure: string | null;
}

export function initialViewState(): ViewState {
  return {
    roundId: null,
    resolution: null,
    lastSequence: 0,
    currentItem: null,
    pendingHumanItem: null,
    status: "running",
    entries: [],
    activity: [],
    decision: null,
    audioReady: {},
    failure: null,
  };
}

function activitySummary(event: RoundEvent): { summary: string; cards: CardSummary[] } {
  const p = event.payload as Record<string, any>;
  switch (event.kind) {
    case "draft":
      return { summary: `draft (${p.task}, iteration ${p.iteration})`, cards: [] };
    case "search": {
      const queries = (p.queries ?? []) as string[];
      return { summary: `search: ${queries.join(" | ") || "(no queries)"}`, cards: [] };
    }
    case "retrieve": {
      const results = (p.results ?? []) as { cards?: CardSummary[] }[];
      const cards = results.flatMap((r) => r.cards ?? []);
      return { summary: `retrieved ${cards.length} cards`, cards };
    }
    case "verdict":
      return {
        summary: p.approved ? "reviewer approved" : `reviewer rejected: ${p.critique}`,
        cards: [],
      };
    default:
      return { summary: event.kind, cards: [] };
  }
}

export function applyEvent(state: ViewState, event: RoundEvent): ViewState {
  if (event.sequence <= state.lastSequence) {
    return state; // replay overlap after a reconnect
  }
  const next: ViewState = { ...state, lastSequence: event.sequence };
  const p = event.payload as Record<string, any>;
  switch (event.kind) {
    case "round_created":
      next.roundId = p.round_id ?? event.round_id;
      next.resolution = p.resolution ?? null;
      break;
    case "item_started":
      next.currentItem = p.item;
      break;
    case "draft":
    case "search":
    case "retrieve":
    case "verdict": {
      const { summary, cards } = activitySummary(event);
      next.activity = [
        ...state.activity,
        { sequence: event.sequence, item: p.item, kind: event.kind, summary, cards },
      ];
      break;
    }
    case "speech_committed":
      next.entries = [
        ...state.entries,
        {
          item: p.item,
          kind: "speech",
          display: p.display ?? "",
          speech: p.speech as SpeechPayload,
        },
      ];
      next.pendingHumanItem = null;
      next.status = "running";
      break;
    case "cx_committed":
      next.entries = [
        ...state.entries,
        { item: p.item, kind: "cx", display: p.display ?? "", cx: p.cx as CxPayload },
      ];
      next.pendingHumanItem = null;
      next.status = "running";
      break;
    case "awaiting_human":
      next.pendingHumanItem = p.item;
      next.status = "awaiting_human";
      break;
    case "human_committed":
      next.pendingHumanItem = null;
      break;
    case "decision":
      next.decision = p.decision as Decision;
      next.status = "complete";
      next.currentItem = null;
      break;
    case "audio_ready":
      next.audioReady = { ...state.audioReady, [p.slot ?? p.item]: p.format ?? "mp3" };
      break;
    case "failed":
      next.failure = `${p.item}: ${p.error}`;
      next.status = "failed";
      break;
  }
  return next;
}

export function foldEvents(events: RoundEvent[], start?: ViewState): ViewState {
  let state = start ?? initialViewState();
  for (const event of events) {
    state = applyEvent(state, event);
  }
  return state;
}

export function parseEventLine(line: string): RoundEvent | null {
  const trimmed = line.trim();
  if (!trimmed) return null;
  return JSON.parse(trimmed) as RoundEvent;
}
