// Wire types mirroring the service's event and payload schemas.

export type EventKind =
  | "round_created"
  | "item_started"
  | "draft"
  | "search"
  | "retrieve"
  | "verdict"
  | "speech_committed"
  | "cx_committed"
  | "awaiting_human"
  | "human_committed"
  | "decision"
  | "audio_ready"
  | "failed";

export interface RoundEvent {
  v: number;
  round_id: string;
  sequence: number;
  kind: EventKind;
  payload: Record<string, unknown>;
  timestamp: number;
}

export interface CardSummary {
  card_id: string;
  tag: string;
  cite: string;
}

export interface SearchHit extends CardSummary {
  score: number;
  rank: number;
}

export interface SpeechPayload {
  type: "speech";
  slot: string;
  author: "ai" | "human";
  segments: unknown[];
}

export interface CxPayload {
  type: "cx";
  questioner_slot: string;
  answerer_slot: string;
  exchanges: [string, string][];
}

export interface Decision {
  judge_id: string;
  winner: "AFF" | "NEG";
  rfd: string;
}

// One committed transcript entry as the dashboard holds it: the
// structured payload plus the server-rendered display text.
export interface EntryView {
  item: string;
  kind: "speech" | "cx";
  display: string;
  speech?: SpeechPayload;
  cx?: CxPayload;
}

// Per-item workflow activity for the live feed.
export interface ActivityLine {
  sequence: number;
  item: string;
  kind: "draft" | "search" | "retrieve" | "verdict";
  summary: string;
  cards: CardSummary[];
}

export type ConnectionStatus = "idle" | "connecting" | "live" | "closed" | "lost";
