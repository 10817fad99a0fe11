// Transcript realization from the view model.  The markdown assembly
// mirrors the service's display rendering rule for rule, so a folded
// event log renders byte-identically to the CLI's transcript.md; tests
// enforce that equality against exported fixtures.

import type { ViewState } from "./fold";
import type { EntryView } from "./types";

function speechHeading(slot: string, author: string): string {
  return `## Speech ${slot} (${author})`;
}

function cxHeading(answererSlot: string): string {
  return `## Cross-Examination after ${answererSlot}`;
}

export function entryHeading(entry: EntryView): string {
  if (entry.kind === "speech" && entry.speech) {
    return speechHeading(entry.speech.slot, entry.speech.author);
  }
  if (entry.kind === "cx" && entry.cx) {
    return cxHeading(entry.cx.answerer_slot);
  }
  return `## ${entry.item}`;
}

export function renderTranscriptMarkdown(state: ViewState): string {
  const chunks: string[] = [`# Round: ${state.resolution ?? ""}`];
  for (const entry of state.entries) {
    chunks.push(entryHeading(entry));
    chunks.push(entry.display);
  }
  if (state.decision) {
    chunks.push("## Decision");
    chunks.push(`Winner: ${state.decision.winner}`);
    chunks.push(state.decision.rfd);
  }
  return chunks.join("\n\n") + "\n";
}

const HTML_ESCAPES: Record<string, string> = {
  "&": "&amp;",
  "<": "&lt;",
  ">": "&gt;",
  '"': "&quot;",
};

export function escapeHtml(text: string): string {
  return text.replace(/[&<>"]/g, (c) => HTML_ESCAPES[c] ?? c);
}

// Card bodies must render exactly as delivered: escape for safety but
// never rewrite, trim, or reflow evidence text.
export function displayTextToHtml(display: string): string {
  return escapeHtml(display)
    .split("\n\n")
    .map((block) => `<p>${block.replace(/\n/g, "<br>")}</p>`)
    .join("\n");
}
