// DOM realization of the view model.  Pure view-model -> HTML string
// functions so the transcript content is testable without a browser;
// mountDashboard wires them to live elements.

import type { ViewState } from "./fold";
import { displayTextToHtml, entryHeading, escapeHtml } from "./render";
import type { EntryView } from "./types";

function sideOf(entry: EntryView): "AFF" | "NEG" {
  const slot = entry.kind === "speech" ? entry.speech?.slot : entry.cx?.answerer_slot;
  return slot && slot[1] === "A" ? "AFF" : "NEG";
}

export function entryHtml(entry: EntryView): string {
  return (
    `<article class="entry entry-${entry.kind}" data-item="${escapeHtml(entry.item)}">` +
    `<h2>${escapeHtml(entryHeading(entry).replace(/^## /, ""))}</h2>` +
    displayTextToHtml(entry.display) +
    `</article>`
  );
}

export function teamPanelHtml(state: ViewState, side: "AFF" | "NEG"): string {
  const entries = state.entries.filter((entry) => sideOf(entry) === side);
  return entries.map(entryHtml).join("\n");
}

export function activityFeedHtml(state: ViewState, limit = 40): string {
  const lines = state.activity.slice(-limit).map((line) => {
    const cards = line.cards
      .map((card) => `<li><b>${escapeHtml(card.tag)}</b> <span>${escapeHtml(card.cite)}</span></li>`)
      .join("");
    return (
      `<li class="activity activity-${line.kind}">` +
      `<code>${escapeHtml(line.item)}</code> ${escapeHtml(line.summary)}` +
      (cards ? `<ul class="cards">${cards}</ul>` : "") +
      `</li>`
    );
  });
  return `<ol>${lines.join("\n")}</ol>`;
}

export function statusBannerHtml(state: ViewState): string {
  if (state.failure) {
    return `<div class="banner banner-failed">Round failed at ${escapeHtml(state.failure)}</div>`;
  }
  if (state.status === "awaiting_human" && state.pendingHumanItem) {
    return `<div class="banner banner-human">Awaiting human ${escapeHtml(state.pendingHumanItem)}</div>`;
  }
  if (state.decision) {
    return (
      `<div class="banner banner-decision"><b>Decision: ${state.decision.winner}</b>` +
      `<p>${escapeHtml(state.decision.rfd)}</p></div>`
    );
  }
  return `<div class="banner">Current item: ${escapeHtml(state.currentItem ?? "starting")}</div>`;
}

export function audioLinksHtml(state: ViewState, baseUrl: string, roundId: string): string {
  const slots = Object.keys(state.audioReady).sort();
  return slots
    .map(
      (slot) =>
        `<a href="${baseUrl}/rounds/${roundId}/audio/${slot}" target="_blank">${escapeHtml(slot)}</a>`,
    )
    .join(" ");
}

export interface DashboardElements {
  banner: HTMLElement;
  aff: HTMLElement;
  neg: HTMLElement;
  activity: HTMLElement;
  audio: HTMLElement;
  connection: HTMLElement;
}

export function renderDashboard(
  state: ViewState,
  elements: DashboardElements,
  baseUrl: string,
): void {
  elements.banner.innerHTML = statusBannerHtml(state);
  elements.aff.innerHTML = teamPanelHtml(state, "AFF");
  elements.neg.innerHTML = teamPanelHtml(state, "NEG");
  elements.activity.innerHTML = activityFeedHtml(state);
  elements.audio.innerHTML = state.roundId
    ? audioLinksHtml(state, baseUrl, state.roundId)
    : "";
}
