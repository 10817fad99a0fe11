// Browser entry point: wire the stream, dashboard, composer, and topic
// form together.  Service base URL and round id come from query params:
//   index.html?base=http://127.0.0.1:8000&round=<id>

import { ServiceApi } from "./api";
import { EventStreamClient } from "./client";
import { Composer } from "./composer";
import { renderDashboard, type DashboardElements } from "./dashboard";
import { applyEvent, initialViewState, type ViewState } from "./fold";
import { escapeHtml } from "./render";

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

function start(): void {
  const params = new URLSearchParams(window.location.search);
  const baseUrl = params.get("base") ?? "http://127.0.0.1:8000";
  const api = new ServiceApi(baseUrl, fetch.bind(window), params.get("token"));

  const elements: DashboardElements = {
    banner: el("banner"),
    aff: el("panel-aff"),
    neg: el("panel-neg"),
    activity: el("activity"),
    audio: el("audio-links"),
    connection: el("connection"),
  };

  let state: ViewState = initialViewState();
  let composer: Composer | null = null;

  const composerBox = el("composer");
  const draftInput = el("composer-draft") as HTMLTextAreaElement;
  const composerError = el("composer-error");
  const searchInput = el("composer-search") as HTMLInputElement;
  const searchResults = el("composer-results");

  function syncComposer(): void {
    if (state.status === "awaiting_human" && state.pendingHumanItem && state.roundId) {
      if (!composer || composer.item !== state.pendingHumanItem) {
        composer = new Composer(api, state.roundId, state.pendingHumanItem);
        composerError.textContent = "";
      }
      composerBox.style.display = "block";
      el("composer-slot").textContent = state.pendingHumanItem;
    } else {
      composerBox.style.display = "none";
      composer = null;
    }
  }

  function redraw(): void {
    renderDashboard(state, elements, baseUrl);
    syncComposer();
  }

  el("composer-submit").addEventListener("click", async () => {
    if (!composer) return;
    composer.draft = draftInput.value;
    const accepted = await composer.submit();
    composerError.textContent = composer.error ?? "";
    if (accepted) draftInput.value = "";
  });

  searchInput.addEventListener("change", async () => {
    if (!composer) return;
    const hits = await composer.search(searchInput.value);
    searchResults.innerHTML = hits
      .map(
        (hit) =>
          `<li><b>${escapeHtml(hit.tag)}</b> <span>${escapeHtml(hit.cite)}</span> ` +
          `<code>${escapeHtml(hit.card_id)}</code></li>`,
      )
      .join("");
  });

  el("topic-submit").addEventListener("click", async () => {
    const resolution = (el("topic-input") as HTMLInputElement).value;
    if (!resolution.trim()) {
      el("topic-error").textContent = "resolution must be non-empty";
      return;
    }
    try {
      const roundId = await api.proposeTopic(resolution);
      window.location.search = `?base=${encodeURIComponent(baseUrl)}&round=${roundId}`;
    } catch (err) {
      el("topic-error").textContent = String(err);
    }
  });

  const roundId = params.get("round");
  if (!roundId) {
    elements.banner.innerHTML = "<div class='banner'>Propose a topic to start a round.</div>";
    return;
  }

  const client = new EventStreamClient({
    baseUrl,
    roundId,
    onEvent: (event) => {
      state = applyEvent(state, event);
      redraw();
    },
    onStatus: (status) => {
      elements.connection.textContent = status;
      elements.connection.className = `connection connection-${status}`;
    },
  });
  void client.run();
}

window.addEventListener("DOMContentLoaded", start);
