// DOM projection of PlaygroundState.  Everything on screen is derived
// from the latest state; replaying the same frames yields the same DOM.

import type { PlaygroundState } from "./state.js";

// The slice of the DOM the renderer touches, narrow enough to fake in tests.
export interface ViewElements {
  banner: { textContent: string | null; hidden: boolean };
  moduleSelect: { innerHTML: string; disabled: boolean };
  composing: { textContent: string | null };
  candidates: { innerHTML: string; hidden: boolean };
  pageIndicator: { textContent: string | null };
  transcript: { textContent: string | null };
  errorLine: { textContent: string | null };
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function render(state: PlaygroundState, el: ViewElements): void {
  el.banner.hidden = state.status === "open";
  el.banner.textContent =
    state.status === "connecting" ? "connecting…" : state.status === "closed" ? "disconnected — retrying" : "";

  el.moduleSelect.disabled = state.status !== "open";
  el.moduleSelect.innerHTML = state.modules
    .map((m) => `<option value="${escapeHtml(m.id)}">${escapeHtml(m.id)} (${escapeHtml(m.name)})</option>`)
    .join("");

  const view = state.view;
  el.composing.textContent = view ? view.composing : "";
  if (view && view.visible) {
    el.candidates.hidden = false;
    el.candidates.innerHTML = view.candidates
      .map((c) => `<li><b>${escapeHtml(c.label)}</b> ${escapeHtml(c.text)}</li>`)
      .join("");
    el.pageIndicator.textContent = `page ${view.page + 1}`;
  } else {
    el.candidates.hidden = true;
    el.candidates.innerHTML = "";
    el.pageIndicator.textContent = "";
  }

  el.transcript.textContent = state.transcript;
  el.errorLine.textContent = state.lastError ?? "";
}
