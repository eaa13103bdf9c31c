// Entry point: wires the connection, the reducer and the renderer.

import { connect, serverUrl, type Connection } from "./connection.js";
import { keyFrameFor } from "./keys.js";
import { render, type ViewElements } from "./render.js";
import { applyFrame, initialState, setStatus, type PlaygroundState } from "./state.js";

function grab(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

const elements: ViewElements = {
  banner: grab("banner"),
  moduleSelect: grab("modules") as HTMLSelectElement,
  composing: grab("composing"),
  candidates: grab("candidates"),
  pageIndicator: grab("page"),
  transcript: grab("transcript"),
  errorLine: grab("error"),
};

let state: PlaygroundState = initialState();

function update(next: PlaygroundState) {
  state = next;
  render(state, elements);
}

const conn: Connection = connect(serverUrl(window.location), {
  onFrame(frame) {
    let next = applyFrame(state, frame);
    if (frame.type === "welcome" && frame.modules.length > 0) {
      conn.send({ type: "open_session", module: frame.modules[0].id });
    }
    update(next);
  },
  onStatus(status) {
    update(setStatus(state, status));
  },
});

const moduleSelect = grab("modules") as HTMLSelectElement;
moduleSelect.addEventListener("change", () => {
  if (state.session !== null) {
    conn.send({ type: "close_session", session: state.session });
  }
  update({ ...state, session: null, view: null });
  conn.send({ type: "open_session", module: moduleSelect.value });
});

const typingBox = grab("typing");
typingBox.addEventListener("keydown", (event) => {
  const frame = keyFrameFor(event, state.session);
  if (frame) {
    event.preventDefault();
    conn.send(frame);
  }
});

grab("prev").addEventListener("click", () => {
  if (state.session !== null) conn.send({ type: "page", session: state.session, direction: "prev" });
});
grab("next").addEventListener("click", () => {
  if (state.session !== null) conn.send({ type: "page", session: state.session, direction: "next" });
});

render(state, elements);
typingBox.focus();
