import { describe, expect, it } from "vitest";

import type { ServerFrame } from "../src/protocol.js";
import { applyFrame, initialState, setStatus } from "../src/state.js";

function opened() {
  let state = setStatus(initialState(), "open");
  state = applyFrame(state, { type: "session_opened", session: 1 });
  return state;
}

const stateFrame = (over: Partial<Extract<ServerFrame, { type: "state" }>> = {}): ServerFrame => ({
  type: "state",
  session: 1,
  composing: "",
  candidates: [],
  page: 0,
  visible: false,
  ...over,
});

describe("reducer", () => {
  it("appends commits to the transcript", () => {
    let state = opened();
    state = applyFrame(state, { type: "commit", session: 1, text: "明" });
    state = applyFrame(state, { type: "commit", session: 1, text: "月" });
    expect(state.transcript).toBe("明月");
  });

  it("ignores frames for other sessions", () => {
    let state = opened();
    state = applyFrame(state, { type: "commit", session: 7, text: "x" });
    state = applyFrame(state, stateFrame({ session: 7, composing: "Z" }));
    expect(state.transcript).toBe("");
    expect(state.view).toBeNull();
  });

  it("keeps only the latest state frame", () => {
    let state = opened();
    state = applyFrame(state, stateFrame({ composing: "A" }));
    state = applyFrame(state, stateFrame({ composing: "AB" }));
    expect(state.view?.composing).toBe("AB");
  });

  it("appends single-char passthrough keys to the transcript", () => {
    let state = opened();
    state = applyFrame(state, { type: "passthrough", session: 1, key: "z" });
    expect(state.transcript).toBe("z");
  });

  it("counts beeps", () => {
    let state = opened();
    state = applyFrame(state, { type: "beep", session: 1 });
    expect(state.beeps).toBe(1);
  });

  it("records errors", () => {
    const state = applyFrame(opened(), { type: "error", code: "unknown_module", message: "nope" });
    expect(state.lastError).toBe("unknown_module: nope");
  });

  it("reconnect resets the session display but keeps the transcript", () => {
    let state = opened();
    state = applyFrame(state, { type: "commit", session: 1, text: "明" });
    state = setStatus(state, "closed");
    expect(state.session).toBeNull();
    state = setStatus(state, "open");
    expect(state.view).toBeNull();
    expect(state.transcript).toBe("明");
  });
});
