// Replaying a recorded frame log through the renderer must reproduce
// the exact screen: rendering depends only on server frames.

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { parseServerFrame, type ServerFrame } from "../src/protocol.js";
import { render, type ViewElements } from "../src/render.js";
import { applyFrame, initialState, setStatus, type PlaygroundState } from "../src/state.js";

const LOG = new URL("./fixtures/t1-session.ndjson", import.meta.url);

function recordedFrames(): ServerFrame[] {
  const lines = readFileSync(LOG, "utf-8").trim().split("\n");
  return lines.map((line) => {
    const frame = parseServerFrame(line);
    if (!frame) throw new Error(`fixture line did not validate: ${line}`);
    return frame;
  });
}

function fakeElements(): ViewElements {
  return {
    banner: { textContent: "", hidden: false },
    moduleSelect: { innerHTML: "", disabled: true },
    composing: { textContent: "" },
    candidates: { innerHTML: "", hidden: true },
    pageIndicator: { textContent: "" },
    transcript: { textContent: "" },
    errorLine: { textContent: "" },
  };
}

function replay(frames: ServerFrame[]): { state: PlaygroundState; el: ViewElements } {
  let state = setStatus(initialState(), "open");
  const el = fakeElements();
  for (const frame of frames) {
    state = applyFrame(state, frame);
    render(state, el);
  }
  return { state, el };
}

describe("frame log replay", () => {
  it("reproduces the transcript 明月 for the scripted session", () => {
    const { state, el } = replay(recordedFrames());
    expect(state.transcript).toBe("明月");
    expect(el.transcript.textContent).toBe("明月");
    expect(el.composing.textContent).toBe("");
    expect(el.candidates.hidden).toBe(true);
  });

  it("is deterministic: replaying twice yields identical screens", () => {
    const first = replay(recordedFrames());
    const second = replay(recordedFrames());
    expect(second.el).toEqual(first.el);
    expect(second.state).toEqual(first.state);
  });

  it("shows the candidate window at the mid-session state frame", () => {
    const frames = recordedFrames();
    const upToWindow = frames.slice(0, 8); // through the visible state frame
    const { el } = replay(upToWindow);
    expect(el.candidates.hidden).toBe(false);
    expect(el.candidates.innerHTML).toContain("日");
    expect(el.candidates.innerHTML).toContain("月");
    expect(el.composing.textContent).toBe("A");
  });

  it("renders module list from the welcome frame", () => {
    const { el } = replay(recordedFrames().slice(0, 1));
    expect(el.moduleSelect.innerHTML).toContain("table:T1");
  });
});
