// Playground state and its reducer.  Rendering is a pure function of
// this state; no composition logic lives on the client side.

import type { ServerFrame, StateFrame } from "./protocol.js";

export type ConnectionStatus = "connecting" | "open" | "closed";

export interface PlaygroundState {
  status: ConnectionStatus;
  modules: { id: string; name: string }[];
  session: number | null;
  view: StateFrame | null;
  transcript: string;
  beeps: number;
  lastError: string | null;
}

export function initialState(): PlaygroundState {
  return {
    status: "connecting",
    modules: [],
    session: null,
    view: null,
    transcript: "",
    beeps: 0,
    lastError: null,
  };
}

export function applyFrame(state: PlaygroundState, frame: ServerFrame): PlaygroundState {
  switch (frame.type) {
    case "welcome":
      return { ...state, modules: frame.modules };
    case "session_opened":
      return { ...state, session: frame.session, view: null, transcript: state.transcript };
    case "state":
      return frame.session === state.session ? { ...state, view: frame } : state;
    case "commit":
      return frame.session === state.session
        ? { ...state, transcript: state.transcript + frame.text }
        : state;
    case "passthrough":
      // a declined key goes to the "application", which here is the transcript
      return frame.session === state.session && frame.key.length === 1
        ? { ...state, transcript: state.transcript + frame.key }
        : state;
    case "beep":
      return frame.session === state.session ? { ...state, beeps: state.beeps + 1 } : state;
    case "error":
      return { ...state, lastError: `${frame.code}: ${frame.message}` };
  }
}

export function setStatus(state: PlaygroundState, status: ConnectionStatus): PlaygroundState {
  if (status === "open") {
    // a fresh connection starts over: server-side sessions are gone
    return { ...initialState(), status, transcript: state.transcript };
  }
  return { ...state, status, session: status === "closed" ? null : state.session, view: null };
}
