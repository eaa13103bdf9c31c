// Browser keystroke -> outbound key frame, or null for keys the
// protocol does not carry (arrows, function keys, modified chords).

import type { ClientFrame } from "./protocol.js";

const NAMED: Record<string, string> = {
  " ": "space",
  Escape: "escape",
  Backspace: "backspace",
  Enter: "enter",
};

export interface KeystrokeLike {
  key: string;
  ctrlKey?: boolean;
  altKey?: boolean;
  metaKey?: boolean;
}

export function keyFrameFor(event: KeystrokeLike, session: number | null): ClientFrame | null {
  if (session === null) return null;
  if (event.ctrlKey || event.altKey || event.metaKey) return null;
  const named = NAMED[event.key];
  if (named) return { type: "key", session, key: named };
  if (event.key.length === 1 && event.key !== " ") {
    return { type: "key", session, key: event.key };
  }
  return null;
}
