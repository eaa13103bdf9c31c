// WebSocket connection with automatic retry and the hello handshake.

import { encodeClientFrame, parseServerFrame, type ClientFrame, type ServerFrame } from "./protocol.js";

export interface ConnectionHandlers {
  onFrame(frame: ServerFrame): void;
  onStatus(status: "connecting" | "open" | "closed"): void;
}

export interface Connection {
  send(frame: ClientFrame): void;
  close(): void;
}

const MAX_BACKOFF_MS = 8000;

export function connect(url: string, handlers: ConnectionHandlers): Connection {
  let ws: WebSocket | null = null;
  let closed = false;
  let backoff = 500;
  let timer: ReturnType<typeof setTimeout> | null = null;

  const open = () => {
    handlers.onStatus("connecting");
    ws = new WebSocket(url);
    ws.onopen = () => {
      backoff = 500;
      handlers.onStatus("open");
      ws!.send(encodeClientFrame({ type: "hello", version: "1" }));
    };
    ws.onmessage = (event) => {
      const frame = parseServerFrame(String(event.data));
      if (frame) handlers.onFrame(frame);
    };
    ws.onclose = () => {
      if (closed) return;
      handlers.onStatus("closed");
      timer = setTimeout(open, backoff);
      backoff = Math.min(backoff * 2, MAX_BACKOFF_MS);
    };
    ws.onerror = () => ws?.close();
  };
  open();

  return {
    send(frame) {
      if (ws && ws.readyState === WebSocket.OPEN) {
        ws.send(encodeClientFrame(frame));
      }
    },
    close() {
      closed = true;
      if (timer) clearTimeout(timer);
      ws?.close();
    },
  };
}

export function serverUrl(location: { search: string; host: string }): string {
  const override = new URLSearchParams(location.search).get("server");
  if (override) return override;
  return `ws://${location.host}/ws`;
}
