// Wire schema for the text-service protocol, as seen from the browser.
// One JSON object per WebSocket text message; "type" names the variant.

import { z } from "zod";

const session = z.number().int().positive();

export const helloFrame = z.object({ type: z.literal("hello"), version: z.string() });
export const listModulesFrame = z.object({ type: z.literal("list_modules") });
export const openSessionFrame = z.object({ type: z.literal("open_session"), module: z.string() });
export const keyFrame = z.object({
  type: z.literal("key"),
  session,
  key: z.string().min(1).refine(
    (k) => k.length === 1 || ["space", "escape", "backspace", "enter"].includes(k),
    { message: "multi-char keys must be named keys" },
  ),
});
export const pageFrame = z.object({
  type: z.literal("page"),
  session,
  direction: z.enum(["next", "prev"]),
});
export const closeSessionFrame = z.object({ type: z.literal("close_session"), session });

export const clientFrame = z.discriminatedUnion("type", [
  helloFrame,
  listModulesFrame,
  openSessionFrame,
  keyFrame,
  pageFrame,
  closeSessionFrame,
]);

const moduleInfo = z.object({ id: z.string(), name: z.string() });
const candidateInfo = z.object({ label: z.string(), text: z.string() });

export const serverFrame = z.discriminatedUnion("type", [
  z.object({ type: z.literal("welcome"), version: z.string(), modules: z.array(moduleInfo) }),
  z.object({ type: z.literal("session_opened"), session }),
  z.object({
    type: z.literal("state"),
    session,
    composing: z.string(),
    candidates: z.array(candidateInfo),
    page: z.number().int().nonnegative(),
    visible: z.boolean(),
  }),
  z.object({ type: z.literal("commit"), session, text: z.string() }),
  z.object({ type: z.literal("passthrough"), session, key: z.string() }),
  z.object({ type: z.literal("beep"), session }),
  z.object({ type: z.literal("error"), code: z.string(), message: z.string() }),
]);

export type ClientFrame = z.infer<typeof clientFrame>;
export type ServerFrame = z.infer<typeof serverFrame>;
export type StateFrame = Extract<ServerFrame, { type: "state" }>;

export function parseServerFrame(raw: string): ServerFrame | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    console.warn("playground: unparseable frame", raw);
    return null;
  }
  const result = serverFrame.safeParse(data);
  if (!result.success) {
    console.warn("playground: bad frame", result.error.message);
    return null;
  }
  return result.data;
}

export function encodeClientFrame(frame: ClientFrame): string {
  clientFrame.parse(frame); // outbound frames must conform before they leave
  return JSON.stringify(frame);
}
