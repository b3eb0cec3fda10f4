/**
 * Wire types for the CHOIR gateway protocol, plus event constructors.
 *
 * Every event the console emits is validated against these schemas
 * before it leaves the process; actions arriving on the stream are
 * validated leniently (unknown block kinds are preserved so the
 * renderer can show a fallback instead of dropping them).
 */
import { randomUUID } from "node:crypto";
import { z } from "zod";

export const EVENT_KINDS = ["mention", "dm", "button", "selection"] as const;
export const ACTION_KINDS = [
  "post_message",
  "ephemeral_message",
  "open_conversation",
  "invite_user",
] as const;
export const BLOCK_KINDS = ["text", "diff_view", "button_row", "message_select"] as const;

export const SourceMessageSchema = z.object({
  channel_id: z.string().min(1),
  author_id: z.string().min(1),
  timestamp: z.string().min(1),
  text: z.string(),
});
export type SourceMessage = z.infer<typeof SourceMessageSchema>;

export const ChatEventSchema = z.object({
  event_id: z.string().uuid(),
  workspace_id: z.string().min(1),
  kind: z.enum(EVENT_KINDS),
  channel_id: z.string().min(1),
  user_id: z.string().min(1),
  payload: z.record(z.string(), z.unknown()),
  ts: z.string().min(1),
});
export type ChatEvent = z.infer<typeof ChatEventSchema>;

const TextBlockSchema = z.object({ kind: z.literal("text"), text: z.string() });
const DiffHunkSchema = z.object({
  op: z.enum(["keep", "delete", "insert"]),
  lines: z.array(z.string()),
});
const DiffViewBlockSchema = z.object({
  kind: z.literal("diff_view"),
  hunks: z.array(DiffHunkSchema),
});
const ButtonSchema = z.object({
  action: z.string(),
  label: z.string(),
  flow_id: z.string().optional(),
});
const ButtonRowBlockSchema = z.object({
  kind: z.literal("button_row"),
  buttons: z.array(ButtonSchema),
});
const MessageSelectBlockSchema = z.object({
  kind: z.literal("message_select"),
  flow_id: z.string(),
  messages: z.array(SourceMessageSchema),
});
// unknown kinds must survive parsing so they can be rendered as a fallback
const UnknownBlockSchema = z.object({ kind: z.string() }).passthrough();

export const BlockSchema = z.union([
  TextBlockSchema,
  DiffViewBlockSchema,
  ButtonRowBlockSchema,
  MessageSelectBlockSchema,
  UnknownBlockSchema,
]);
export type Block = z.infer<typeof BlockSchema>;
export type DiffHunk = z.infer<typeof DiffHunkSchema>;
export type Button = z.infer<typeof ButtonSchema>;

export const ActionSchema = z.object({
  action_id: z.string(),
  kind: z.string(),
  target: z.string(),
  blocks: z.array(BlockSchema),
  members: z.array(z.string()).optional(),
  seq: z.number().int().positive(),
});
export type Action = z.infer<typeof ActionSchema>;

export interface EventInit {
  workspaceId?: string;
  ts?: string;
}

function base(kind: ChatEvent["kind"], channelId: string, userId: string, init: EventInit) {
  return {
    event_id: randomUUID(),
    workspace_id: init.workspaceId ?? "console",
    kind,
    channel_id: channelId,
    user_id: userId,
    ts: init.ts ?? new Date().toISOString(),
  };
}

export function mentionEvent(
  channelId: string,
  userId: string,
  text: string,
  recentMessages: SourceMessage[],
  init: EventInit = {},
): ChatEvent {
  return ChatEventSchema.parse({
    ...base("mention", channelId, userId, init),
    payload: { text, recent_messages: recentMessages },
  });
}

export function dmEvent(
  channelId: string,
  userId: string,
  text: string,
  init: EventInit & { conversationId?: string } = {},
): ChatEvent {
  const payload: Record<string, unknown> = { text };
  if (init.conversationId) payload.conversation_id = init.conversationId;
  return ChatEventSchema.parse({ ...base("dm", channelId, userId, init), payload });
}

export function selectionEvent(
  channelId: string,
  userId: string,
  flowId: string,
  selected: SourceMessage[],
  init: EventInit = {},
): ChatEvent {
  return ChatEventSchema.parse({
    ...base("selection", channelId, userId, init),
    payload: { flow_id: flowId, selected },
  });
}

export function buttonEvent(
  channelId: string,
  userId: string,
  flowId: string,
  action: string,
  init: EventInit & { extra?: Record<string, unknown> } = {},
): ChatEvent {
  return ChatEventSchema.parse({
    ...base("button", channelId, userId, init),
    payload: { flow_id: flowId, action, ...(init.extra ?? {}) },
  });
}
