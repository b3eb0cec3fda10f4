import { describe, expect, it } from "vitest";

import { DEFAULT_PERSONAS } from "../src/personas.js";
import { Action } from "../src/protocol.js";
import { actionVisibleTo, renderAction, renderBlock } from "../src/render.js";

const manager = DEFAULT_PERSONAS.find((p) => p.isManager)!;
const requester = DEFAULT_PERSONAS.find((p) => p.userId === "adnan")!;

describe("renderBlock", () => {
  it("renders text blocks line by line", () => {
    expect(renderBlock({ kind: "text", text: "a\nb" })).toEqual(["a", "b"]);
  });

  it("renders diffs with strikethrough deletes and highlighted inserts", () => {
    const block = {
      kind: "diff_view",
      hunks: [
        { op: "keep" as const, lines: ["ctx\n"] },
        { op: "delete" as const, lines: ["old line\n"] },
        { op: "insert" as const, lines: ["new line\n"] },
      ],
    };
    const ansi = renderBlock(block, { ansi: true });
    expect(ansi[1]).toContain("[9m"); // strikethrough
    expect(ansi[1]).toContain("old line");
    expect(ansi[2]).toContain("[32m"); // insert highlight
    expect(ansi[2]).toContain("new line");

    const plain = renderBlock(block, { ansi: false });
    expect(plain).toEqual(["  ctx", "- old line", "+ new line"]);
  });

  it("marks manager-only buttons disabled for non-managers", () => {
    const block = {
      kind: "button_row",
      buttons: [
        { action: "approve", label: "Approve" },
        { action: "start_discussion", label: "Start Discussion" },
      ],
    };
    const [asRequester] = renderBlock(block, { persona: requester });
    expect(asRequester).toContain("[ Approve (disabled) ]");
    expect(asRequester).toContain("[ Start Discussion ]");
    const [asManager] = renderBlock(block, { persona: manager });
    expect(asManager).toContain("[ Approve ]");
    expect(asManager).not.toContain("disabled");
  });

  it("renders message selectors as numbered options", () => {
    const block = {
      kind: "message_select",
      flow_id: "f",
      messages: [
        { channel_id: "C1", author_id: "caleb", timestamp: "1", text: "first" },
        { channel_id: "C1", author_id: "adnan", timestamp: "2", text: "second" },
      ],
    };
    const lines = renderBlock(block);
    expect(lines[1]).toBe("  1. <caleb> first");
    expect(lines[2]).toBe("  2. <adnan> second");
  });

  it("renders unknown kinds as a visible fallback, never dropping them", () => {
    const lines = renderBlock({ kind: "sparkline", values: [1, 2] } as never);
    expect(lines).toHaveLength(1);
    expect(lines[0]).toContain('unrenderable block kind "sparkline"');
    expect(lines[0]).toContain("[1,2]");
  });
});

describe("action visibility", () => {
  const open: Action = {
    action_id: "a",
    kind: "open_conversation",
    target: "3f2b7b1c-0000-4000-8000-000000000000",
    blocks: [],
    members: ["adnan", "prof-lee"],
    seq: 1,
  };

  it("conversation tabs appear for member personas only", () => {
    expect(actionVisibleTo(open, requester, new Set())).toBe(true);
    const caleb = DEFAULT_PERSONAS.find((p) => p.userId === "caleb")!;
    expect(actionVisibleTo(open, caleb, new Set())).toBe(false);
  });

  it("ephemeral messages are scoped to their target user", () => {
    const action: Action = {
      action_id: "a",
      kind: "ephemeral_message",
      target: "C1:adnan",
      blocks: [],
      seq: 2,
    };
    expect(actionVisibleTo(action, requester, new Set())).toBe(true);
    expect(actionVisibleTo(action, manager, new Set())).toBe(false);
  });

  it("conversation posts require membership; channel posts are public", () => {
    const post: Action = {
      action_id: "a",
      kind: "post_message",
      target: open.target,
      blocks: [],
      seq: 3,
    };
    expect(actionVisibleTo(post, requester, new Set([open.target]))).toBe(true);
    expect(actionVisibleTo(post, requester, new Set())).toBe(false);
    expect(actionVisibleTo({ ...post, target: "C1" }, requester, new Set())).toBe(true);
  });
});

describe("renderAction", () => {
  it("renders every block of an action under its header", () => {
    const action: Action = {
      action_id: "a",
      kind: "post_message",
      target: "C1",
      blocks: [
        { kind: "text", text: "Proposed update:" },
        { kind: "mystery" } as never,
      ],
      seq: 7,
    };
    const lines = renderAction(action);
    expect(lines[0]).toBe("#7 post_message → C1");
    expect(lines.some((l) => l.includes("Proposed update:"))).toBe(true);
    expect(lines.some((l) => l.includes("unrenderable block kind"))).toBe(true);
  });
});
