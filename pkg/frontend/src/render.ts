/**
 * Pure renderers: protocol blocks and actions to display lines.
 *
 * Diff hunks render inline in the merged-edit idiom: deletions are
 * struck through, insertions highlighted. With ANSI off (tests, dumb
 * terminals) the same structure renders with "-"/"+" gutters.
 * Unknown block kinds always produce a visible fallback line; blocks
 * are never dropped.
 */
import { buttonEnabled, Persona } from "./personas.js";
import { Action, Block, Button, DiffHunk, SourceMessage } from "./protocol.js";

export interface RenderOptions {
  ansi?: boolean;
  persona?: Persona;
}

const STRIKE = "[9m";
const GREEN = "[32m";
const DIM = "[2m";
const RESET = "[0m";

function renderDiffHunk(hunk: DiffHunk, ansi: boolean): string[] {
  return hunk.lines.map((line) => {
    const text = line.replace(/\n$/, "");
    if (hunk.op === "delete") return ansi ? `  ${STRIKE}${text}${RESET}` : `- ${text}`;
    if (hunk.op === "insert") return ansi ? `  ${GREEN}${text}${RESET}` : `+ ${text}`;
    return ansi ? `  ${DIM}${text}${RESET}` : `  ${text}`;
  });
}

function renderButton(button: Button, persona: Persona | undefined, ansi: boolean): string {
  const enabled = persona === undefined || buttonEnabled(persona, button.action);
  const label = enabled ? `[ ${button.label} ]` : `[ ${button.label} (disabled) ]`;
  return ansi && !enabled ? `${DIM}${label}${RESET}` : label;
}

function renderMessageOption(message: SourceMessage, index: number): string {
  return `  ${index + 1}. <${message.author_id}> ${message.text}`;
}

export function renderBlock(block: Block, options: RenderOptions = {}): string[] {
  const ansi = options.ansi ?? false;
  switch (block.kind) {
    case "text":
      return String((block as { text: string }).text).split("\n");
    case "diff_view": {
      const hunks = (block as { hunks: DiffHunk[] }).hunks;
      return hunks.flatMap((h) => renderDiffHunk(h, ansi));
    }
    case "button_row": {
      const buttons = (block as { buttons: Button[] }).buttons;
      return [buttons.map((b) => renderButton(b, options.persona, ansi)).join("  ")];
    }
    case "message_select": {
      const messages = (block as { messages: SourceMessage[] }).messages;
      return [
        "Select the messages to base the update on:",
        ...messages.map(renderMessageOption),
      ];
    }
    default:
      // visible fallback — never silently drop a block
      return [`[unrenderable block kind "${block.kind}": ${JSON.stringify(block)}]`];
  }
}

/** True when the action should appear in this persona's console. */
export function actionVisibleTo(action: Action, persona: Persona, conversations: Set<string>): boolean {
  if (action.kind === "ephemeral_message") {
    const colon = action.target.lastIndexOf(":");
    return colon >= 0 && action.target.slice(colon + 1) === persona.userId;
  }
  if (action.kind === "open_conversation" || action.kind === "invite_user") {
    return (action.members ?? []).includes(persona.userId);
  }
  // post_message: channel posts are public, conversation posts only for members
  return !isUuid(action.target) || conversations.has(action.target);
}

function isUuid(value: string): boolean {
  return /^[0-9a-f]{8}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{12}$/i.test(value);
}

export function renderAction(action: Action, options: RenderOptions = {}): string[] {
  const header = `#${action.seq} ${action.kind} → ${action.target}`;
  const lines = [header];
  if (action.kind === "open_conversation") {
    lines.push(`  members: ${(action.members ?? []).join(", ")}`);
  }
  if (action.kind === "invite_user") {
    lines.push(`  invited: ${(action.members ?? []).join(", ")}`);
  }
  for (const block of action.blocks) {
    for (const line of renderBlock(block, options)) lines.push(`  ${line}`);
  }
  return lines;
}
