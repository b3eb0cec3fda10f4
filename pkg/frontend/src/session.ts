/**
 * Console session state: the active persona, locally buffered channel
 * chatter (the chat platform's role), open conversation tabs, and the
 * rendered transcript. All server communication goes through the
 * gateway client; the only shared mutable state is the stream cursor.
 */
import { GatewayClient, GatewayError } from "./client.js";
import { buttonEnabled, Persona } from "./personas.js";
import {
  Action,
  buttonEvent,
  dmEvent,
  mentionEvent,
  selectionEvent,
  SourceMessage,
} from "./protocol.js";
import { actionVisibleTo, renderAction } from "./render.js";

export interface SessionOptions {
  workspaceId?: string;
  selectionWindow?: number;
  ansi?: boolean;
}

export interface PressResult {
  blocked: boolean;
  error?: string;
}

export class ConsoleSession {
  persona: Persona;
  cursor = 0;
  /** conversation tabs this persona is a member of */
  readonly conversations = new Set<string>();
  /** rendered output, newest last */
  readonly transcript: string[] = [];
  /** every action seen, for render-totality checks */
  readonly actions: Action[] = [];
  private readonly channelLog = new Map<string, SourceMessage[]>();
  private readonly options: SessionOptions;
  private abort?: AbortController;
  private streaming?: Promise<void>;

  constructor(
    readonly client: GatewayClient,
    persona: Persona,
    options: SessionOptions = {},
  ) {
    this.persona = persona;
    this.options = options;
  }

  switchPersona(persona: Persona): void {
    this.persona = persona;
    this.transcript.push(`-- now acting as ${persona.displayName} --`);
  }

  /** Subscribe to the action stream from the current cursor. */
  start(): void {
    this.abort = new AbortController();
    this.streaming = this.client.streamActions(
      this.cursor,
      (action) => this.applyAction(action),
      { signal: this.abort.signal },
    );
  }

  async stop(): Promise<void> {
    this.abort?.abort();
    await this.streaming?.catch(() => undefined);
  }

  applyAction(action: Action): void {
    if (action.seq <= this.cursor) return; // resume safety: never render twice
    this.cursor = action.seq;
    this.actions.push(action);
    if (action.kind === "open_conversation" || action.kind === "invite_user") {
      if ((action.members ?? []).includes(this.persona.userId)) {
        this.conversations.add(action.target);
      }
    }
    if (actionVisibleTo(action, this.persona, this.conversations)) {
      this.transcript.push(
        ...renderAction(action, { ansi: this.options.ansi, persona: this.persona }),
      );
    }
  }

  /** Plain channel chatter stays client-side; the platform (here: the
   * console) supplies it later as mention context. */
  say(channelId: string, text: string, ts?: string): SourceMessage {
    const message: SourceMessage = {
      channel_id: channelId,
      author_id: this.persona.userId,
      timestamp: ts ?? `${Date.now() / 1000}`,
      text,
    };
    const log = this.channelLog.get(channelId) ?? [];
    log.push(message);
    this.channelLog.set(channelId, log);
    this.transcript.push(`<${message.author_id}> ${text}`);
    return message;
  }

  recentMessages(channelId: string): SourceMessage[] {
    const window = this.options.selectionWindow ?? 10;
    return (this.channelLog.get(channelId) ?? []).slice(-window);
  }

  async mentionChoir(channelId: string, text: string, ts?: string) {
    const recent = this.recentMessages(channelId);
    const message = this.say(channelId, text, ts);
    const event = mentionEvent(channelId, this.persona.userId, message.text, recent, {
      workspaceId: this.options.workspaceId,
      ts: message.timestamp,
    });
    return this.client.postEvent(event);
  }

  async selectMessages(channelId: string, flowId: string, selected: SourceMessage[]) {
    const event = selectionEvent(channelId, this.persona.userId, flowId, selected, {
      workspaceId: this.options.workspaceId,
    });
    return this.client.postEvent(event);
  }

  async directMessage(text: string, conversationId?: string) {
    const channel = conversationId ?? `dm:${this.persona.userId}`;
    const event = dmEvent(channel, this.persona.userId, text, {
      workspaceId: this.options.workspaceId,
      conversationId,
    });
    return this.client.postEvent(event);
  }

  /**
   * Press a card button. Locally disabled buttons (Approve/Reject for
   * non-managers) are blocked before any event is emitted unless
   * `force` is set — forcing exists so tests can prove the server
   * rejects forged approvals on its own.
   */
  async pressButton(
    channelId: string,
    flowId: string,
    action: string,
    opts: { force?: boolean; extra?: Record<string, unknown> } = {},
  ): Promise<PressResult> {
    if (!opts.force && !buttonEnabled(this.persona, action)) {
      this.transcript.push(`!! "${action}" is disabled for ${this.persona.displayName}`);
      return { blocked: true };
    }
    const event = buttonEvent(channelId, this.persona.userId, flowId, action, {
      workspaceId: this.options.workspaceId,
      extra: opts.extra,
    });
    try {
      await this.client.postEvent(event);
      return { blocked: false };
    } catch (error) {
      if (error instanceof GatewayError) {
        // server-side rejection rendered as an error banner
        this.transcript.push(`!! server rejected "${action}": ${error.message}`);
        return { blocked: false, error: error.errorName };
      }
      throw error;
    }
  }
}
