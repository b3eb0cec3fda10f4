/**
 * HTTP client for the gateway: event POSTs plus the NDJSON action
 * stream with cursor resume and reconnect backoff.
 */
import { Action, ActionSchema, ChatEvent } from "./protocol.js";

export class GatewayError extends Error {
  constructor(
    public readonly status: number,
    public readonly errorName: string,
    message: string,
  ) {
    super(message);
    this.name = "GatewayError";
  }
}

export interface IngestAck {
  ok: boolean;
  duplicate: boolean;
  flow_id?: string;
  seq_start?: number;
}

export interface HistoryEntry {
  revision: string;
  parent: string | null;
  author_time: number;
  paths_changed: string[];
  context: {
    proposal_id: string;
    requester_id: string;
    approver_id: string;
    messages: { channel_id: string; author_id: string; timestamp: string; text: string }[];
    summary: string | null;
  } | null;
}

export interface StreamOptions {
  signal?: AbortSignal;
  /** initial reconnect delay; doubles up to 10x */
  retryDelayMs?: number;
  onRetry?: (error: unknown, attempt: number) => void;
}

async function parseError(response: Response): Promise<GatewayError> {
  let name = "HttpError";
  let detail = response.statusText;
  try {
    const body = (await response.json()) as { error?: string; detail?: string };
    if (body.error) name = body.error;
    if (body.detail) detail = body.detail;
  } catch {
    /* non-JSON error body */
  }
  return new GatewayError(response.status, name, `${name}: ${detail}`);
}

export class GatewayClient {
  constructor(public readonly baseUrl: string) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await fetch(this.baseUrl + path);
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  async postEvent(event: ChatEvent): Promise<IngestAck> {
    const response = await fetch(this.baseUrl + "/v1/events", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(event),
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as IngestAck;
  }

  async health(): Promise<boolean> {
    try {
      const body = await this.getJson<{ ok: boolean }>("/healthz");
      return body.ok === true;
    } catch {
      return false;
    }
  }

  async documents(): Promise<string[]> {
    return (await this.getJson<{ documents: string[] }>("/v1/documents")).documents;
  }

  async document(path: string): Promise<{ path: string; content: string; revision: string }> {
    return this.getJson(`/v1/documents/${encodeURIComponent(path)}`);
  }

  async history(path: string): Promise<HistoryEntry[]> {
    return (
      await this.getJson<{ history: HistoryEntry[] }>(
        `/v1/documents/${encodeURIComponent(path)}/history`,
      )
    ).history;
  }

  async flow(flowId: string): Promise<Record<string, unknown>> {
    return this.getJson(`/v1/flows/${encodeURIComponent(flowId)}`);
  }

  async actionsOnce(since: number): Promise<Action[]> {
    const body = await this.getJson<{ actions: unknown[] }>(
      `/v1/actions?since=${since}&once=true`,
    );
    return body.actions.map((a) => ActionSchema.parse(a));
  }

  /**
   * Consume the live NDJSON action stream, invoking onAction for each
   * action in seq order. Reconnects from the last delivered cursor, so
   * restarts never replay actions the caller has already seen.
   */
  async streamActions(
    since: number,
    onAction: (action: Action) => void,
    options: StreamOptions = {},
  ): Promise<void> {
    let cursor = since;
    let delay = options.retryDelayMs ?? 250;
    let attempt = 0;
    for (;;) {
      if (options.signal?.aborted) return;
      try {
        await this.consumeOnce(cursor, (action) => {
          cursor = action.seq;
          delay = options.retryDelayMs ?? 250; // healthy stream resets backoff
          onAction(action);
        }, options.signal);
        return; // stream ended cleanly (server shutdown or abort)
      } catch (error) {
        if (options.signal?.aborted) return;
        attempt += 1;
        options.onRetry?.(error, attempt);
        await new Promise((resolve) => setTimeout(resolve, delay));
        delay = Math.min(delay * 2, (options.retryDelayMs ?? 250) * 10);
      }
    }
  }

  private async consumeOnce(
    since: number,
    onAction: (action: Action) => void,
    signal?: AbortSignal,
  ): Promise<void> {
    const response = await fetch(`${this.baseUrl}/v1/actions?since=${since}`, { signal });
    if (!response.ok) throw await parseError(response);
    if (!response.body) throw new Error("no response body");
    const decoder = new TextDecoder();
    let buffer = "";
    for await (const chunk of response.body as unknown as AsyncIterable<Uint8Array>) {
      buffer += decoder.decode(chunk, { stream: true });
      let newline;
      while ((newline = buffer.indexOf("\n")) >= 0) {
        const line = buffer.slice(0, newline).trim();
        buffer = buffer.slice(newline + 1);
        if (!line) continue; // keepalive
        onAction(ActionSchema.parse(JSON.parse(line)));
      }
    }
  }
}
