/**
 * Gateway API client. Plain fetch wrappers plus an SSE reader built on
 * streaming fetch so the same code runs in the browser and under node.
 * The console performs no governance computation: every level, reason, and
 * verdict shown to a human comes out of these responses untouched.
 */

export interface GatewayConfig {
  baseUrl: string;
  token?: string;
}

export interface StreamEvent {
  seq: number;
  kind: string;
  initiator: string;
  timestamp: number;
  payload: Record<string, any>;
}

export interface PendingItem {
  action_id: string;
  chain_id: string;
  decision_type_id: string;
  level: string;
  reasons: string[];
  stakeholder: string | null;
  consequences_of_inaction: string;
  held_at: number;
  kind: string;
}

export interface ChainState {
  chain_id: string;
  nodes: Record<string, { status: string; decision_type_id: string; level: string | null }>;
  edges: [string, string][];
  ready: string[];
}

export interface VerifyResult {
  ok: boolean;
  first_bad_seq: number | null;
  detail: string;
  entries: number;
}

export interface EvidenceResult {
  action_id: string;
  complete: boolean;
  missing: string[];
  entries: { seq: number; kind: string; timestamp: number; payload: Record<string, any> }[];
}

export interface DriftReportBundle {
  snapshot: Record<string, any>;
  report: {
    deltas: Record<string, number>;
    breaches: string[];
    structural_changes: string[];
    drift_score: number;
  } | null;
  determination: {
    verdict: string;
    unforeseen_change: boolean;
    compliance_relevant: boolean;
    made_available_again: boolean;
  } | null;
}

export class GatewayApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = "GatewayApiError";
  }
}

export type FetchLike = (url: string, init?: any) => Promise<Response>;

export class GatewayClient {
  constructor(
    private config: GatewayConfig,
    private fetchImpl: FetchLike = fetch,
  ) {}

  private headers(): Record<string, string> {
    const headers: Record<string, string> = { "content-type": "application/json" };
    if (this.config.token) headers["authorization"] = `Bearer ${this.config.token}`;
    return headers;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.config.baseUrl}${path}`, {
      method,
      headers: this.headers(),
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let detail = `${response.status}`;
      try {
        const data = await response.json();
        detail = data.error ?? JSON.stringify(data);
      } catch {
        /* body not JSON */
      }
      throw new GatewayApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  pendingApprovals(): Promise<{ pending: PendingItem[] }> {
    return this.request("GET", "/v1/approvals");
  }

  decide(actionId: string, decision: "approve" | "reject", rationale: string, approver: string) {
    return this.request<{
      action_id: string;
      statuses: Record<string, string>;
      released: string[];
      cancelled: string[];
      re_evaluated: string[];
    }>("POST", `/v1/approvals/${encodeURIComponent(actionId)}`, {
      decision,
      rationale,
      approver,
    });
  }

  chainState(chainId: string): Promise<ChainState> {
    return this.request("GET", `/v1/chains/${encodeURIComponent(chainId)}`);
  }

  verifyLedger(): Promise<VerifyResult> {
    return this.request("GET", "/v1/ledger/verify");
  }

  ledgerEntries(start = 0, end?: number): Promise<{ entries: any[] }> {
    const range = end === undefined ? `start=${start}` : `start=${start}&end=${end}`;
    return this.request("GET", `/v1/ledger/entries?${range}`);
  }

  evidence(actionId: string): Promise<EvidenceResult> {
    return this.request("GET", `/v1/actions/${encodeURIComponent(actionId)}/evidence`);
  }

  driftReports(): Promise<{ reports: DriftReportBundle[] }> {
    return this.request("GET", "/v1/drift/reports");
  }

  policySummary(): Promise<{
    version: string;
    approval_timeout: { mode: string; seconds: number | null };
  }> {
    return this.request("GET", "/v1/policy");
  }

  /**
   * Subscribe to the event stream from a cursor. Returns a stop function.
   * Reconnects from the last seen seq after a drop, reporting connection
   * state so the UI can show a banner; cursor resume means no missed or
   * duplicated events.
   */
  subscribe(
    cursor: number,
    onEvent: (event: StreamEvent) => void,
    options: {
      onStateChange?: (connected: boolean) => void;
      maxEvents?: number;
      reconnectDelayMs?: number;
    } = {},
  ): () => void {
    let stopped = false;
    let lastSeq = cursor;

    const run = async () => {
      while (!stopped) {
        try {
          const params = new URLSearchParams({ cursor: String(lastSeq) });
          if (options.maxEvents !== undefined) params.set("max_events", String(options.maxEvents));
          const response = await this.fetchImpl(
            `${this.config.baseUrl}/v1/stream?${params.toString()}`,
            { headers: this.headers() },
          );
          if (!response.ok || !response.body) {
            throw new GatewayApiError(response.status, "stream unavailable");
          }
          options.onStateChange?.(true);
          const reader = (response.body as ReadableStream<Uint8Array>).getReader();
          const decoder = new TextDecoder();
          let buffer = "";
          let delivered = 0;
          while (!stopped) {
            const { done, value } = await reader.read();
            if (done) break;
            buffer += decoder.decode(value, { stream: true });
            let boundary;
            while ((boundary = buffer.indexOf("\n\n")) !== -1) {
              const block = buffer.slice(0, boundary);
              buffer = buffer.slice(boundary + 2);
              for (const line of block.split("\n")) {
                if (!line.startsWith("data: ")) continue;
                const event = JSON.parse(line.slice(6)) as StreamEvent;
                if (event.seq <= lastSeq) continue;
                lastSeq = event.seq;
                delivered += 1;
                onEvent(event);
              }
            }
            if (options.maxEvents !== undefined && delivered >= options.maxEvents) {
              stopped = true;
            }
          }
          if (options.maxEvents !== undefined) stopped = true;
        } catch {
          /* fall through to reconnect */
        }
        options.onStateChange?.(false);
        if (!stopped) {
          await new Promise((resolve) =>
            setTimeout(resolve, options.reconnectDelayMs ?? 1000),
          );
        }
      }
    };
    void run();
    return () => {
      stopped = true;
    };
  }
}
