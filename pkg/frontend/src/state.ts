/**
 * Client-side view state, maintained purely from gateway data.
 *
 * The queue is driven by stream events: an approval-request or interrupt
 * notification adds an item, a human decision removes it (whoever made it).
 * Optimistic removals from this client's own submits are reconciled against
 * the stream: if the stream later disagrees, the stream wins.
 */

import type { PendingItem, StreamEvent } from "./api.js";

const LEVEL_ORDER: Record<string, number> = {
  blocked: 4,
  pre_execution_approval: 3,
  supervisory: 2,
  post_hoc_audit: 1,
  autonomous: 0,
};

export function levelRank(level: string): number {
  return LEVEL_ORDER[level] ?? 0;
}

export class ApprovalQueue {
  private items = new Map<string, PendingItem>();
  private optimistic = new Set<string>();
  lastSeq = -1;

  seed(pending: PendingItem[]): void {
    this.items.clear();
    for (const item of pending) this.items.set(item.action_id, item);
  }

  apply(event: StreamEvent): void {
    this.lastSeq = Math.max(this.lastSeq, event.seq);
    const actionId = event.payload["action_id"] as string | undefined;
    if (!actionId) return;
    if (
      event.kind === "notification" &&
      (event.payload["kind"] === "approval_request" || event.payload["kind"] === "interrupt")
    ) {
      this.items.set(actionId, event.payload as unknown as PendingItem);
      this.optimistic.delete(actionId);
    } else if (event.kind === "human_decision") {
      this.items.delete(actionId);
      this.optimistic.delete(actionId);
    }
  }

  /** Hide an item immediately after this client submits a decision. */
  removeOptimistically(actionId: string): void {
    this.optimistic.add(actionId);
  }

  /** Re-show the item if the submit failed. */
  restore(actionId: string): void {
    this.optimistic.delete(actionId);
  }

  /** Pending items ordered by level severity, then oldest first. */
  ordered(): PendingItem[] {
    return [...this.items.values()]
      .filter((item) => !this.optimistic.has(item.action_id))
      .sort(
        (a, b) =>
          levelRank(b.level) - levelRank(a.level) || a.held_at - b.held_at,
      );
  }

  size(): number {
    return this.ordered().length;
  }

  has(actionId: string): boolean {
    return this.items.has(actionId) && !this.optimistic.has(actionId);
  }
}
