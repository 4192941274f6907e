/**
 * Pure HTML-string views. Everything rendered is gateway data verbatim:
 * levels, reasons, verdicts, and sequence numbers are never derived here.
 */

import type {
  DriftReportBundle,
  EvidenceResult,
  PendingItem,
  VerifyResult,
} from "./api.js";
import { escapeXml } from "./dag.js";

const esc = escapeXml;

export function renderQueue(items: PendingItem[], selected?: string): string {
  if (items.length === 0) {
    return `<p class="empty">No pending approvals.</p>`;
  }
  const rows = items
    .map((item) => {
      const active = item.action_id === selected ? " selected" : "";
      return (
        `<li class="queue-item${active}" data-action="${esc(item.action_id)}">` +
        `<span class="badge level-${esc(item.level)}">${esc(item.level)}</span>` +
        `<span class="queue-action">${esc(item.action_id)}</span>` +
        `<span class="queue-type">${esc(item.decision_type_id)}</span>` +
        (item.kind === "interrupt" ? `<span class="badge interrupt">interrupt</span>` : "") +
        `</li>`
      );
    })
    .join("");
  return `<ul class="queue">${rows}</ul>`;
}

export function renderDetail(item: PendingItem, expiresInSeconds?: number): string {
  const reasons = item.reasons.map((r) => `<li><code>${esc(r)}</code></li>`).join("");
  const countdown =
    expiresInSeconds === undefined
      ? ""
      : `<dt>Decision window</dt><dd><span class="badge countdown">` +
        (expiresInSeconds > 0
          ? `auto-rejects in ${Math.ceil(expiresInSeconds)}s`
          : "expired; awaiting sweep") +
        `</span></dd>`;
  return (
    `<h3>${esc(item.action_id)}</h3>` +
    `<dl>` +
    `<dt>Oversight level</dt><dd><span class="badge level-${esc(item.level)}">${esc(item.level)}</span></dd>` +
    `<dt>Decision type</dt><dd>${esc(item.decision_type_id)}</dd>` +
    `<dt>Chain</dt><dd>${esc(item.chain_id)}</dd>` +
    `<dt>Accountable stakeholder</dt><dd>${esc(item.stakeholder ?? "unassigned")}</dd>` +
    countdown +
    `<dt>Why escalated</dt><dd><ul class="reasons">${reasons}</ul></dd>` +
    `<dt>Consequences of not acting</dt><dd>${esc(item.consequences_of_inaction || "not recorded")}</dd>` +
    `</dl>`
  );
}

export function renderDecideForm(actionId: string, rationale: string): string {
  const disabled = rationale.trim().length === 0 ? " disabled" : "";
  return (
    `<form class="decide" data-action="${esc(actionId)}">` +
    `<textarea name="rationale" placeholder="Rationale (required)" rows="3">${esc(rationale)}</textarea>` +
    `<div class="decide-buttons">` +
    `<button type="button" data-decision="approve"${disabled}>Approve</button>` +
    `<button type="button" data-decision="reject"${disabled}>Reject</button>` +
    `</div>` +
    `</form>`
  );
}

export function renderVerifyBadge(result: VerifyResult): string {
  if (result.ok) {
    return `<span class="badge verify-ok">chain verified (${result.entries} entries)</span>`;
  }
  return (
    `<span class="badge verify-bad">VERIFICATION FAILED at seq ${result.first_bad_seq}</span>` +
    `<span class="verify-detail">${esc(result.detail)}</span>`
  );
}

export function renderEvidence(evidence: EvidenceResult): string {
  const steps = evidence.entries
    .map(
      (entry) =>
        `<li class="evidence-entry"><span class="seq">#${entry.seq}</span> ` +
        `<span class="kind kind-${esc(entry.kind)}">${esc(entry.kind)}</span>` +
        (entry.payload["rationale"]
          ? ` <em>${esc(String(entry.payload["rationale"]))}</em>`
          : "") +
        `</li>`,
    )
    .join("");
  const verdict = evidence.complete
    ? `<span class="badge verify-ok">complete</span>`
    : `<span class="badge verify-bad">incomplete: ${esc(evidence.missing.join(", "))}</span>`;
  return `<h3>${esc(evidence.action_id)} ${verdict}</h3><ol class="evidence">${steps}</ol>`;
}

export function renderLedgerRows(entries: any[]): string {
  const rows = entries
    .map(
      (entry) =>
        `<tr data-seq="${entry.seq}"><td>${entry.seq}</td>` +
        `<td>${esc(entry.kind)}</td><td>${esc(entry.initiator)}</td>` +
        `<td>${esc(String(entry.payload?.action_id ?? ""))}</td></tr>`,
    )
    .join("");
  return (
    `<table class="ledger"><thead><tr><th>seq</th><th>kind</th><th>initiator</th><th>action</th></tr></thead>` +
    `<tbody>${rows}</tbody></table>`
  );
}

export function renderDriftDashboard(reports: DriftReportBundle[]): string {
  if (reports.length === 0) return `<p class="empty">No snapshots yet.</p>`;
  const sections = reports
    .map((bundle) => {
      const snapshotId = bundle.snapshot["snapshot_id"];
      if (!bundle.report) {
        return `<section class="drift"><h4>snapshot ${snapshotId}</h4><p>no baseline configured</p></section>`;
      }
      const bars = Object.entries(bundle.report.deltas)
        .map(([metric, delta]) => {
          const breached = bundle.report!.breaches.includes(metric);
          const width = Math.min(Math.abs(delta) * 50, 100);
          return (
            `<div class="metric${breached ? " breach" : ""}">` +
            `<span class="metric-name">${esc(metric)}</span>` +
            `<div class="band"><div class="delta" style="width:${width}%"></div></div>` +
            `<span class="delta-value">${delta.toFixed(2)} bands</span>` +
            `</div>`
          );
        })
        .join("");
      const structural = bundle.report.structural_changes
        .map((c) => `<span class="badge structural">${esc(c)}</span>`)
        .join(" ");
      const verdict = bundle.determination?.verdict ?? "n/a";
      const flag =
        verdict === "substantial_modification_candidate"
          ? `<span class="badge verify-bad">substantial-modification candidate</span>`
          : `<span class="badge verify-ok">within envelope</span>`;
      return (
        `<section class="drift" data-snapshot="${snapshotId}">` +
        `<h4>snapshot ${snapshotId} ${flag}</h4>` +
        bars +
        (structural ? `<p>${structural}</p>` : "") +
        `</section>`
      );
    })
    .join("");
  return sections;
}

export function renderConnectionBanner(connected: boolean): string {
  return connected
    ? ""
    : `<div class="banner">stream disconnected; resuming from cursor</div>`;
}
