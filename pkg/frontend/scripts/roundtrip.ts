/**
 * Scripted round-trip checks against a live gateway this script spawns:
 *
 *   1. a held action appears on the stream within one event of the hold,
 *      and lands in the queue state the console renders from;
 *   2. an approve with rationale transitions the DAG view (held -> ready,
 *      suspended descendant -> pending) while the independent branch stays;
 *   3. a tampered ledger byte renders the failed-verification badge at the
 *      exact sequence number.
 *
 * Requires the Python package installed (pip install -e .). Run from
 * frontend/: npm run roundtrip
 */

import { spawn } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { GatewayClient, type StreamEvent } from "../src/api.js";
import { renderChainSvg } from "../src/dag.js";
import { renderQueue, renderVerifyBadge } from "../src/render.js";
import { ApprovalQueue } from "../src/state.js";

const PORT = 8431;
const BASE = `http://127.0.0.1:${PORT}`;

const POLICY = {
  ontology: {
    nodes: [
      {
        id: "assistant",
        level: "domain",
        attributes: {
          regulatory_tags: ["interaction_transparency"],
          risk_tier: "minimal",
          stakeholder: "oversight_lead",
          reversibility: "reversible",
          sensitive_data: false,
          state_changing: false,
          residual_risk_acceptable_without_approval: true,
        },
      },
      { id: "email_handling", level: "process", parent: "assistant" },
      {
        id: "summarize_inbox",
        level: "decision_type",
        parent: "email_handling",
        attributes: { sensitive_data: true },
      },
      {
        id: "send_email",
        level: "decision_type",
        parent: "email_handling",
        attributes: {
          sensitive_data: true,
          state_changing: true,
          reversibility: "irreversible",
          residual_risk_acceptable_without_approval: false,
          consequences_of_inaction: "the recipient never receives the update",
        },
      },
    ],
  },
  tools: [
    {
      id: "mailbox",
      capabilities: { inbox: ["read"] },
      data_categories: ["communications_content"],
    },
    {
      id: "mail_sender",
      capabilities: { outbound_mail: ["send"] },
      data_categories: ["communications_content"],
    },
  ],
  users: [
    { user_id: "user-1", scopes: { inbox: ["read"], outbound_mail: ["send"] } },
  ],
};

function check(name: string, ok: boolean, detail = ""): boolean {
  console.log(`  [${ok ? "PASS" : "FAIL"}] ${name}${ok || !detail ? "" : `  (${detail})`}`);
  return ok;
}

async function waitForHealth(deadlineMs: number): Promise<void> {
  const start = Date.now();
  while (Date.now() - start < deadlineMs) {
    try {
      const response = await fetch(`${BASE}/healthz`);
      if (response.ok) return;
    } catch {
      /* not up yet */
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error("gateway did not become healthy");
}

async function main(): Promise<number> {
  const workdir = mkdtempSync(join(tmpdir(), "agentgate-roundtrip-"));
  const ledgerDir = join(workdir, "ledger");
  writeFileSync(join(workdir, "policy.json"), JSON.stringify(POLICY));
  writeFileSync(
    join(workdir, "config.json"),
    JSON.stringify({
      listen_host: "127.0.0.1",
      listen_port: PORT,
      policy_path: join(workdir, "policy.json"),
      ledger_dir: ledgerDir,
      credential_ttl_seconds: 3600,
    }),
  );

  const gateway = spawn(
    "python3",
    ["-m", "agentgate.cli", "serve", "--config", join(workdir, "config.json")],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  const results: boolean[] = [];
  try {
    await waitForHealth(15000);
    const client = new GatewayClient({ baseUrl: BASE });
    const queue = new ApprovalQueue();

    // Check 1: hold visible within one stream event of its ledger append.
    const events: StreamEvent[] = [];
    const streamDone = new Promise<void>((resolve) => {
      client.subscribe(
        -1,
        (event) => {
          events.push(event);
          queue.apply(event);
          const notified = events.some(
            (e) => e.kind === "notification" && e.payload["action_id"] === "send-it",
          );
          if (notified) resolve();
        },
        { maxEvents: 50, reconnectDelayMs: 100 },
      );
      setTimeout(resolve, 10000);
    });

    const submit = await fetch(`${BASE}/v1/chains`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        chain_id: "rt-1",
        actions: [
          {
            id: "read-inbox",
            decision_type_id: "summarize_inbox",
            user_id: "user-1",
            input_trust: "untrusted",
            targets: ["mailbox"],
            requested_scopes: { inbox: ["read"] },
          },
          {
            id: "send-it",
            decision_type_id: "send_email",
            user_id: "user-1",
            input_trust: "untrusted",
            targets: ["mail_sender"],
            requested_scopes: { outbound_mail: ["send"] },
            producers: ["read-inbox"],
          },
          {
            id: "independent",
            decision_type_id: "summarize_inbox",
            user_id: "user-1",
            input_trust: "trusted",
            targets: ["mailbox"],
            requested_scopes: { inbox: ["read"] },
          },
        ],
      }),
    });
    results.push(check("chain submitted", submit.status === 201, `${submit.status}`));
    await streamDone;

    const notificationIndex = events.findIndex(
      (e) => e.kind === "notification" && e.payload["action_id"] === "send-it",
    );
    const holdAssessmentIndex = events.findIndex(
      (e) =>
        e.kind === "assessment" &&
        e.payload["action_id"] === "send-it" &&
        e.payload["level"] === "pre_execution_approval",
    );
    results.push(
      check(
        "held action appears on the stream within one event of its assessment",
        notificationIndex !== -1 &&
          holdAssessmentIndex !== -1 &&
          notificationIndex - holdAssessmentIndex === 1,
        `assessment at ${holdAssessmentIndex}, notification at ${notificationIndex}`,
      ),
    );
    results.push(
      check(
        "queue view renders the held item",
        queue.has("send-it") && renderQueue(queue.ordered()).includes("send-it"),
      ),
    );

    // Check 2: approve with rationale transitions the DAG view.
    const before = await client.chainState("rt-1");
    const beforeSvg = renderChainSvg(before);
    const heldBefore = beforeSvg.includes('data-node="send-it" data-status="held"');
    await client.decide("send-it", "approve", "content reviewed by roundtrip", "rt-approver");
    const after = await client.chainState("rt-1");
    const afterSvg = renderChainSvg(after);
    results.push(
      check(
        "approve transitions the DAG view out of held",
        heldBefore &&
          (afterSvg.includes('data-node="send-it" data-status="ready"') ||
            afterSvg.includes('data-node="send-it" data-status="pending"')),
        `before held=${heldBefore}`,
      ),
    );
    results.push(
      check(
        "independent branch kept its status",
        after.nodes["independent"]?.status === before.nodes["independent"]?.status,
      ),
    );

    // Check 3: tampered ledger byte renders a failed badge at the right seq.
    const tamperSeq = 2;
    const segment = join(ledgerDir, "segment-00000000.log");
    const raw = readFileSync(segment);
    const lines = raw.toString("latin1").split("\n");
    const line = lines[1 + tamperSeq]!;
    const spaceAt = line.indexOf(" ");
    const body = line.slice(spaceAt + 1);
    const flippedChar = String.fromCharCode(body.charCodeAt(12) ^ 0x01);
    lines[1 + tamperSeq] =
      line.slice(0, spaceAt + 1) + body.slice(0, 12) + flippedChar + body.slice(13);
    writeFileSync(segment, Buffer.from(lines.join("\n"), "latin1"));

    const verify = await client.verifyLedger();
    const badge = renderVerifyBadge(verify);
    results.push(
      check(
        `tampered ledger renders failed badge at seq ${tamperSeq}`,
        !verify.ok && verify.first_bad_seq === tamperSeq && badge.includes(`seq ${tamperSeq}`),
        `ok=${verify.ok} first_bad=${verify.first_bad_seq}`,
      ),
    );
  } finally {
    gateway.kill("SIGTERM");
  }

  const passed = results.every(Boolean);
  console.log(passed ? "roundtrip: pass" : "roundtrip: FAIL");
  return passed ? 0 : 1;
}

main()
  .then((code) => process.exit(code))
  .catch((error) => {
    console.error(error);
    process.exit(1);
  });
