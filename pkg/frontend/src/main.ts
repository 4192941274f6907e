/**
 * Browser bootstrap: wires the API client, queue state, and views into the
 * page. Configuration is one gateway URL plus a token, taken from query
 * parameters or localStorage.
 */

import { GatewayApiError, GatewayClient, type PendingItem } from "./api.js";
import { renderChainSvg } from "./dag.js";
import {
  renderConnectionBanner,
  renderDecideForm,
  renderDetail,
  renderDriftDashboard,
  renderEvidence,
  renderLedgerRows,
  renderQueue,
  renderVerifyBadge,
} from "./render.js";
import { ApprovalQueue } from "./state.js";

function config() {
  const params = new URLSearchParams(window.location.search);
  const baseUrl =
    params.get("gateway") ??
    localStorage.getItem("agentgate.url") ??
    "http://127.0.0.1:8400";
  const token = params.get("token") ?? localStorage.getItem("agentgate.token") ?? "";
  localStorage.setItem("agentgate.url", baseUrl);
  if (token) localStorage.setItem("agentgate.token", token);
  return { baseUrl, token: token || undefined };
}

const client = new GatewayClient(config());
const queue = new ApprovalQueue();

let selectedAction: string | undefined;
let selectedChain: string | undefined;
let rationaleDraft = "";
let approvalTimeoutSeconds: number | null = null;

const $ = (id: string) => document.getElementById(id)!;

function redrawQueue() {
  const items = queue.ordered();
  $("queue").innerHTML = renderQueue(items, selectedAction);
  const current = items.find((item) => item.action_id === selectedAction);
  if (current) {
    const expiresIn =
      approvalTimeoutSeconds === null
        ? undefined
        : current.held_at + approvalTimeoutSeconds - Date.now() / 1000;
    $("detail").innerHTML =
      renderDetail(current, expiresIn) + renderDecideForm(current.action_id, rationaleDraft);
    wireDecideForm();
  } else if (selectedAction) {
    $("detail").innerHTML = `<p class="empty">Resolved by an approver.</p>`;
  } else {
    $("detail").innerHTML = `<p class="empty">Select a pending item.</p>`;
  }
  for (const element of $("queue").querySelectorAll(".queue-item")) {
    element.addEventListener("click", () => {
      selectedAction = (element as HTMLElement).dataset["action"];
      const item = items.find((i) => i.action_id === selectedAction);
      selectedChain = item?.chain_id ?? selectedChain;
      rationaleDraft = "";
      redrawQueue();
      void redrawChain();
    });
  }
}

function wireDecideForm() {
  const form = $("detail").querySelector(".decide") as HTMLFormElement | null;
  if (!form) return;
  const textarea = form.querySelector("textarea")!;
  textarea.addEventListener("input", () => {
    rationaleDraft = textarea.value;
    const empty = rationaleDraft.trim().length === 0;
    for (const button of form.querySelectorAll("button")) {
      (button as HTMLButtonElement).disabled = empty;
    }
  });
  for (const button of form.querySelectorAll("button")) {
    button.addEventListener("click", async () => {
      const actionId = form.dataset["action"]!;
      const decision = (button as HTMLElement).dataset["decision"] as "approve" | "reject";
      queue.removeOptimistically(actionId);
      redrawQueue();
      try {
        await client.decide(actionId, decision, rationaleDraft, "console-approver");
        rationaleDraft = "";
      } catch (error) {
        if (error instanceof GatewayApiError && error.status === 409) {
          $("detail").innerHTML = `<p class="empty">Already resolved.</p>`;
        } else {
          queue.restore(actionId);
          alert(`decision failed: ${error}`);
        }
      }
      redrawQueue();
      void redrawChain();
      void redrawLedger();
    });
  }
}

async function redrawChain() {
  if (!selectedChain) return;
  try {
    const chain = await client.chainState(selectedChain);
    $("dag").innerHTML = `<h3>chain ${chain.chain_id}</h3>` + renderChainSvg(chain);
  } catch {
    $("dag").innerHTML = `<p class="empty">chain unavailable</p>`;
  }
}

async function redrawLedger() {
  try {
    const [verify, entries] = await Promise.all([
      client.verifyLedger(),
      client.ledgerEntries(0),
    ]);
    $("verify").innerHTML = renderVerifyBadge(verify);
    $("ledger").innerHTML = renderLedgerRows(entries.entries.slice(-200));
    for (const row of $("ledger").querySelectorAll("tr[data-seq]")) {
      row.addEventListener("click", async () => {
        const actionId = (row as HTMLElement).lastElementChild?.textContent;
        if (!actionId) return;
        try {
          $("evidence").innerHTML = renderEvidence(await client.evidence(actionId));
        } catch {
          $("evidence").innerHTML = `<p class="empty">no evidentiary chain</p>`;
        }
      });
    }
  } catch (error) {
    $("verify").innerHTML = `<span class="badge verify-bad">ledger unreachable</span>`;
  }
}

async function redrawDrift() {
  try {
    const { reports } = await client.driftReports();
    $("drift").innerHTML = renderDriftDashboard(reports);
  } catch {
    $("drift").innerHTML = `<p class="empty">drift reports unavailable</p>`;
  }
}

async function start() {
  try {
    const policy = await client.policySummary();
    if (policy.approval_timeout.mode === "expire_to_reject") {
      approvalTimeoutSeconds = policy.approval_timeout.seconds;
      setInterval(redrawQueue, 1000); // keep countdowns current
    }
  } catch {
    /* policy summary is optional for rendering */
  }
  const { pending } = await client.pendingApprovals();
  queue.seed(pending);
  redrawQueue();
  await Promise.all([redrawLedger(), redrawDrift()]);

  client.subscribe(queue.lastSeq, (event) => {
    queue.apply(event);
    if (event.kind === "notification" && !selectedAction) {
      selectedAction = event.payload["action_id"];
      selectedChain = event.payload["chain_id"];
    }
    redrawQueue();
    if (
      ["human_decision", "execution_outcome", "drift_event", "disclosure"].includes(
        event.kind,
      )
    ) {
      void redrawChain();
      void redrawLedger();
      void redrawDrift();
    }
  }, {
    onStateChange: (connected) => {
      $("banner").innerHTML = renderConnectionBanner(connected);
    },
  });
}

void start();
