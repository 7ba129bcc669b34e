/** UI flows against a live registry service (spawned from the CLI).
 *
 * Covers the console's acceptance behaviors end to end: itemized server
 * errors on invalid submissions, the review queue moving an entry onto
 * the public table, and the client sort matching the registry's default
 * order.
 */

import assert from "node:assert/strict";
import { after, before, test } from "node:test";
import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { ApiError, RegistryClient } from "../src/api.js";
import { emptyCard, sortRows } from "../src/model.js";
import { renderLeaderboardTable, renderSubmissionForm } from "../src/render.js";

const TOKEN = "integration-token";

let server: ChildProcess;
let baseUrl: string;

function completeCard(name: string) {
  const card = emptyCard();
  card.model_name = name;
  card.developer = "webui integration";
  card.architecture = "linear";
  card.model_version = "v1";
  card.space_url = "https://example.org/space";
  card.commit_hash = "cafef00d";
  return card;
}

before(async () => {
  const store = join(mkdtempSync(join(tmpdir(), "toxbench-ui-")), "events.jsonl");
  server = spawn(
    "python3",
    ["-m", "toxbench.cli", "registry-serve", "--store", store, "--port", "0",
     "--token", TOKEN],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  baseUrl = await new Promise<string>((resolve, reject) => {
    const timer = setTimeout(
      () => reject(new Error("registry did not start within 15s")),
      15_000,
    );
    let buffer = "";
    server.stdout!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
      const match = buffer.match(/registry listening on (http:\/\/[^\s]+)/);
      if (match) {
        clearTimeout(timer);
        resolve(match[1]!);
      }
    });
    server.stderr!.on("data", () => undefined);
    server.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`registry exited early with code ${code}`));
    });
  });
});

after(() => {
  server.kill();
});

test("invalid submission surfaces the server's itemized error in the form", async () => {
  const client = new RegistryClient(baseUrl);
  const card = emptyCard();
  card.model_name = "incomplete";
  let caught: ApiError | null = null;
  try {
    await client.submitCard(card);
  } catch (error) {
    caught = error as ApiError;
  }
  assert.ok(caught, "server accepted an incomplete card");
  assert.equal(caught.status, 400);
  assert.ok(caught.problems.some((p) => p.includes("commit_hash")));

  // the form renders exactly the server's problems inline
  const html = renderSubmissionForm(card, caught.problems);
  assert.match(html, /missing required field: commit_hash/);
  assert.match(html, /name="commit_hash"[^]*?field-error/);
});

test("approving the sole preliminary entry publishes it", async () => {
  const anon = new RegistryClient(baseUrl);
  const admin = new RegistryClient(baseUrl, TOKEN);

  const created = await anon.submitCard(completeCard("Queue Walker"));
  // drive pending -> evaluating -> preliminary through the admin API
  await fetch(`${baseUrl}/submissions/${created.id}/start`, {
    method: "POST",
    headers: { "X-Admin-Token": TOKEN },
  });
  await fetch(`${baseUrl}/submissions/${created.id}/result`, {
    method: "POST",
    headers: { "X-Admin-Token": TOKEN, "Content-Type": "application/json" },
    body: JSON.stringify({
      status: "scored",
      mean_auc: 0.901,
      per_endpoint: { "NR-AR": 0.9 },
    }),
  });

  const queue = await admin.adminQueue();
  assert.deepEqual(queue.map((r) => r.id), [created.id]);

  const publicBefore = await anon.leaderboard();
  assert.ok(!publicBefore.some((r) => r.id === created.id));

  await admin.review(created.id, "approve", "webui-admin", "looks right");

  const queueAfter = await admin.adminQueue();
  assert.equal(queueAfter.length, 0);

  const publicAfter = await anon.leaderboard();
  const published = publicAfter.find((r) => r.id === created.id);
  assert.ok(published, "approved entry missing from the public table");
  assert.equal(published.mean_auc, 0.901);
  assert.match(renderLeaderboardTable(publicAfter), /Queue Walker/);
});

test("client sort order equals the registry default", async () => {
  const anon = new RegistryClient(baseUrl);
  const admin = new RegistryClient(baseUrl, TOKEN);

  // two more approved entries incl. an AUC tie to exercise the tie-break
  for (const [name, auc] of [["Tie Early", 0.901], ["Lower Bar", 0.801]] as const) {
    const created = await anon.submitCard(completeCard(name));
    await fetch(`${baseUrl}/submissions/${created.id}/start`, {
      method: "POST",
      headers: { "X-Admin-Token": TOKEN },
    });
    await fetch(`${baseUrl}/submissions/${created.id}/result`, {
      method: "POST",
      headers: { "X-Admin-Token": TOKEN, "Content-Type": "application/json" },
      body: JSON.stringify({ status: "scored", mean_auc: auc, per_endpoint: {} }),
    });
    await admin.review(created.id, "approve", "webui-admin");
  }

  const serverOrder = await anon.leaderboard();
  assert.ok(serverOrder.length >= 3);

  const shuffled = [...serverOrder].reverse();
  const clientOrder = sortRows(shuffled);
  assert.deepEqual(
    clientOrder.map((r) => r.id),
    serverOrder.map((r) => r.id),
  );
});
