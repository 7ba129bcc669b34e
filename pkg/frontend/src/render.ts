/** Pure HTML renderers: strings in, strings out, no DOM access.
 * Keeping these pure lets the node test runner exercise every view. */

import { formatAuc, CARD_FIELDS, REQUIRED_CARD_FIELDS } from "./model.js";
import type { LeaderboardRow, ModelCard } from "./model.js";
import type { SubmissionDoc } from "./api.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

export function renderLeaderboardTable(rows: LeaderboardRow[]): string {
  if (!rows.length) {
    return `<p class="empty">No approved submissions yet.</p>`;
  }
  const body = rows
    .map(
      (row, index) => `
    <tr data-id="${row.id}">
      <td>${index + 1}</td>
      <td><a href="#/detail/${row.id}">${escapeHtml(row.model_name)}</a></td>
      <td>${escapeHtml(row.developer)}</td>
      <td class="num">${formatAuc(row.mean_auc)}</td>
      <td>${escapeHtml(row.submitted_at.slice(0, 10))}</td>
    </tr>`,
    )
    .join("");
  return `
  <table class="leaderboard">
    <thead>
      <tr>
        <th>#</th>
        <th><a href="#" data-sort="name">Model</a></th>
        <th>Developer</th>
        <th class="num"><a href="#" data-sort="mean_auc">Mean AUC</a></th>
        <th><a href="#" data-sort="date">Submitted</a></th>
      </tr>
    </thead>
    <tbody>${body}</tbody>
  </table>`;
}

/** Twelve-endpoint horizontal bar chart plus the model card. */
export function renderDetail(doc: SubmissionDoc): string {
  const per = doc.result?.per_endpoint ?? {};
  const bars = Object.entries(per)
    .map(([endpoint, auc]) => {
      const width = Math.round(Math.max(0, Math.min(1, auc)) * 100);
      return `
      <div class="bar-row">
        <span class="bar-label">${escapeHtml(endpoint)}</span>
        <span class="bar-track"><span class="bar-fill" style="width:${width}%"></span></span>
        <span class="bar-value">${formatAuc(auc)}</span>
      </div>`;
    })
    .join("");
  const cardRows = CARD_FIELDS.map((field) => {
    const value = doc.card[field] ?? "";
    return `
      <tr><th>${escapeHtml(field)}</th><td>${escapeHtml(value)}</td></tr>`;
  }).join("");
  return `
  <section class="detail">
    <h2>${escapeHtml(doc.card.model_name)} <span class="status ${doc.status}">${doc.status}</span></h2>
    <p>Mean AUC: <strong>${formatAuc(doc.result?.mean_auc ?? null)}</strong></p>
    <div class="chart">${bars || "<p class=\"empty\">No per-endpoint scores.</p>"}</div>
    <h3>Model card</h3>
    <table class="card">${cardRows}</table>
  </section>`;
}

export function renderSubmissionForm(card: ModelCard, problems: string[] = []): string {
  const problemList = problems.length
    ? `<ul class="problems">${problems
        .map((p) => `<li>${escapeHtml(p)}</li>`)
        .join("")}</ul>`
    : "";
  const inputs = CARD_FIELDS.map((field) => {
    const required = REQUIRED_CARD_FIELDS.includes(field);
    const marker = required ? ` <span class="required">*</span>` : "";
    const fieldProblems = problems.filter((p) => p.includes(field));
    const inline = fieldProblems.length
      ? `<span class="field-error">${escapeHtml(fieldProblems[0] ?? "")}</span>`
      : "";
    return `
    <label>${escapeHtml(field)}${marker}
      <input name="${field}" value="${escapeHtml(card[field] ?? "")}" />${inline}
    </label>`;
  }).join("");
  return `
  <form id="submission-form" class="submission">
    ${problemList}
    ${inputs}
    <button type="submit">Submit for evaluation</button>
  </form>`;
}

export function renderAdminQueue(rows: LeaderboardRow[]): string {
  if (!rows.length) {
    return `<p class="empty">Review queue is empty.</p>`;
  }
  const body = rows
    .map(
      (row) => `
    <tr data-id="${row.id}">
      <td>${row.id}</td>
      <td>${escapeHtml(row.model_name)}</td>
      <td class="num">${formatAuc(row.mean_auc)}</td>
      <td>
        <input class="note" data-id="${row.id}" placeholder="review note" />
        <button data-action="approve" data-id="${row.id}">Approve</button>
        <button data-action="reject" data-id="${row.id}">Reject</button>
      </td>
    </tr>`,
    )
    .join("");
  return `
  <table class="queue">
    <thead><tr><th>id</th><th>Model</th><th class="num">Mean AUC</th><th>Review</th></tr></thead>
    <tbody>${body}</tbody>
  </table>`;
}

export function renderError(message: string): string {
  return `<p class="error">${escapeHtml(message)}</p>`;
}
