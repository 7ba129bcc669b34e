/** Browser bootstrap: hash router over the pure renderers.
 *
 * Every state change waits for the API response and re-renders from it;
 * the UI never shows a state the registry has not confirmed.
 */

import { ApiError, RegistryClient } from "./api.js";
import {
  emptyCard,
  filterRows,
  sortRows,
  validateCard,
  type ModelCard,
  type SortKey,
} from "./model.js";
import {
  renderAdminQueue,
  renderDetail,
  renderError,
  renderLeaderboardTable,
  renderSubmissionForm,
} from "./render.js";

const root = document.getElementById("app") as HTMLElement;
const client = new RegistryClient(window.location.origin);

let sortKey: SortKey = "mean_auc";
let sortDescending = true;
let filterText = "";

function adminToken(): string | null {
  let token = sessionStorage.getItem("toxbench-admin-token");
  if (!token) {
    token = window.prompt("Admin token:");
    if (token) sessionStorage.setItem("toxbench-admin-token", token);
  }
  return token;
}

async function showLeaderboard(): Promise<void> {
  try {
    const rows = await client.leaderboard({
      sort: sortKey,
      dir: sortDescending ? "desc" : "asc",
    });
    const visible = filterRows(sortRows(rows, sortKey, sortDescending), filterText);
    root.innerHTML = `
      <input id="filter" placeholder="filter by model or developer"
             value="${filterText.replaceAll('"', "&quot;")}" />
      ${renderLeaderboardTable(visible)}`;
    const filter = document.getElementById("filter") as HTMLInputElement;
    filter.addEventListener("input", () => {
      filterText = filter.value;
      void showLeaderboard();
    });
    for (const link of root.querySelectorAll<HTMLAnchorElement>("[data-sort]")) {
      link.addEventListener("click", (event) => {
        event.preventDefault();
        const key = link.dataset.sort as SortKey;
        sortDescending = key === sortKey ? !sortDescending : key === "mean_auc";
        sortKey = key;
        void showLeaderboard();
      });
    }
  } catch (error) {
    root.innerHTML = renderError(String(error));
  }
}

async function showDetail(id: number): Promise<void> {
  try {
    const doc = await client.submission(id);
    root.innerHTML = renderDetail(doc);
  } catch (error) {
    root.innerHTML = renderError(String(error));
  }
}

function showSubmitForm(card: ModelCard = emptyCard(), problems: string[] = []): void {
  root.innerHTML = renderSubmissionForm(card, problems);
  const form = document.getElementById("submission-form") as HTMLFormElement;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const values = emptyCard();
    for (const input of form.querySelectorAll<HTMLInputElement>("input[name]")) {
      values[input.name as keyof ModelCard] = input.value;
    }
    // advisory pre-check; the server re-validates and its verdict wins
    const localProblems = validateCard(values);
    if (localProblems.length) {
      showSubmitForm(values, localProblems);
      return;
    }
    client
      .submitCard(values)
      .then((doc) => {
        root.innerHTML = `<p class="ok">Submission ${doc.id} created
          (status ${doc.status}). An administrator will evaluate it.</p>`;
      })
      .catch((error: unknown) => {
        const problemsFromServer =
          error instanceof ApiError && error.problems.length
            ? error.problems
            : [String(error)];
        showSubmitForm(values, problemsFromServer);
      });
  });
}

async function showAdminQueue(): Promise<void> {
  const token = adminToken();
  if (!token) {
    root.innerHTML = renderError("Admin token required.");
    return;
  }
  const admin = new RegistryClient(window.location.origin, token);
  try {
    const rows = await admin.adminQueue();
    root.innerHTML = renderAdminQueue(rows);
    for (const button of root.querySelectorAll<HTMLButtonElement>("[data-action]")) {
      button.addEventListener("click", () => {
        const id = Number(button.dataset.id);
        const decision = button.dataset.action as "approve" | "reject";
        const note = root.querySelector<HTMLInputElement>(`input.note[data-id="${id}"]`);
        admin
          .review(id, decision, "webui-admin", note?.value ?? "")
          .then(() => showAdminQueue())
          .catch((error: unknown) => {
            root.innerHTML = renderError(String(error));
          });
      });
    }
  } catch (error) {
    if (error instanceof ApiError && error.status === 401) {
      sessionStorage.removeItem("toxbench-admin-token");
    }
    root.innerHTML = renderError(String(error));
  }
}

function route(): void {
  const hash = window.location.hash || "#/leaderboard";
  const detail = hash.match(/^#\/detail\/(\d+)$/);
  if (detail) {
    void showDetail(Number(detail[1]));
  } else if (hash === "#/submit") {
    showSubmitForm();
  } else if (hash === "#/admin") {
    void showAdminQueue();
  } else {
    void showLeaderboard();
  }
}

window.addEventListener("hashchange", route);
route();
