/** View models and pure client-side logic shared by views and tests. */

export interface LeaderboardRow {
  id: number;
  model_name: string;
  developer: string;
  status: string;
  mean_auc: number | null;
  per_endpoint: Record<string, number> | null;
  submitted_at: string;
}

export interface ModelCard {
  model_name: string;
  developer: string;
  paper_url: string;
  architecture: string;
  inference_notes: string;
  model_version: string;
  model_date: string;
  reproducibility_statement: string;
  intended_use: string;
  metric: string;
  training_data: string;
  evaluation_data: string;
  space_url: string;
  commit_hash: string;
}

export const CARD_FIELDS: (keyof ModelCard)[] = [
  "model_name",
  "developer",
  "paper_url",
  "architecture",
  "inference_notes",
  "model_version",
  "model_date",
  "reproducibility_statement",
  "intended_use",
  "metric",
  "training_data",
  "evaluation_data",
  "space_url",
  "commit_hash",
];

/** Must stay in sync with the registry's required-field list. */
export const REQUIRED_CARD_FIELDS: (keyof ModelCard)[] = [
  "model_name",
  "developer",
  "architecture",
  "model_version",
  "space_url",
  "commit_hash",
];

export function emptyCard(): ModelCard {
  const card = {} as ModelCard;
  for (const field of CARD_FIELDS) card[field] = "";
  return card;
}

/**
 * Client-side mirror of the server's card validation. Advisory only: the
 * server's verdict is authoritative and always re-checked on submit.
 */
export function validateCard(card: ModelCard): string[] {
  const problems: string[] = [];
  for (const field of REQUIRED_CARD_FIELDS) {
    if (!card[field] || !card[field].trim()) {
      problems.push(`missing required field: ${field}`);
    }
  }
  if (card.space_url.trim()) {
    let ok = false;
    try {
      const parsed = new URL(card.space_url);
      ok = parsed.protocol === "http:" || parsed.protocol === "https:";
    } catch {
      ok = false;
    }
    if (!ok) problems.push(`space_url does not parse as a URL: '${card.space_url}'`);
  }
  return problems;
}

/** Table 1 convention: AUCs always show three decimals. */
export function formatAuc(value: number | null): string {
  return value === null || value === undefined ? "-" : value.toFixed(3);
}

export type SortKey = "mean_auc" | "date" | "name";

/**
 * Ordering identical to the registry default: chosen key in the chosen
 * direction, ties always broken toward the earlier submission id.
 */
export function compareRows(
  a: LeaderboardRow,
  b: LeaderboardRow,
  key: SortKey = "mean_auc",
  descending = true,
): number {
  let primary: number;
  if (key === "mean_auc") {
    const av = a.mean_auc ?? -Infinity;
    const bv = b.mean_auc ?? -Infinity;
    primary = av < bv ? -1 : av > bv ? 1 : 0;
  } else if (key === "date") {
    primary = a.submitted_at < b.submitted_at ? -1 : a.submitted_at > b.submitted_at ? 1 : 0;
  } else {
    const an = a.model_name.toLowerCase();
    const bn = b.model_name.toLowerCase();
    primary = an < bn ? -1 : an > bn ? 1 : 0;
  }
  if (descending) primary = -primary;
  if (primary !== 0) return primary;
  return a.id - b.id;
}

export function sortRows(
  rows: LeaderboardRow[],
  key: SortKey = "mean_auc",
  descending = true,
): LeaderboardRow[] {
  return [...rows].sort((a, b) => compareRows(a, b, key, descending));
}

export function filterRows(rows: LeaderboardRow[], text: string): LeaderboardRow[] {
  const needle = text.trim().toLowerCase();
  if (!needle) return rows;
  return rows.filter(
    (row) =>
      row.model_name.toLowerCase().includes(needle) ||
      row.developer.toLowerCase().includes(needle),
  );
}
