/** Client-side taxonomy helpers: coarse→fine filtering and shortcut keys. */

import type { CoarseCode, FineLabel, Taxonomy } from "./types.js";

export type LabelKind = "split" | "canonical";

/** Fine options for a coarse category, in declaration order.
 *
 * In canonical mode each merged label appears once, under its canonical id.
 */
export function fineOptionsFor(
  taxonomy: Taxonomy,
  coarse: CoarseCode,
  kind: LabelKind = "split",
): FineLabel[] {
  const inGroup = taxonomy.labels.filter((label) => label.coarse === coarse);
  if (kind === "split") {
    return inGroup;
  }
  const seen = new Set<string>();
  const options: FineLabel[] = [];
  for (const label of inGroup) {
    if (seen.has(label.canonical_id)) continue;
    seen.add(label.canonical_id);
    options.push({ ...label, id: label.canonical_id });
  }
  return options;
}

export function coarseOf(taxonomy: Taxonomy, fineId: string): CoarseCode | null {
  const match = taxonomy.labels.find(
    (label) => label.id === fineId || label.canonical_id === fineId,
  );
  return match ? match.coarse : null;
}

/** Keyboard shortcut letters for fine options: a, b, c, ... per group. */
export function shortcutKey(index: number): string {
  return String.fromCharCode("a".charCodeAt(0) + index);
}

export const COARSE_SHORTCUTS: Record<string, CoarseCode> = {
  "1": "A",
  "2": "B",
  "3": "C",
};
