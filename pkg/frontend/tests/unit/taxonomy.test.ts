// @vitest-environment node
import { describe, expect, it } from "vitest";

import { COARSE_SHORTCUTS, coarseOf, fineOptionsFor, shortcutKey } from "../../src/taxonomy.js";
import { TAXONOMY } from "../fixtures/taxonomy.js";

describe("fineOptionsFor", () => {
  it("splits fine options 5/5/7 across A/B/C", () => {
    expect(fineOptionsFor(TAXONOMY, "A").length).toBe(5);
    expect(fineOptionsFor(TAXONOMY, "B").length).toBe(5);
    expect(fineOptionsFor(TAXONOMY, "C").length).toBe(7);
  });

  it("canonical mode shows 5/5/4", () => {
    expect(fineOptionsFor(TAXONOMY, "A", "canonical").length).toBe(5);
    expect(fineOptionsFor(TAXONOMY, "B", "canonical").length).toBe(5);
    expect(fineOptionsFor(TAXONOMY, "C", "canonical").length).toBe(4);
  });

  it("offers exactly the labels whose coarse matches", () => {
    for (const code of ["A", "B", "C"] as const) {
      const offered = fineOptionsFor(TAXONOMY, code).map((l) => l.id);
      const expected = TAXONOMY.labels.filter((l) => l.coarse === code).map((l) => l.id);
      expect(offered).toEqual(expected);
    }
  });

  it("canonical mode deduplicates merged labels under the canonical id", () => {
    const ids = fineOptionsFor(TAXONOMY, "C", "canonical").map((l) => l.id);
    expect(ids).toEqual([
      "doubt",
      "appeal_to_authority",
      "whataboutism_straw_man_red_herring",
      "bandwagon_reductio_ad_hitlerum",
    ]);
  });
});

describe("coarseOf", () => {
  it("maps split and canonical ids", () => {
    expect(coarseOf(TAXONOMY, "slogans")).toBe("A");
    expect(coarseOf(TAXONOMY, "straw_man")).toBe("C");
    expect(coarseOf(TAXONOMY, "whataboutism_straw_man_red_herring")).toBe("C");
    expect(coarseOf(TAXONOMY, "sarcasm")).toBeNull();
  });
});

describe("shortcuts", () => {
  it("digits map to coarse codes", () => {
    expect(COARSE_SHORTCUTS).toEqual({ "1": "A", "2": "B", "3": "C" });
  });

  it("fine shortcuts are sequential letters", () => {
    expect([0, 1, 6].map(shortcutKey)).toEqual(["a", "b", "g"]);
  });
});
