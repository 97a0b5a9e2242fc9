"""Inter-annotator and human-vs-LLM agreement statistics: raw quorum
agreement, Krippendorff's alpha (nominal), conditional coarse/fine agreement,
Cohen's kappa, and majority voting with LLM fallback."""

from __future__ import annotations

import csv
import random
from collections import Counter
from dataclasses import dataclass

from .errors import NoPairableValuesError


@dataclass(frozen=True)
class LabelMatrix:
    item_ids: tuple[str, ...]
    annotator_ids: tuple[str, ...]
    cells: tuple[tuple[str | None, ...], ...]  # rows by item, columns by annotator

    def __post_init__(self):
        if len(self.annotator_ids) < 2:
            raise ValueError("at least 2 annotators required")
        if len(self.item_ids) < 1:
            raise ValueError("at least 1 item required")
        for row in self.cells:
            if len(row) != len(self.annotator_ids):
                raise ValueError("row width must match annotator count")
        if len(self.cells) != len(self.item_ids):
            raise ValueError("row count must match item count")

    def row(self, i: int) -> tuple[str | None, ...]:
        return self.cells[i]


def load_matrix_csv(path) -> LabelMatrix:
    """CSV interchange: header `item_id,<annotator>...`, empty cell = missing."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        annotators = tuple(header[1:])
        items, cells = [], []
        for row in reader:
            if not row:
                continue
            items.append(row[0])
            cells.append(tuple(c if c != "" else None for c in row[1:]))
    return LabelMatrix(item_ids=tuple(items), annotator_ids=annotators, cells=tuple(cells))


def _present(row) -> list[str]:
    return [c for c in row if c is not None]


def raw_agreement(m: LabelMatrix, quorum: int) -> float:
    """Fraction of items where some label reaches the quorum; all-missing
    items leave the denominator."""
    if not 1 <= quorum <= len(m.annotator_ids):
        raise ValueError(f"quorum must be in 1..{len(m.annotator_ids)}, got {quorum}")
    n = hits = 0
    for row in m.cells:
        values = _present(row)
        if not values:
            continue
        n += 1
        if max(Counter(values).values()) >= quorum:
            hits += 1
    return hits / n if n else 0.0


def krippendorff_alpha(m: LabelMatrix) -> float:
    """Nominal-data alpha from the coincidence-matrix formulation.

    Units with fewer than two values are excluded; a zero expected
    disagreement (all observed values identical) yields 1.0.
    """
    units = [_present(row) for row in m.cells]
    units = [u for u in units if len(u) >= 2]
    total = sum(len(u) for u in units)
    if total < 2:
        raise NoPairableValuesError("need at least 2 pairable values")

    labels = sorted({v for u in units for v in u})
    index = {v: i for i, v in enumerate(labels)}
    k = len(labels)
    coincidence = [[0.0] * k for _ in range(k)]
    for u in units:
        m_u = len(u)
        for a in range(m_u):
            for b in range(m_u):
                if a != b:
                    coincidence[index[u[a]]][index[u[b]]] += 1.0 / (m_u - 1)

    n_c = [sum(coincidence[c]) for c in range(k)]
    n = sum(n_c)
    d_observed = sum(coincidence[c][d] for c in range(k) for d in range(k) if c != d)
    d_expected = sum(n_c[c] * n_c[d] for c in range(k) for d in range(k) if c != d) / (n - 1)
    if d_expected == 0.0:
        return 1.0
    return 1.0 - d_observed / d_expected


def agreement_report(m: LabelMatrix) -> dict:
    """Raw quorum fractions for every quorum 2..n plus Krippendorff's alpha."""
    n = len(m.annotator_ids)
    return {
        "raw_quorum": {f"{q}/{n}": raw_agreement(m, q) for q in range(2, n + 1)},
        "alpha": krippendorff_alpha(m),
    }


def conditional_agreement(coarse: LabelMatrix, fine: LabelMatrix, mode: str = "exact") -> dict:
    """Fine-grained quorum rates conditioned on coarse consensus level.

    mode='exact' conditions on exactly-m coarse agreement (so the 2/3 row
    excludes unanimous items); mode='at_least' uses nested populations.
    """
    if coarse.item_ids != fine.item_ids or coarse.annotator_ids != fine.annotator_ids:
        raise ValueError("coarse and fine matrices must share items and annotators")
    if len(coarse.annotator_ids) != 3:
        raise ValueError("conditional agreement is defined for exactly 3 annotators")
    if mode not in ("exact", "at_least"):
        raise ValueError(f"mode must be 'exact' or 'at_least', got {mode!r}")

    def top_count(row):
        values = _present(row)
        return max(Counter(values).values()) if values else 0

    table = {}
    for coarse_q in (2, 3):
        if mode == "exact":
            subset = [i for i in range(len(coarse.cells)) if top_count(coarse.cells[i]) == coarse_q]
        else:
            subset = [i for i in range(len(coarse.cells)) if top_count(coarse.cells[i]) >= coarse_q]
        for fine_q in (2, 3):
            hits = sum(1 for i in subset if top_count(fine.cells[i]) >= fine_q)
            table[f"{coarse_q}/3_coarse|{fine_q}/3_fine"] = hits / len(subset) if subset else 0.0
    return table


def cohen_kappa(a: list[str], b: list[str]) -> dict:
    """Cohen's kappa between two equal-length label lists."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    if not a:
        raise ValueError("empty input")
    n = len(a)
    po = sum(1 for x, y in zip(a, b) if x == y) / n
    counts_a = Counter(a)
    counts_b = Counter(b)
    pe = sum(counts_a[l] * counts_b.get(l, 0) for l in counts_a) / (n * n)
    kappa = 1.0 if pe == 1.0 else (po - pe) / (1.0 - pe)
    return {"kappa": kappa, "observed_agreement": po, "expected_agreement": pe}


def majority_with_fallback(m: LabelMatrix, llm: dict, seed: int = 0) -> dict:
    """Per-item 2/3-majority human label, falling back to the LLM prediction.

    `llm` maps item id to either a single label or a list of stored run
    predictions; with a list, the fallback is a seeded uniform choice.
    """
    rng = random.Random(seed)
    labels = []
    for i, item in enumerate(m.item_ids):
        if item not in llm:
            raise KeyError(f"no LLM prediction for item {item!r}")
        values = _present(m.cells[i])
        counts = Counter(values)
        if values and max(counts.values()) >= 2:
            label = counts.most_common(1)[0][0]
        else:
            pred = llm[item]
            label = rng.choice(list(pred)) if isinstance(pred, (list, tuple)) else pred
        labels.append(label)
    return {"labels": labels, "seed": seed}
