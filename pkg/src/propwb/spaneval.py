"""Span-level evaluation: exact/fuzzy span F1, exact/fuzzy local-label F1,
and global macro/micro F1 over predicted-vs-gold annotation pairs."""

from __future__ import annotations

from dataclasses import dataclass

from ._levenshtein import levenshtein
from .results import AnnotationResult

DEFAULT_THRESHOLD = 0.8


@dataclass(frozen=True)
class EvalPair:
    doc_id: str
    predicted: AnnotationResult
    gold: AnnotationResult

    def __post_init__(self):
        if self.predicted.doc_id != self.gold.doc_id:
            raise ValueError("predicted and gold results must share a doc_id")


def _norm(text: str) -> str:
    return " ".join(text.lower().split())


def similarity(a: str, b: str) -> float:
    """Normalized edit-distance similarity on lowercased, space-collapsed text."""
    na, nb = _norm(a), _norm(b)
    if not na and not nb:
        return 1.0
    longest = max(len(na), len(nb))
    return 1.0 - levenshtein(na, nb) / longest


def match_spans(pred: list[str], gold: list[str], mode: str = "exact",
                threshold: float = DEFAULT_THRESHOLD) -> list[tuple[int, int]]:
    """Greedy one-to-one matching by descending similarity.

    Exact mode requires similarity 1.0; fuzzy accepts similarity >= threshold.
    Ties break by gold index, then pred index.
    """
    if mode not in ("exact", "fuzzy"):
        raise ValueError(f"mode must be 'exact' or 'fuzzy', got {mode!r}")
    if mode == "fuzzy" and not 0 < threshold <= 1:
        raise ValueError("threshold must be in (0,1]")
    bar = 1.0 if mode == "exact" else threshold
    candidates = []
    for gi, g in enumerate(gold):
        for pi, p in enumerate(pred):
            sim = similarity(p, g)
            if sim >= bar:
                candidates.append((-sim, gi, pi))
    candidates.sort()
    used_pred: set[int] = set()
    used_gold: set[int] = set()
    matching = []
    for _, gi, pi in candidates:
        if gi in used_gold or pi in used_pred:
            continue
        used_gold.add(gi)
        used_pred.add(pi)
        matching.append((pi, gi))
    return matching


def _prf(tp: int, n_pred: int, n_gold: int) -> dict:
    precision = tp / n_pred if n_pred else 0.0
    recall = tp / n_gold if n_gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"precision": precision, "recall": recall, "f1": f1,
            "tp": tp, "n_pred": n_pred, "n_gold": n_gold}


def span_f1(pairs: list[EvalPair], mode: str = "exact",
            threshold: float = DEFAULT_THRESHOLD) -> dict:
    tp = n_pred = n_gold = 0
    for pair in pairs:
        pred = [s.span for s in pair.predicted.spans]
        gold = [s.span for s in pair.gold.spans]
        tp += len(match_spans(pred, gold, mode, threshold))
        n_pred += len(pred)
        n_gold += len(gold)
    return _prf(tp, n_pred, n_gold)


def local_f1(pairs: list[EvalPair], mode: str = "exact",
             threshold: float = DEFAULT_THRESHOLD) -> dict:
    """Like span_f1, but a matched pair counts only if local labels agree."""
    tp = n_pred = n_gold = 0
    for pair in pairs:
        pred = [s.span for s in pair.predicted.spans]
        gold = [s.span for s in pair.gold.spans]
        for pi, gi in match_spans(pred, gold, mode, threshold):
            if pair.predicted.spans[pi].local_label == pair.gold.spans[gi].local_label:
                tp += 1
        n_pred += len(pred)
        n_gold += len(gold)
    return _prf(tp, n_pred, n_gold)


def global_f1(pairs: list[EvalPair], universe: list[str] | None = None) -> dict:
    """Single-label multiclass macro/micro F1 over global labels.

    Default class universe is the labels present in gold or predictions;
    pass `universe` to pin it (e.g. the full split set).
    """
    for pair in pairs:
        if pair.predicted.global_label is None or pair.gold.global_label is None:
            raise ValueError(f"pair {pair.doc_id} is missing a global label")
    gold = [p.gold.global_label for p in pairs]
    pred = [p.predicted.global_label for p in pairs]
    classes = list(universe) if universe is not None else sorted(set(gold) | set(pred))
    per_class = {}
    for c in classes:
        tp = sum(1 for g, p in zip(gold, pred) if g == c and p == c)
        fp = sum(1 for g, p in zip(gold, pred) if g != c and p == c)
        fn = sum(1 for g, p in zip(gold, pred) if g == c and p != c)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        per_class[c] = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    macro = sum(per_class.values()) / len(classes) if classes else 0.0
    micro = sum(1 for g, p in zip(gold, pred) if g == p) / len(pairs) if pairs else 0.0
    return {"macro": macro, "micro": micro, "per_class": per_class}


def evaluate(pairs: list[EvalPair], threshold: float = DEFAULT_THRESHOLD,
             universe: list[str] | None = None) -> dict:
    """The six report metrics: G_macro, G_micro, Span_e, Span_f, Local_e, Local_f."""
    g = global_f1(pairs, universe=universe)
    return {
        "G_macro": g["macro"],
        "G_micro": g["micro"],
        "Span_e": span_f1(pairs, "exact")["f1"],
        "Span_f": span_f1(pairs, "fuzzy", threshold)["f1"],
        "Local_e": local_f1(pairs, "exact")["f1"],
        "Local_f": local_f1(pairs, "fuzzy", threshold)["f1"],
        "support": {"documents": len(pairs),
                    "pred_spans": sum(len(p.predicted.spans) for p in pairs),
                    "gold_spans": sum(len(p.gold.spans) for p in pairs)},
    }
