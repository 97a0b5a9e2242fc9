"""Annotation-side analytics: multi-run stability, first-span/majority
positional analysis, and the span-count histogram."""

from __future__ import annotations

from collections import Counter

from .errors import WrongRunCountError
from .results import AnnotationResult, RunBundle

STABILITY_THRESHOLDS = (3, 4, 5)
STABILITY_FACETS = ("local_label", "extracted_spans", "global_label")


def _span_key(text: str) -> str:
    return " ".join(text.lower().split())


def _facet_value(result: AnnotationResult, facet: str):
    if facet == "global_label":
        return result.global_label
    if facet == "local_label":
        return tuple(sorted(Counter(s.local_label for s in result.spans).items()))
    if facet == "extracted_spans":
        return tuple(sorted(Counter(_span_key(s.span) for s in result.spans).items()))
    raise ValueError(f"unknown facet {facet!r}")


def stability_report(bundles: list[RunBundle], k: int = 5) -> dict:
    """Fraction of bundles whose runs share a facet value at each m-of-k quorum."""
    for bundle in bundles:
        if len(bundle.results) != k:
            raise WrongRunCountError(
                f"bundle {bundle.doc_id} has {len(bundle.results)} successful runs, expected {k}"
            )
    report: dict = {"k": k, "n_bundles": len(bundles), "rates": {}}
    for facet in STABILITY_FACETS:
        rates = {}
        for m in STABILITY_THRESHOLDS:
            if m > k:
                continue
            hits = 0
            for bundle in bundles:
                values = Counter(_facet_value(r, facet) for r in bundle.results)
                if values and max(values.values()) >= m:
                    hits += 1
            rates[f">={m}/{k}" if m < k else f"{k}/{k}"] = hits / len(bundles) if bundles else 0.0
        report["rates"][facet] = rates
    return report


def positional_analysis(results: list[AnnotationResult]) -> dict:
    """First-span and strict-majority label alignment over results with >=3 spans."""
    population = [r for r in results if len(r.spans) >= 3]
    n = len(population)
    first_match = 0
    majority_exists = 0
    majority_match = 0
    for r in population:
        if r.spans[0].local_label == r.global_label:
            first_match += 1
        counts = Counter(s.local_label for s in r.spans)
        label, top = counts.most_common(1)[0]
        if top * 2 > len(r.spans):
            majority_exists += 1
            if label == r.global_label:
                majority_match += 1
    return {
        "n_filtered": n,
        "first_span_match_rate": first_match / n if n else 0.0,
        "majority_exists_rate": majority_exists / n if n else 0.0,
        "majority_match_rate": majority_match / majority_exists if majority_exists else 0.0,
    }


def span_histogram(results: list[AnnotationResult]) -> dict:
    """Span-count buckets {1,2,3,4,5+} over results with at least one span."""
    buckets = {"1": 0, "2": 0, "3": 0, "4": 0, "5+": 0}
    for r in results:
        n = len(r.spans)
        if n == 0:
            continue
        buckets[str(n) if n < 5 else "5+"] += 1
    return buckets
