"""Annotation result records and their canonical JSON serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import EmptyBundleError


@dataclass(frozen=True)
class SpanAnnotation:
    span: str
    explanation: str
    local_label: str


@dataclass(frozen=True)
class AnnotationResult:
    doc_id: str
    spans: tuple[SpanAnnotation, ...]
    global_label: str | None
    model_id: str = ""
    run_index: int = 0
    raw_response: str = ""
    diagnostics: dict = field(default_factory=dict)

    @property
    def is_propagandistic(self) -> bool:
        return len(self.spans) > 0


@dataclass(frozen=True)
class RunBundle:
    doc_id: str
    k: int
    results: tuple[AnnotationResult, ...]
    errors: tuple[dict, ...] = ()

    def successful(self) -> list[AnnotationResult]:
        return list(self.results)


def canonical_payload(result: AnnotationResult) -> dict:
    payload = {
        "spans": [
            {"span": s.span, "explanation": s.explanation, "local_label": s.local_label}
            for s in result.spans
        ]
    }
    if result.global_label is not None:
        payload["global_label"] = result.global_label
    return payload


def canonical_json(result: AnnotationResult) -> str:
    """Deterministic byte-stable serialization of the structured output."""
    return json.dumps(canonical_payload(result), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def result_to_record(result: AnnotationResult) -> dict:
    """Full JSONL persistence record, including provenance fields."""
    return {
        "doc_id": result.doc_id,
        "spans": canonical_payload(result)["spans"],
        "global_label": result.global_label,
        "model_id": result.model_id,
        "run_index": result.run_index,
        "raw_response": result.raw_response,
        "diagnostics": result.diagnostics,
    }


def result_from_record(rec: dict) -> AnnotationResult:
    return AnnotationResult(
        doc_id=rec["doc_id"],
        spans=tuple(SpanAnnotation(s["span"], s.get("explanation", ""), s["local_label"]) for s in rec["spans"]),
        global_label=rec.get("global_label"),
        model_id=rec.get("model_id", ""),
        run_index=rec.get("run_index", 0),
        raw_response=rec.get("raw_response", ""),
        diagnostics=rec.get("diagnostics", {}),
    )


def load_results_jsonl(path) -> list[AnnotationResult]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(result_from_record(json.loads(line)))
    return out


def save_results_jsonl(results, path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for r in results:
            fh.write(json.dumps(result_to_record(r), ensure_ascii=False) + "\n")
            n += 1
    return n


def aggregate_mode(bundle: RunBundle) -> AnnotationResult:
    """Collapse a multi-run bundle to one result by global-label mode.

    Ties break toward the earliest run; the spans come from the earliest run
    whose global label equals the mode. An all-empty bundle aggregates to an
    empty result.
    """
    results = sorted(bundle.results, key=lambda r: r.run_index)
    if not results:
        raise EmptyBundleError(f"bundle for {bundle.doc_id} has no successful runs")
    labeled = [r for r in results if r.global_label is not None]
    if not labeled:
        first = results[0]
        return AnnotationResult(
            doc_id=bundle.doc_id, spans=(), global_label=None,
            model_id=first.model_id, run_index=first.run_index,
            diagnostics={"aggregated_from": len(results)},
        )
    counts: dict[str, int] = {}
    for r in labeled:
        counts[r.global_label] = counts.get(r.global_label, 0) + 1
    best = max(counts.values())
    # earliest run among the tied top labels
    winner = next(r.global_label for r in labeled if counts[r.global_label] == best)
    chosen = next(r for r in labeled if r.global_label == winner)
    return AnnotationResult(
        doc_id=bundle.doc_id, spans=chosen.spans, global_label=winner,
        model_id=chosen.model_id, run_index=chosen.run_index,
        diagnostics={"aggregated_from": len(results), "mode_count": best},
    )
