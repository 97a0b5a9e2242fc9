"""Parsing and validation of structured LLM annotation responses."""

from __future__ import annotations

import json

import jsonschema

from .corpus import Document
from .errors import MalformedResponseError, SchemaViolationError, SpanNotFoundError, UnknownLabelError
from .results import AnnotationResult, SpanAnnotation
from .schema import output_schema
from .taxonomy import Taxonomy, default_taxonomy


def parse_response(raw: str, doc: Document, taxonomy: Taxonomy | None = None,
                   model_id: str = "", run_index: int = 0) -> AnnotationResult:
    """Parse a raw LLM response into a validated AnnotationResult.

    Enforces, in order: JSON well-formedness, schema conformance, known
    labels, span-in-document (exact, then case-insensitive), and the
    empty-spans/global-label coupling.
    """
    taxonomy = taxonomy or default_taxonomy()
    try:
        payload = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MalformedResponseError(f"response is not valid JSON: {exc}") from exc

    schema = output_schema(taxonomy)
    validator = jsonschema.Draft202012Validator(schema)
    for err in sorted(validator.iter_errors(payload), key=lambda e: list(e.absolute_path)):
        # enum failures surface as unknown-label, everything else as schema violation
        if err.validator == "enum":
            raise UnknownLabelError(err.instance)
        raise SchemaViolationError(err.message, path=list(err.absolute_path))

    spans = []
    overlap = False
    text = doc.normalized_text
    lowered = text.lower()
    seen_ranges: list[tuple[int, int]] = []
    for item in payload["spans"]:
        span_text = item["span"]
        if not span_text:
            raise SpanNotFoundError(span_text)
        pos = text.find(span_text)
        if pos < 0:
            pos = lowered.find(span_text.lower())
        if pos < 0:
            raise SpanNotFoundError(span_text)
        rng = (pos, pos + len(span_text))
        if any(rng[0] < e and s < rng[1] for s, e in seen_ranges):
            overlap = True
        seen_ranges.append(rng)
        spans.append(SpanAnnotation(span=span_text, explanation=item["explanation"],
                                    local_label=item["local_label"]))

    global_label = payload.get("global_label")
    if spans and global_label is None:
        raise SchemaViolationError("non-empty spans require a global_label", path=["global_label"])
    if not spans and global_label is not None:
        raise SchemaViolationError("empty spans forbid a global_label", path=["global_label"])

    diagnostics = {"overlapping_spans": overlap} if overlap else {}
    return AnnotationResult(
        doc_id=doc.id, spans=tuple(spans), global_label=global_label,
        model_id=model_id, run_index=run_index, raw_response=raw,
        diagnostics=diagnostics,
    )
