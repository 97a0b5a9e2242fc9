"""JSON schema for the structured annotation output sent to the LLM gateway."""

from __future__ import annotations

from .taxonomy import Taxonomy, default_taxonomy


def output_schema(taxonomy: Taxonomy | None = None) -> dict:
    taxonomy = taxonomy or default_taxonomy()
    labels = taxonomy.label_set("split")
    return {
        "$defs": {
            "FineLabelVerdict": {
                "description": "Fine-grained categorization of propaganda techniques.",
                "enum": labels,
            },
            "PropagandaSpan": {
                "description": "An identified propaganda span within the original text with an explanation.",
                "type": "object",
                "properties": {
                    "span": {
                        "description": "The exact propaganda span extracted from the original text.",
                        "title": "Span",
                        "type": "string",
                    },
                    "explanation": {
                        "description": "The explanation why this span is considered propaganda.",
                        "title": "Explanation",
                        "type": "string",
                    },
                    "local_label": {
                        "$ref": "#/$defs/FineLabelVerdict",
                        "description": "The appropriate label assigned towards the detected span.",
                    },
                },
                "required": ["span", "explanation", "local_label"],
                "additionalProperties": False,
            },
        },
        "description": "Schema for structured LLM output after propaganda detection.",
        "type": "object",
        "properties": {
            "spans": {
                "type": "array",
                "items": {"$ref": "#/$defs/PropagandaSpan"},
            },
            "global_label": {
                "$ref": "#/$defs/FineLabelVerdict",
                "description": "The label for the dominant propaganda technique in the statement.",
            },
        },
        "required": ["spans"],
        "additionalProperties": False,
    }
