"""Distillation data export: teacher annotations serialized as training pairs."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .prompts import PromptSpec, build_prompt
from .results import AnnotationResult, canonical_json
from .taxonomy import Taxonomy, default_taxonomy


@dataclass(frozen=True)
class DistillRecord:
    prompt: list
    completion: str
    global_label: str


def build_records(results: list[AnnotationResult], docs_by_id: dict,
                  prompt_spec: PromptSpec, taxonomy: Taxonomy | None = None) -> list[DistillRecord]:
    """One record per propagandistic result; empty-span results are skipped."""
    taxonomy = taxonomy or default_taxonomy()
    records = []
    for r in results:
        if not r.spans:
            continue
        doc = docs_by_id.get(r.doc_id)
        if doc is None:
            raise KeyError(f"no document for result {r.doc_id!r}")
        records.append(DistillRecord(
            prompt=build_prompt(doc, prompt_spec, taxonomy),
            completion=canonical_json(r),
            global_label=r.global_label,
        ))
    return records


def export_distill(results: list[AnnotationResult], docs_by_id: dict,
                   prompt_spec: PromptSpec, path, format: str = "messages-jsonl",
                   taxonomy: Taxonomy | None = None) -> int:
    """Write distillation records as JSONL; returns the record count."""
    if format not in ("messages-jsonl", "prompt-completion-jsonl"):
        raise ValueError(f"unknown format {format!r}")
    records = build_records(results, docs_by_id, prompt_spec, taxonomy)
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            if format == "messages-jsonl":
                line = {
                    "messages": rec.prompt + [{"role": "assistant", "content": rec.completion}],
                    "global_label": rec.global_label,
                }
            else:
                line = {
                    "prompt": json.dumps(rec.prompt, ensure_ascii=False),
                    "completion": rec.completion,
                    "global_label": rec.global_label,
                }
            fh.write(json.dumps(line, ensure_ascii=False) + "\n")
    return len(records)


def load_distill(path, format: str = "messages-jsonl") -> list[DistillRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            if format == "messages-jsonl":
                records.append(DistillRecord(prompt=rec["messages"][:-1],
                                             completion=rec["messages"][-1]["content"],
                                             global_label=rec["global_label"]))
            else:
                records.append(DistillRecord(prompt=json.loads(rec["prompt"]),
                                             completion=rec["completion"],
                                             global_label=rec["global_label"]))
    return records
