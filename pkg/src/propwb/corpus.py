"""Corpus ingestion and tweet-text normalization.

Normalization is deletion-only: @-mentions and URLs are dropped token-wise,
hashtags survive, whitespace collapses to single spaces.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import dataclass, field

from .errors import IngestError, UnknownLabelError
from .taxonomy import Taxonomy, default_taxonomy

_URL_PREFIXES = ("http://", "https://", "t.co/")


def normalize(text: str) -> str:
    kept = []
    for token in text.split():
        if token.startswith("@"):
            continue
        if token.lower().startswith(_URL_PREFIXES):
            continue
        kept.append(token)
    return " ".join(kept)


@dataclass(frozen=True)
class Document:
    id: str
    raw_text: str
    normalized_text: str
    binary_propaganda: bool
    weak_label: str | None = None
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...]
    manifest: dict

    def __len__(self):
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)


def _make_document(rec: dict, line: int, taxonomy: Taxonomy) -> Document:
    if "id" not in rec or rec["id"] in (None, ""):
        raise IngestError("record missing 'id' field", line=line)
    if "text" not in rec or rec["text"] is None:
        raise IngestError("record missing 'text' field", line=line)
    weak = rec.get("weak_label") or None
    if weak is not None and weak not in taxonomy.label_set("split"):
        raise UnknownLabelError(weak)
    raw = str(rec["text"])
    return Document(
        id=str(rec["id"]),
        raw_text=raw,
        normalized_text=normalize(raw),
        binary_propaganda=_as_bool(rec.get("binary_propaganda", False), line),
        weak_label=weak,
        meta=dict(rec.get("meta") or {}),
    )


def _as_bool(value, line):
    if isinstance(value, bool):
        return value
    if isinstance(value, str):
        low = value.strip().lower()
        if low in ("true", "1", "yes"):
            return True
        if low in ("false", "0", "no", ""):
            return False
    if isinstance(value, (int, float)) and value in (0, 1):
        return bool(value)
    raise IngestError(f"cannot interpret binary_propaganda value {value!r}", line=line)


def ingest(path, format: str = "jsonl", taxonomy: Taxonomy | None = None) -> Corpus:
    """Read a JSONL or CSV corpus file into an immutable Corpus with manifest."""
    taxonomy = taxonomy or default_taxonomy()
    docs: list[Document] = []
    seen: set[str] = set()
    if format == "jsonl":
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise IngestError(f"invalid JSON: {exc}", line=lineno) from exc
                docs.append(_make_document(rec, lineno, taxonomy))
    elif format == "csv":
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or "id" not in reader.fieldnames or "text" not in reader.fieldnames:
                raise IngestError("CSV header must contain columns id,text,binary_propaganda[,weak_label]")
            for rec in reader:
                docs.append(_make_document(rec, reader.line_num, taxonomy))
    else:
        raise ValueError(f"format must be 'jsonl' or 'csv', got {format!r}")

    for doc in docs:
        if doc.id in seen:
            raise IngestError(f"duplicate document id {doc.id!r}")
        seen.add(doc.id)

    with open(path, "rb") as fh:
        digest = hashlib.sha256(fh.read()).hexdigest()
    manifest = {
        "source": str(path),
        "sha256": digest,
        "ingested_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "counts": {
            "total": len(docs),
            "positive": sum(1 for d in docs if d.binary_propaganda),
        },
    }
    return Corpus(documents=tuple(docs), manifest=manifest)


def write_manifest(corpus: Corpus, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(corpus.manifest, fh, indent=2)
        fh.write("\n")


def filter_binary_positive(corpus: Corpus) -> Corpus:
    docs = tuple(d for d in corpus.documents if d.binary_propaganda)
    manifest = dict(corpus.manifest)
    manifest["counts"] = {"total": len(docs), "positive": len(docs)}
    manifest["filtered"] = "binary_positive"
    return Corpus(documents=docs, manifest=manifest)


def corpus_stats(corpus: Corpus) -> dict:
    """Totals plus a weak-label histogram keyed by known ids and 'none'."""
    hist: dict[str, int] = {}
    for doc in corpus.documents:
        key = doc.weak_label if doc.weak_label is not None else "none"
        hist[key] = hist.get(key, 0) + 1
    return {
        "total": len(corpus.documents),
        "positive": sum(1 for d in corpus.documents if d.binary_propaganda),
        "weak_labels": hist,
    }
