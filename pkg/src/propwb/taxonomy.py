"""Hierarchical propaganda label system: three coarse categories over 17 split
(14 canonical) fine-grained techniques, loaded from a JSON data file."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from .errors import UnknownLabelError

COARSE_CODES = ("A", "B", "C")


@dataclass(frozen=True)
class CoarseCategory:
    code: str
    title: str
    description: str


@dataclass(frozen=True)
class FineLabel:
    id: str
    canonical_id: str
    coarse: str
    definition: str
    few_shot: str


@dataclass(frozen=True)
class Taxonomy:
    categories: tuple[CoarseCategory, ...]
    labels: tuple[FineLabel, ...]
    few_shot: dict = field(repr=False)

    def coarse_of(self, label_id: str) -> str:
        """Coarse category code for a split or canonical fine-label id."""
        for lab in self.labels:
            if lab.id == label_id or lab.canonical_id == label_id:
                return lab.coarse
        raise UnknownLabelError(label_id)

    def canonical_of(self, label_id: str) -> str:
        for lab in self.labels:
            if lab.id == label_id:
                return lab.canonical_id
        # already-canonical ids map to themselves
        for lab in self.labels:
            if lab.canonical_id == label_id:
                return label_id
        raise UnknownLabelError(label_id)

    def label_set(self, kind: str = "split") -> list[str]:
        """Fine-label ids in declaration order; canonical de-duplicates merges."""
        if kind == "split":
            return [lab.id for lab in self.labels]
        if kind == "canonical":
            out: list[str] = []
            for lab in self.labels:
                if lab.canonical_id not in out:
                    out.append(lab.canonical_id)
            return out
        raise ValueError(f"kind must be 'split' or 'canonical', got {kind!r}")

    def labels_for_coarse(self, code: str, kind: str = "split") -> list[str]:
        if code not in COARSE_CODES:
            raise ValueError(f"unknown coarse code {code!r}")
        if kind == "split":
            return [lab.id for lab in self.labels if lab.coarse == code]
        out: list[str] = []
        for lab in self.labels:
            if lab.coarse == code and lab.canonical_id not in out:
                out.append(lab.canonical_id)
        return out

    def definition_of(self, label_id: str) -> str:
        for lab in self.labels:
            if lab.id == label_id:
                return lab.definition
        raise UnknownLabelError(label_id)


def load_taxonomy(path=None) -> Taxonomy:
    """Load a taxonomy from `path`, or the embedded default."""
    if path is None:
        raw = resources.files("propwb.data").joinpath("taxonomy.json").read_text("utf-8")
        doc = json.loads(raw)
    else:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    categories = tuple(CoarseCategory(**c) for c in doc["categories"])
    labels = tuple(FineLabel(**l) for l in doc["labels"])
    few_shot = {lab.id: lab.few_shot for lab in labels}
    return Taxonomy(categories=categories, labels=labels, few_shot=few_shot)


def validate_taxonomy(t: Taxonomy) -> list[str]:
    """Structural findings; empty list means the taxonomy is well-formed."""
    findings: list[str] = []
    codes = [c.code for c in t.categories]
    if sorted(codes) != sorted(set(codes)):
        findings.append("duplicate coarse category codes")
    if set(codes) != set(COARSE_CODES):
        findings.append(f"coarse codes must be exactly {COARSE_CODES}, got {codes}")
    ids = [lab.id for lab in t.labels]
    if len(ids) != len(set(ids)):
        by_coarse: dict[str, set[str]] = {}
        for lab in t.labels:
            by_coarse.setdefault(lab.id, set()).add(lab.coarse)
        for lid, coarse_set in by_coarse.items():
            if len(coarse_set) > 1:
                findings.append(
                    f"label {lid} assigned to multiple coarse categories {sorted(coarse_set)}: "
                    "fine-to-coarse assignment must be a partition"
                )
        findings.append("duplicate fine-label ids")
    for lab in t.labels:
        if lab.coarse not in codes:
            findings.append(f"label {lab.id}: unknown coarse code {lab.coarse!r}")
        if not lab.definition:
            findings.append(f"label {lab.id}: missing definition")
        if not t.few_shot.get(lab.id):
            findings.append(f"label {lab.id}: missing few-shot exemplar")
    # canonical groups must stay within one coarse category
    by_canonical: dict[str, set[str]] = {}
    for lab in t.labels:
        by_canonical.setdefault(lab.canonical_id, set()).add(lab.coarse)
    for cid, coarse_set in by_canonical.items():
        if len(coarse_set) > 1:
            findings.append(f"canonical group {cid} spans coarse categories {sorted(coarse_set)}")
    return findings


_DEFAULT: Taxonomy | None = None


def default_taxonomy() -> Taxonomy:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_taxonomy()
    return _DEFAULT
