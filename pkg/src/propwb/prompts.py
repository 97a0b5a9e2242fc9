"""Prompt construction for span-level propaganda annotation."""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

from .corpus import Document
from .taxonomy import Taxonomy, default_taxonomy

DEFAULT_SETTING_NOTE = (
    "**Setting**: Detection of propaganda that is against the main opposition "
    "(i.e., Ukraine), against other oppositions (e.g., Western countries), or "
    "in favour of the Russian government."
)

SYSTEM_HEADER = (
    "You are an intelligent annotation assistant specializing in detecting "
    "propaganda. Your task is to analyze, explain, and pre-annotate the "
    "presented text based on a set of potential propaganda classifications. "
    "You MUST return the output in valid JSON following the defined schema."
)


@dataclass(frozen=True)
class PromptSpec:
    label_order: tuple[str, ...] = ()
    fewshot_order: tuple[str, ...] = ()
    shuffle_seed: int | None = None
    setting_note: str = DEFAULT_SETTING_NOTE
    system_template: str = SYSTEM_HEADER

    def resolve(self, taxonomy: Taxonomy) -> "PromptSpec":
        """Fill in label orders: explicit > seeded shuffle > declaration order."""
        base = taxonomy.label_set("split")
        label_order = list(self.label_order) or list(base)
        fewshot_order = list(self.fewshot_order) or list(base)
        if not self.label_order and self.shuffle_seed is not None:
            rng = random.Random(self.shuffle_seed)
            rng.shuffle(label_order)
            rng.shuffle(fewshot_order)
        for order in (label_order, fewshot_order):
            if sorted(order) != sorted(base):
                raise ValueError("label orders must be permutations of the split label set")
        return PromptSpec(
            label_order=tuple(label_order),
            fewshot_order=tuple(fewshot_order),
            shuffle_seed=self.shuffle_seed,
            setting_note=self.setting_note,
            system_template=self.system_template,
        )


def build_prompt(doc: Document, spec: PromptSpec, taxonomy: Taxonomy | None = None) -> list[dict]:
    """System + user message pair; byte-identical across calls for a fixed spec."""
    taxonomy = taxonomy or default_taxonomy()
    spec = spec.resolve(taxonomy)

    definitions = "\n".join(
        f"    - {label}: {taxonomy.definition_of(label)}" for label in spec.label_order
    )
    exemplars = "\n".join(
        f"    - {label}: \"{taxonomy.few_shot[label]}\"" for label in spec.fewshot_order
    )
    system = (
        f"{spec.system_template}\n\n"
        f"{spec.setting_note}\n\n"
        "1. **Identify specific words or text spans that indicate propaganda.**\n\n"
        "2. **Explain for each extracted span why it should be considered propaganda.**\n\n"
        "3. **For each span, determine the dominant propaganda technique from the following list**:\n"
        f"{definitions}\n\n"
        "4. **Finally, assign the global label of the span that is most representative "
        "for the full sequence.**\n\n"
        "Examples of each technique:\n"
        f"{exemplars}\n"
    )
    return [
        {"role": "system", "content": system},
        {"role": "user", "content": doc.normalized_text},
    ]


def per_run_spec(base: PromptSpec, doc_id: str, run_index: int) -> PromptSpec:
    """Derive a per-(document, run) shuffle seed from the base seed.

    With no base seed, prompts stay in declaration order for every run.
    """
    if base.shuffle_seed is None:
        return base
    digest = hashlib.sha256(f"{base.shuffle_seed}:{doc_id}:{run_index}".encode()).digest()
    derived = int.from_bytes(digest[:4], "big")
    return PromptSpec(
        shuffle_seed=derived,
        setting_note=base.setting_note,
        system_template=base.system_template,
    )
