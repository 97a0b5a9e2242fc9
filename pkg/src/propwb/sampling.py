"""Stratified sampling over predicted global labels and the stratified
train/test split for distillation exports."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field

from .results import AnnotationResult
from .taxonomy import Taxonomy, default_taxonomy

log = logging.getLogger(__name__)

DEFAULT_INCLUDE_ALL_BELOW = 10


@dataclass(frozen=True)
class StratifiedPlan:
    strata: dict = field(default_factory=dict)  # label -> quota
    default_quota: int | None = None
    include_all_below: int = DEFAULT_INCLUDE_ALL_BELOW
    seed: int = 0


def stratified_sample(results: list[AnnotationResult], plan: StratifiedPlan,
                      taxonomy: Taxonomy | None = None) -> list[str]:
    """Doc ids sampled per global-label stratum.

    Strata smaller than `include_all_below` are taken whole; larger strata
    draw their quota uniformly without replacement. Output order is label
    declaration order, then draw order.
    """
    taxonomy = taxonomy or default_taxonomy()
    by_label: dict[str, list[str]] = {}
    for r in results:
        if r.global_label is not None:
            by_label.setdefault(r.global_label, []).append(r.doc_id)

    out: list[str] = []
    for label in taxonomy.label_set("split"):
        stratum = by_label.get(label, [])
        if not stratum:
            continue
        if len(stratum) <= plan.include_all_below:
            out.extend(stratum)
            continue
        quota = plan.strata.get(label, plan.default_quota)
        if quota is None:
            raise ValueError(f"no quota for stratum {label!r} and no default quota")
        if quota > len(stratum):
            log.warning("quota %d exceeds stratum %r size %d; clamping", quota, label, len(stratum))
            quota = len(stratum)
        rng = random.Random((plan.seed, label).__repr__())
        out.extend(rng.sample(stratum, quota))
    return out


def split_80_20(records: list, key=lambda r: r.global_label, seed: int = 0) -> dict:
    """Per-stratum 80/20 partition.

    Test share is round(0.2 * stratum size), at least 1 once the stratum has
    2+ records; singleton strata go entirely to train.
    """
    if not records:
        raise ValueError("need at least one record to split")
    by_label: dict[str, list] = {}
    for r in records:
        by_label.setdefault(key(r), []).append(r)
    train, test = [], []
    for label in sorted(by_label):
        stratum = list(by_label[label])
        rng = random.Random((seed, label).__repr__())
        rng.shuffle(stratum)
        n = len(stratum)
        n_test = 0 if n < 2 else max(1, round(0.2 * n))
        test.extend(stratum[:n_test])
        train.extend(stratum[n_test:])
    return {"train": train, "test": test}
