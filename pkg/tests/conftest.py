import json
import random

import pytest

from propwb.corpus import Document, normalize
from propwb.results import AnnotationResult, SpanAnnotation
from propwb.taxonomy import default_taxonomy


@pytest.fixture(scope="session")
def taxonomy():
    return default_taxonomy()


@pytest.fixture
def doc():
    text = "check #IStandWithPutin Russia is our true friend"
    return Document(id="d1", raw_text=text, normalized_text=normalize(text),
                    binary_propaganda=True)


def make_result(doc_id="d1", spans=(), global_label=None, run_index=0):
    return AnnotationResult(
        doc_id=doc_id,
        spans=tuple(SpanAnnotation(span=s, explanation=f"why {s}", local_label=l)
                    for s, l in spans),
        global_label=global_label,
        run_index=run_index,
    )


def random_result(rng: random.Random, doc_id: str, labels, max_spans=5):
    n = rng.randint(0, max_spans)
    words = ["alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf"]
    spans = [(" ".join(rng.sample(words, rng.randint(1, 3))), rng.choice(labels))
             for _ in range(n)]
    global_label = rng.choice(labels) if n else None
    return make_result(doc_id, spans, global_label)


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
    return path
