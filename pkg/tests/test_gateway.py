import json

import pytest

from propwb.errors import GatewayError
from propwb.gateway import ChatGateway, GatewayConfig
from propwb.mockllm import MockLLMServer, synthesize_payload
from propwb.prompts import PromptSpec


FIXED_PAYLOAD = {
    "spans": [{"span": "check #IStandWithPutin", "explanation": "e",
               "local_label": "slogans"}],
    "global_label": "slogans",
}


def config(url, **kw):
    kw.setdefault("backoff_base_s", 0.0)
    return GatewayConfig(base_url=url, **kw)


def test_requires_endpoint():
    with pytest.raises(GatewayError, match="endpoint"):
        ChatGateway(GatewayConfig(base_url=""))


def test_fixed_payload_three_identical_runs(doc):
    canned = {doc.normalized_text: FIXED_PAYLOAD}
    with MockLLMServer(canned=canned) as server:
        gateway = ChatGateway(config(server.base_url))
        bundle = gateway.annotate_document(doc, k=3, spec=PromptSpec())
    assert bundle.k == 3 and len(bundle.results) == 3 and not bundle.errors
    assert len({r.global_label for r in bundle.results}) == 1
    assert [r.run_index for r in bundle.results] == [0, 1, 2]


def test_server_error_then_success_records_retry(doc):
    canned = {doc.normalized_text: FIXED_PAYLOAD}
    with MockLLMServer(canned=canned, fail_first_n=1) as server:
        gateway = ChatGateway(config(server.base_url))
        bundle = gateway.annotate_document(doc, k=1, spec=PromptSpec())
    assert len(bundle.results) == 1 and not bundle.errors


def test_unparseable_payload_becomes_run_error(doc):
    canned = {doc.normalized_text: {"spans": [{"span": "check"}]}}  # schema violation
    with MockLLMServer(canned=canned) as server:
        gateway = ChatGateway(config(server.base_url, max_attempts=2))
        bundle = gateway.annotate_document(doc, k=1, spec=PromptSpec())
    # every attempt returns the broken payload: recorded as a run error, not fatal
    assert bundle.results == ()
    assert len(bundle.errors) == 1 and bundle.errors[0]["run_index"] == 0


def test_transport_failure_after_retries_is_run_error(doc):
    gateway = ChatGateway(config("http://127.0.0.1:1/v1", max_attempts=2, timeout_s=0.2))
    bundle = gateway.annotate_document(doc, k=2, spec=PromptSpec())
    assert bundle.results == ()
    assert len(bundle.errors) == 2


def test_five_runs_with_shuffle_all_parse(doc, taxonomy):
    with MockLLMServer() as server:
        gateway = ChatGateway(config(server.base_url), taxonomy)
        bundle = gateway.annotate_document(doc, k=5, spec=PromptSpec(shuffle_seed=0))
    assert len(bundle.results) == 5
    for r in bundle.results:
        for s in r.spans:
            assert s.local_label in taxonomy.label_set("split")


def test_complete_returns_raw_content(doc):
    with MockLLMServer(canned={doc.normalized_text: FIXED_PAYLOAD}) as server:
        gateway = ChatGateway(config(server.base_url))
        raw = gateway.complete([{"role": "system", "content": "s"},
                                {"role": "user", "content": doc.normalized_text}])
    assert json.loads(raw)["global_label"] == "slogans"


def test_annotate_corpus_preserves_order(doc, taxonomy):
    from propwb.corpus import Document, normalize
    docs = [Document(id=f"d{i}", raw_text=f"text number {i} here",
                     normalized_text=normalize(f"text number {i} here"),
                     binary_propaganda=True) for i in range(8)]
    with MockLLMServer() as server:
        gateway = ChatGateway(config(server.base_url, max_in_flight=4), taxonomy)
        bundles = gateway.annotate_corpus(docs, k=2, spec=PromptSpec())
    assert [b.doc_id for b in bundles] == [d.id for d in docs]


def test_synthesize_payload_deterministic():
    a = synthesize_payload("some tweet text here")
    b = synthesize_payload("some tweet text here")
    assert a == b
    assert synthesize_payload("there is no propaganda here") == {"spans": []}
