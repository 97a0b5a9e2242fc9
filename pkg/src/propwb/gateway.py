"""OpenAI-compatible chat-completions gateway with retries and multi-run annotation."""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import requests

from .corpus import Document
from .errors import GatewayError, PropwbError
from .parsing import parse_response
from .prompts import PromptSpec, build_prompt, per_run_spec
from .results import AnnotationResult, RunBundle
from .schema import output_schema
from .taxonomy import Taxonomy, default_taxonomy


@dataclass(frozen=True)
class GatewayConfig:
    base_url: str = ""
    api_key: str | None = None
    model: str = "llama-3.3-70b-instruct"
    temperature: float = 0.0
    timeout_s: float = 60.0
    max_attempts: int = 3
    backoff_base_s: float = 1.0
    max_in_flight: int = 4

    @classmethod
    def from_env(cls, **overrides) -> "GatewayConfig":
        env = {
            "base_url": os.environ.get("LLM_BASE_URL", ""),
            "api_key": os.environ.get("LLM_API_KEY"),
        }
        env.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**env)


class ChatGateway:
    """Thin client for a chat-completions endpoint with structured output."""

    def __init__(self, config: GatewayConfig, taxonomy: Taxonomy | None = None):
        if not config.base_url:
            raise GatewayError("no endpoint configured: set LLM_BASE_URL or pass --endpoint")
        self.config = config
        self.taxonomy = taxonomy or default_taxonomy()
        self._session = requests.Session()

    def complete(self, messages: list[dict]) -> str:
        """One chat-completions call with retry and exponential backoff."""
        url = self.config.base_url.rstrip("/") + "/chat/completions"
        headers = {"Content-Type": "application/json"}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"
        body = {
            "model": self.config.model,
            "messages": messages,
            "temperature": self.config.temperature,
            "response_format": {
                "type": "json_schema",
                "json_schema": {"name": "propaganda_annotation", "schema": output_schema(self.taxonomy)},
            },
        }
        last_exc: Exception | None = None
        for attempt in range(self.config.max_attempts):
            if attempt:
                time.sleep(self.config.backoff_base_s * 2 ** (attempt - 1))
            try:
                resp = self._session.post(url, json=body, headers=headers, timeout=self.config.timeout_s)
                if resp.status_code >= 500:
                    last_exc = GatewayError(f"server error {resp.status_code}")
                    continue
                if resp.status_code != 200:
                    raise GatewayError(f"endpoint returned {resp.status_code}: {resp.text[:200]}")
                return resp.json()["choices"][0]["message"]["content"]
            except (requests.RequestException, KeyError, ValueError) as exc:
                last_exc = exc
        raise GatewayError(f"request failed after {self.config.max_attempts} attempts: {last_exc}")

    def annotate_once(self, doc: Document, spec: PromptSpec, run_index: int) -> AnnotationResult:
        """One run: build prompt, call the endpoint, parse. Parse failures retry."""
        retries = 0
        last_exc: Exception | None = None
        for attempt in range(self.config.max_attempts):
            if attempt:
                retries += 1
                time.sleep(self.config.backoff_base_s * 2 ** (attempt - 1))
            raw = self.complete(build_prompt(doc, spec, self.taxonomy))
            try:
                result = parse_response(raw, doc, self.taxonomy,
                                        model_id=self.config.model, run_index=run_index)
            except PropwbError as exc:
                last_exc = exc
                continue
            if retries:
                diag = dict(result.diagnostics)
                diag["retries"] = retries
                result = replace(result, diagnostics=diag)
            return result
        raise GatewayError(f"run {run_index} failed after {self.config.max_attempts} attempts: {last_exc}")

    def annotate_document(self, doc: Document, k: int, spec: PromptSpec) -> RunBundle:
        """k independent runs; per-run shuffled prompts when a seed is set.

        Runs that exhaust their retries are recorded as bundle errors rather
        than aborting the bundle.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        results: list[AnnotationResult] = []
        errors: list[dict] = []
        for run_index in range(k):
            run_spec = per_run_spec(spec, doc.id, run_index)
            try:
                results.append(self.annotate_once(doc, run_spec, run_index))
            except GatewayError as exc:
                errors.append({"run_index": run_index, "error": str(exc)})
        return RunBundle(doc_id=doc.id, k=k, results=tuple(results), errors=tuple(errors))

    def annotate_corpus(self, docs, k: int, spec: PromptSpec) -> list[RunBundle]:
        """Annotate many documents with bounded concurrency; output order is
        input order regardless of completion order."""
        docs = list(docs)
        with ThreadPoolExecutor(max_workers=self.config.max_in_flight) as pool:
            futures = [pool.submit(self.annotate_document, d, k, spec) for d in docs]
            return [f.result() for f in futures]
