"""Human-verification review service: task queue with redundancy, sticky
assignment, qualification gating, append-only JSONL journals, and timing
analytics. The HTTP layer is a thin FastAPI wrapper around ReviewService."""

from __future__ import annotations

import json
import statistics
import threading
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .corpus import Document
from .errors import ServiceError
from .results import AnnotationResult
from .taxonomy import Taxonomy, default_taxonomy

DEFAULT_REDUNDANCY = 3


@dataclass(frozen=True)
class ReviewTask:
    task_id: str
    doc: Document
    spans: tuple[tuple[str, str], ...]  # (span text, local label)
    explanations: tuple[str, ...] = ()
    global_label: str | None = None  # never serialized toward annotators

    def annotator_payload(self, show_explanations: bool = False) -> dict:
        """Annotator-facing view. The LLM global label must never appear here."""
        payload = {
            "task_id": self.task_id,
            "text": self.doc.normalized_text,
            "spans": [{"span": s, "local_label": l} for s, l in self.spans],
        }
        if show_explanations and self.explanations:
            for entry, expl in zip(payload["spans"], self.explanations):
                entry["explanation"] = expl
        return payload


def tasks_from_results(results: list[AnnotationResult], docs_by_id: dict) -> list[ReviewTask]:
    tasks = []
    for i, r in enumerate(results):
        doc = docs_by_id[r.doc_id]
        tasks.append(ReviewTask(
            task_id=f"t{i:05d}",
            doc=doc,
            spans=tuple((s.span, s.local_label) for s in r.spans),
            explanations=tuple(s.explanation for s in r.spans),
            global_label=r.global_label,
        ))
    return tasks


@dataclass(frozen=True)
class HumanAnnotation:
    task_id: str
    annotator_id: str
    coarse: str
    fine: str
    elapsed_ms: int
    server_elapsed_ms: int = 0
    submitted_at: float = 0.0


@dataclass(frozen=True)
class QualificationSet:
    items: tuple[tuple[str, str], ...]  # (text, expected fine label)
    pass_threshold: float = 1.0

    def __post_init__(self):
        if not self.items:
            raise ValueError("qualification set must be non-empty")


def load_qualification(path=None) -> QualificationSet:
    if path is None:
        raw = resources.files("propwb.data").joinpath("qualification.json").read_text("utf-8")
        doc = json.loads(raw)
    else:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    return QualificationSet(
        items=tuple((it["text"], it["expected"]) for it in doc["items"]),
        pass_threshold=doc.get("pass_threshold", 1.0),
    )


class ReviewService:
    """Single-process review queue; all mutations run under one lock."""

    def __init__(self, tasks: list[ReviewTask], qualification: QualificationSet,
                 taxonomy: Taxonomy | None = None, redundancy: int = DEFAULT_REDUNDANCY,
                 show_explanations: bool = False, journal_dir=None, clock=time.time):
        self.tasks = list(tasks)
        self.qualification = qualification
        self.taxonomy = taxonomy or default_taxonomy()
        self.redundancy = redundancy
        self.show_explanations = show_explanations
        self.clock = clock
        self._lock = threading.Lock()
        # state folded over the journals
        self._assignments: dict[tuple[str, str], dict] = {}  # (task_id, annotator) -> {served_at}
        self._submissions: dict[tuple[str, str], HumanAnnotation] = {}
        self._qualified: dict[str, bool] = {}
        self._by_task: dict[str, int] = {t.task_id: i for i, t in enumerate(self.tasks)}
        self.journal_dir = Path(journal_dir) if journal_dir else None
        if self.journal_dir:
            self.journal_dir.mkdir(parents=True, exist_ok=True)
            self._replay_journals()

    # -- journaling ---------------------------------------------------------

    def _journal(self, name: str, record: dict):
        if not self.journal_dir:
            return
        with open(self.journal_dir / f"{name}.jsonl", "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")

    def _read_journal(self, name: str):
        path = self.journal_dir / f"{name}.jsonl"
        if not path.exists():
            return
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    yield json.loads(line)

    def _replay_journals(self):
        for rec in self._read_journal("qualifications"):
            self._qualified[rec["annotator_id"]] = rec["passed"]
        for rec in self._read_journal("assignments"):
            self._assignments[(rec["task_id"], rec["annotator_id"])] = {"served_at": rec["served_at"]}
        for rec in self._read_journal("submissions"):
            key = (rec["task_id"], rec["annotator_id"])
            self._submissions[key] = HumanAnnotation(**rec)

    # -- qualification ------------------------------------------------------

    def qualification_gate(self, annotator_id: str, answers: list[str]) -> dict:
        expected = [e for _, e in self.qualification.items]
        if len(answers) != len(expected):
            raise ServiceError("length-mismatch",
                               f"expected {len(expected)} answers, got {len(answers)}")
        score = sum(1 for a, e in zip(answers, expected) if a == e) / len(expected)
        passed = score >= self.qualification.pass_threshold
        with self._lock:
            # retakes allowed; the latest result governs
            self._qualified[annotator_id] = passed
        self._journal("qualifications", {"annotator_id": annotator_id, "passed": passed,
                                         "score": score, "at": self.clock()})
        return {"passed": passed, "score": score}

    def qualification_texts(self) -> list[str]:
        return [t for t, _ in self.qualification.items]

    def is_qualified(self, annotator_id: str) -> bool:
        return self._qualified.get(annotator_id, False)

    # -- task assignment ----------------------------------------------------

    def next_task(self, annotator_id: str) -> dict:
        with self._lock:
            if not self._qualified.get(annotator_id, False):
                raise ServiceError("not-qualified",
                                   f"annotator {annotator_id!r} has not passed qualification")
            # sticky: an unanswered assignment is re-served
            for task in self.tasks:
                key = (task.task_id, annotator_id)
                if key in self._assignments and key not in self._submissions:
                    return task.annotator_payload(self.show_explanations)
            for task in self.tasks:
                key = (task.task_id, annotator_id)
                if key in self._assignments:
                    continue
                assigned = sum(1 for (tid, _a) in self._assignments if tid == task.task_id)
                if assigned >= self.redundancy:
                    continue
                served_at = self.clock()
                self._assignments[key] = {"served_at": served_at}
                self._journal("assignments", {"task_id": task.task_id,
                                              "annotator_id": annotator_id,
                                              "served_at": served_at})
                return task.annotator_payload(self.show_explanations)
            raise ServiceError("queue-exhausted", "no tasks remain for this annotator")

    def submit_annotation(self, task_id: str, annotator_id: str, coarse: str,
                          fine: str, elapsed_ms: int) -> dict:
        with self._lock:
            key = (task_id, annotator_id)
            if key not in self._assignments:
                raise ServiceError("unassigned-task",
                                   f"task {task_id!r} is not assigned to {annotator_id!r}")
            if key in self._submissions:
                raise ServiceError("duplicate-submission",
                                   f"{annotator_id!r} already answered task {task_id!r}")
            expected_coarse = self.taxonomy.coarse_of(fine)
            if expected_coarse != coarse:
                raise ServiceError("coarse-fine-mismatch",
                                   f"label {fine!r} belongs to category {expected_coarse}, not {coarse}")
            now = self.clock()
            server_elapsed_ms = int(round((now - self._assignments[key]["served_at"]) * 1000))
            annotation = HumanAnnotation(
                task_id=task_id, annotator_id=annotator_id, coarse=coarse, fine=fine,
                elapsed_ms=elapsed_ms, server_elapsed_ms=server_elapsed_ms, submitted_at=now,
            )
            self._submissions[key] = annotation
        self._journal("submissions", annotation.__dict__)
        return {"ok": True, "server_elapsed_ms": server_elapsed_ms}

    # -- analytics ----------------------------------------------------------

    def submissions(self) -> list[HumanAnnotation]:
        return list(self._submissions.values())

    def progress(self) -> dict:
        per_task = {}
        for (tid, _a) in self._submissions:
            per_task[tid] = per_task.get(tid, 0) + 1
        complete = sum(1 for t in self.tasks if per_task.get(t.task_id, 0) >= self.redundancy)
        return {
            "tasks": len(self.tasks),
            "redundancy": self.redundancy,
            "submissions": len(self._submissions),
            "complete_tasks": complete,
            "qualified_annotators": sorted(a for a, ok in self._qualified.items() if ok),
        }

    def label_matrix_rows(self) -> dict:
        """task_id -> {annotator_id: fine label} over all submissions."""
        rows: dict[str, dict] = {}
        for (tid, aid), ann in self._submissions.items():
            rows.setdefault(tid, {})[aid] = ann.fine
        return rows


def timing_report(annotations: list[HumanAnnotation]) -> dict:
    """Mean/median seconds over server-side elapsed time, plus per-annotator means."""
    if not annotations:
        return {"count": 0, "mean_s": 0.0, "median_s": 0.0, "per_annotator": {}}
    secs = [a.server_elapsed_ms / 1000.0 for a in annotations]
    per: dict[str, list[float]] = {}
    for a in annotations:
        per.setdefault(a.annotator_id, []).append(a.server_elapsed_ms / 1000.0)
    return {
        "count": len(secs),
        "mean_s": statistics.fmean(secs),
        "median_s": statistics.median(secs),
        "per_annotator": {aid: statistics.fmean(v) for aid, v in per.items()},
    }


@dataclass(frozen=True)
class QualifyBody:
    annotator_id: str
    answers: list[str]


@dataclass(frozen=True)
class AnnotationBody:
    task_id: str
    annotator_id: str
    coarse: str
    fine: str
    elapsed_ms: int


def create_app(service: ReviewService):
    """FastAPI application exposing the review API."""
    from fastapi import FastAPI, HTTPException

    app = FastAPI(title="propwb review service")

    def _http(exc: ServiceError):
        status = {"not-qualified": 403, "queue-exhausted": 404, "unassigned-task": 409,
                  "duplicate-submission": 409, "coarse-fine-mismatch": 422,
                  "length-mismatch": 422}.get(exc.code, 400)
        return HTTPException(status_code=status, detail={"code": exc.code, "message": str(exc)})

    @app.post("/api/qualify")
    def qualify(body: QualifyBody):
        try:
            return service.qualification_gate(body.annotator_id, body.answers)
        except ServiceError as exc:
            raise _http(exc)

    @app.get("/api/qualification")
    def qualification():
        return {"items": [{"text": t} for t in service.qualification_texts()]}

    @app.get("/api/task")
    def task(annotator_id: str):
        try:
            return service.next_task(annotator_id)
        except ServiceError as exc:
            raise _http(exc)

    @app.post("/api/annotation")
    def annotation(body: AnnotationBody):
        try:
            return service.submit_annotation(body.task_id, body.annotator_id,
                                             body.coarse, body.fine, body.elapsed_ms)
        except ServiceError as exc:
            raise _http(exc)

    @app.get("/api/progress")
    def progress():
        return service.progress()

    @app.get("/api/taxonomy")
    def taxonomy():
        t = service.taxonomy
        return {
            "categories": [{"code": c.code, "title": c.title, "description": c.description}
                           for c in t.categories],
            "labels": [{"id": lab.id, "canonical_id": lab.canonical_id, "coarse": lab.coarse,
                        "definition": lab.definition} for lab in t.labels],
        }

    return app
