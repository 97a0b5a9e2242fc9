import json

import pytest

from propwb.corpus import Document, normalize
from propwb.errors import ServiceError
from propwb.service import (HumanAnnotation, QualificationSet, ReviewService,
                            ReviewTask, create_app, load_qualification,
                            tasks_from_results, timing_report)

from conftest import make_result


def make_task(i, label="loaded_language", global_label="loaded_language"):
    text = f"sample text number {i}"
    doc = Document(id=f"d{i}", raw_text=text, normalized_text=normalize(text),
                   binary_propaganda=True)
    return ReviewTask(task_id=f"t{i:05d}", doc=doc,
                      spans=((f"text number {i}", label),),
                      explanations=("model explanation",),
                      global_label=global_label)


@pytest.fixture
def qual():
    return QualificationSet(items=(("q one", "loaded_language"), ("q two", "doubt")))


GOOD_ANSWERS = ["loaded_language", "doubt"]


def make_service(n_tasks=4, qual=None, **kw):
    qual = qual or QualificationSet(items=(("q one", "loaded_language"), ("q two", "doubt")))
    return ReviewService([make_task(i) for i in range(n_tasks)], qual, **kw)


class TestQualification:
    def test_pass_requires_all_correct(self, qual):
        svc = make_service(qual=qual)
        assert svc.qualification_gate("ann1", GOOD_ANSWERS) == {"passed": True, "score": 1.0}
        assert svc.is_qualified("ann1")

    def test_one_wrong_fails(self, qual):
        svc = make_service(qual=qual)
        out = svc.qualification_gate("ann1", ["loaded_language", "slogans"])
        assert out == {"passed": False, "score": 0.5}
        assert not svc.is_qualified("ann1")

    def test_retake_latest_governs(self, qual):
        svc = make_service(qual=qual)
        svc.qualification_gate("ann1", ["x", "y"])
        svc.qualification_gate("ann1", GOOD_ANSWERS)
        assert svc.is_qualified("ann1")
        svc.qualification_gate("ann1", ["x", "y"])
        assert not svc.is_qualified("ann1")

    def test_length_mismatch(self, qual):
        svc = make_service(qual=qual)
        with pytest.raises(ServiceError) as exc:
            svc.qualification_gate("ann1", ["loaded_language"])
        assert exc.value.code == "length-mismatch"

    def test_default_file_loads(self):
        q = load_qualification()
        assert len(q.items) >= 4
        assert q.pass_threshold == 1.0

    def test_empty_set_rejected(self):
        with pytest.raises(ValueError):
            QualificationSet(items=())


class TestAssignment:
    def test_unqualified_blocked(self):
        svc = make_service()
        with pytest.raises(ServiceError) as exc:
            svc.next_task("ann1")
        assert exc.value.code == "not-qualified"

    def test_sticky_until_submitted(self):
        svc = make_service()
        svc.qualification_gate("ann1", GOOD_ANSWERS)
        first = svc.next_task("ann1")
        again = svc.next_task("ann1")
        assert first["task_id"] == again["task_id"]
        svc.submit_annotation(first["task_id"], "ann1", "A", "loaded_language", 100)
        nxt = svc.next_task("ann1")
        assert nxt["task_id"] != first["task_id"]

    def test_redundancy_caps_assignments(self):
        svc = make_service(n_tasks=1, redundancy=3)
        for a in ("a1", "a2", "a3", "a4"):
            svc.qualification_gate(a, GOOD_ANSWERS)
        for a in ("a1", "a2", "a3"):
            assert svc.next_task(a)["task_id"] == "t00000"
        with pytest.raises(ServiceError) as exc:
            svc.next_task("a4")
        assert exc.value.code == "queue-exhausted"

    def test_annotator_sees_each_task_once(self):
        svc = make_service(n_tasks=2)
        svc.qualification_gate("ann1", GOOD_ANSWERS)
        seen = []
        for _ in range(2):
            task = svc.next_task("ann1")
            seen.append(task["task_id"])
            svc.submit_annotation(task["task_id"], "ann1", "A", "loaded_language", 1)
        assert seen == ["t00000", "t00001"]
        with pytest.raises(ServiceError) as exc:
            svc.next_task("ann1")
        assert exc.value.code == "queue-exhausted"

    def test_payload_never_contains_global_label(self):
        svc = make_service(show_explanations=True)
        svc.qualification_gate("ann1", GOOD_ANSWERS)
        payload = svc.next_task("ann1")
        dump = json.dumps(payload)
        assert "global" not in dump
        assert set(payload) == {"task_id", "text", "spans"}

    def test_explanations_only_when_enabled(self):
        hidden = make_service(show_explanations=False)
        hidden.qualification_gate("a", GOOD_ANSWERS)
        assert "explanation" not in json.dumps(hidden.next_task("a"))
        shown = make_service(show_explanations=True)
        shown.qualification_gate("a", GOOD_ANSWERS)
        assert shown.next_task("a")["spans"][0]["explanation"] == "model explanation"


class TestSubmission:
    def test_unassigned_rejected(self):
        svc = make_service()
        svc.qualification_gate("ann1", GOOD_ANSWERS)
        with pytest.raises(ServiceError) as exc:
            svc.submit_annotation("t00000", "ann1", "A", "loaded_language", 5)
        assert exc.value.code == "unassigned-task"

    def test_duplicate_rejected(self):
        svc = make_service()
        svc.qualification_gate("ann1", GOOD_ANSWERS)
        task = svc.next_task("ann1")
        svc.submit_annotation(task["task_id"], "ann1", "A", "loaded_language", 5)
        with pytest.raises(ServiceError) as exc:
            svc.submit_annotation(task["task_id"], "ann1", "A", "loaded_language", 5)
        assert exc.value.code == "duplicate-submission"

    def test_coarse_fine_mismatch(self):
        svc = make_service()
        svc.qualification_gate("ann1", GOOD_ANSWERS)
        task = svc.next_task("ann1")
        with pytest.raises(ServiceError) as exc:
            svc.submit_annotation(task["task_id"], "ann1", "C", "loaded_language", 5)
        assert exc.value.code == "coarse-fine-mismatch"

    def test_server_elapsed_from_clock(self):
        now = [1000.0]
        svc = make_service(clock=lambda: now[0])
        svc.qualification_gate("ann1", GOOD_ANSWERS)
        task = svc.next_task("ann1")
        now[0] = 1002.5
        out = svc.submit_annotation(task["task_id"], "ann1", "A", "loaded_language",
                                    elapsed_ms=99999)
        # server-side timing is authoritative, not the client's elapsed_ms
        assert out["server_elapsed_ms"] == 2500

    def test_progress_and_matrix_rows(self):
        svc = make_service(n_tasks=1, redundancy=2)
        for a in ("a1", "a2"):
            svc.qualification_gate(a, GOOD_ANSWERS)
            task = svc.next_task(a)
            svc.submit_annotation(task["task_id"], a, "A", "loaded_language", 5)
        prog = svc.progress()
        assert prog["submissions"] == 2 and prog["complete_tasks"] == 1
        assert svc.label_matrix_rows() == {"t00000": {"a1": "loaded_language",
                                                      "a2": "loaded_language"}}


class TestJournalReplay:
    def test_replay_reconstructs_state(self, tmp_path):
        now = [0.0]
        svc = make_service(n_tasks=2, journal_dir=tmp_path, clock=lambda: now[0])
        svc.qualification_gate("ann1", GOOD_ANSWERS)
        svc.qualification_gate("ann2", ["x", "y"])
        task = svc.next_task("ann1")
        now[0] = 3.0
        svc.submit_annotation(task["task_id"], "ann1", "A", "loaded_language", 7)
        pending = svc.next_task("ann1")  # assigned but not submitted

        rebuilt = make_service(n_tasks=2, journal_dir=tmp_path, clock=lambda: now[0])
        assert rebuilt.is_qualified("ann1") and not rebuilt.is_qualified("ann2")
        assert rebuilt.progress() == svc.progress()
        assert rebuilt.label_matrix_rows() == svc.label_matrix_rows()
        # sticky assignment survives the restart
        assert rebuilt.next_task("ann1")["task_id"] == pending["task_id"]
        sub = rebuilt.submissions()[0]
        assert sub.server_elapsed_ms == 3000 and sub.elapsed_ms == 7

    def test_journals_are_append_only_jsonl(self, tmp_path):
        svc = make_service(journal_dir=tmp_path)
        svc.qualification_gate("ann1", GOOD_ANSWERS)
        svc.next_task("ann1")
        for name in ("qualifications", "assignments"):
            lines = (tmp_path / f"{name}.jsonl").read_text("utf-8").splitlines()
            assert all(json.loads(l) for l in lines)


class TestTasksFromResults:
    def test_fields_carried_over(self):
        doc = make_task(0).doc
        result = make_result(doc.id, [("text number 0", "doubt")], "doubt")
        tasks = tasks_from_results([result], {doc.id: doc})
        assert tasks[0].spans == (("text number 0", "doubt"),)
        assert tasks[0].global_label == "doubt"
        assert tasks[0].explanations == ("why text number 0",)


class TestTimingReport:
    def test_hand_check(self):
        anns = [HumanAnnotation("t", a, "A", "loaded_language", 0, server_elapsed_ms=ms)
                for a, ms in [("a1", 2000), ("a1", 4000), ("a2", 9000)]]
        report = timing_report(anns)
        assert report["count"] == 3
        assert report["mean_s"] == pytest.approx(5.0)
        assert report["median_s"] == pytest.approx(4.0)
        assert report["per_annotator"] == {"a1": pytest.approx(3.0), "a2": pytest.approx(9.0)}

    def test_empty(self):
        assert timing_report([]) == {"count": 0, "mean_s": 0.0, "median_s": 0.0,
                                     "per_annotator": {}}


class TestHttpApi:
    @pytest.fixture
    def client(self):
        from fastapi.testclient import TestClient
        svc = make_service(n_tasks=2, show_explanations=True)
        return TestClient(create_app(svc))

    def test_full_flow(self, client):
        r = client.post("/api/qualify", json={"annotator_id": "a1", "answers": GOOD_ANSWERS})
        assert r.status_code == 200 and r.json()["passed"] is True
        task = client.get("/api/task", params={"annotator_id": "a1"}).json()
        assert "global" not in json.dumps(task)
        r = client.post("/api/annotation", json={
            "task_id": task["task_id"], "annotator_id": "a1", "coarse": "A",
            "fine": "loaded_language", "elapsed_ms": 1200})
        assert r.status_code == 200 and r.json()["ok"] is True
        prog = client.get("/api/progress").json()
        assert prog["submissions"] == 1

    def test_error_status_codes(self, client):
        assert client.get("/api/task", params={"annotator_id": "nobody"}).status_code == 403
        client.post("/api/qualify", json={"annotator_id": "a1", "answers": GOOD_ANSWERS})
        r = client.post("/api/annotation", json={
            "task_id": "t00000", "annotator_id": "a1", "coarse": "A",
            "fine": "loaded_language", "elapsed_ms": 1})
        assert r.status_code == 409
        r = client.post("/api/qualify", json={"annotator_id": "a1", "answers": ["one"]})
        assert r.status_code == 422

    def test_queue_exhausted_404(self, client):
        client.post("/api/qualify", json={"annotator_id": "a1", "answers": GOOD_ANSWERS})
        for _ in range(2):
            task = client.get("/api/task", params={"annotator_id": "a1"}).json()
            client.post("/api/annotation", json={
                "task_id": task["task_id"], "annotator_id": "a1", "coarse": "A",
                "fine": "loaded_language", "elapsed_ms": 1})
        assert client.get("/api/task", params={"annotator_id": "a1"}).status_code == 404

    def test_taxonomy_endpoint(self, client):
        body = client.get("/api/taxonomy").json()
        assert [c["code"] for c in body["categories"]] == ["A", "B", "C"]
        assert len(body["labels"]) == 17
        assert "global_label" not in json.dumps(body)

    def test_qualification_endpoint_hides_answers(self, client):
        body = client.get("/api/qualification").json()
        assert all(set(it) == {"text"} for it in body["items"])
