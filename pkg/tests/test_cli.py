import json

import pytest

from propwb.cli import main
from propwb.mockllm import MockLLMServer
from propwb.results import save_results_jsonl

from conftest import make_result, write_jsonl


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


@pytest.fixture
def corpus_file(tmp_path):
    records = [{"id": f"d{i}",
                "text": f"the loud slogan number {i} rings across the square",
                "binary_propaganda": True} for i in range(5)]
    records.append({"id": "neg", "text": "there is no propaganda here",
                    "binary_propaganda": False})
    return str(write_jsonl(tmp_path / "corpus.jsonl", records))


def test_sample_size_command(capsys):
    code, report = run(capsys, "sample-size", "--population", "4534")
    assert code == 0 and report == {"n": 355}


def test_sample_size_infinite(capsys):
    code, report = run(capsys, "sample-size")
    assert code == 0 and report == {"n": 385}


def test_validate_taxonomy_command(capsys):
    code, report = run(capsys, "validate-taxonomy")
    assert code == 0 and report == {"findings": [], "ok": True}


def test_ingest_writes_manifest(capsys, corpus_file, tmp_path):
    manifest = tmp_path / "m.json"
    code, stats = run(capsys, "ingest", corpus_file, "--manifest", str(manifest))
    assert code == 0
    assert stats["total"] == 6 and stats["positive"] == 5
    assert json.loads(manifest.read_text())["counts"]["total"] == 6


def test_ingest_missing_file_exits_1(capsys, tmp_path):
    code = main(["ingest", str(tmp_path / "nope.jsonl")])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_iaa_command(capsys, tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("item_id,a1,a2,a3\n"
                    "i1,doubt,doubt,doubt\n"
                    "i2,doubt,slogans,doubt\n"
                    "i3,slogans,slogans,slogans\n")
    code, report = run(capsys, "iaa", str(path))
    assert code == 0
    assert report["raw_quorum"]["3/3"] == pytest.approx(2 / 3)
    assert "alpha" in report


def test_kappa_command(capsys, tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("item_id,a1,a2\ni1,x,x\ni2,x,y\ni3,y,y\ni4,y,y\n")
    code, report = run(capsys, "kappa", str(path))
    assert code == 0
    assert report["observed_agreement"] == pytest.approx(0.75)


def test_conditional_command(capsys, tmp_path):
    coarse = tmp_path / "c.csv"
    coarse.write_text("item_id,a1,a2,a3\ni1,A,A,A\ni2,A,A,B\n")
    fine = tmp_path / "f.csv"
    fine.write_text("item_id,a1,a2,a3\n"
                    "i1,loaded_language,loaded_language,loaded_language\n"
                    "i2,loaded_language,slogans,doubt\n")
    code, report = run(capsys, "conditional", str(coarse), str(fine))
    assert code == 0
    assert report["3/3_coarse|3/3_fine"] == pytest.approx(1.0)


def test_stuart_maxwell_table(capsys, tmp_path):
    path = tmp_path / "t.csv"
    path.write_text(",x,y,z\nx,20,5,3\ny,4,30,2\nz,6,1,25\n")
    code, report = run(capsys, "stuart-maxwell", "--table", str(path))
    assert code == 0
    assert report["df"] == 2 and 0.0 <= report["p_value"] <= 1.0


def test_stuart_maxwell_pairs(capsys, tmp_path):
    path = tmp_path / "p.csv"
    rows = ["a,b"] + ["x,x"] * 10 + ["x,y"] * 3 + ["y,x"] * 2 + ["y,y"] * 8
    path.write_text("\n".join(rows) + "\n")
    code, report = run(capsys, "stuart-maxwell", "--pairs", str(path))
    assert code == 0
    assert report["df"] == 1
    assert report["statistic"] == pytest.approx((3 - 2) ** 2 / (3 + 2))


def test_eval_spans_identity(capsys, tmp_path):
    results = [make_result("d1", [("alpha beta", "doubt")], "doubt")]
    pred = tmp_path / "pred.jsonl"
    gold = tmp_path / "gold.jsonl"
    save_results_jsonl(results, pred)
    save_results_jsonl(results, gold)
    code, report = run(capsys, "eval-spans", str(pred), str(gold))
    assert code == 0
    for key in ("G_macro", "G_micro", "Span_e", "Span_f", "Local_e", "Local_f"):
        assert report[key] == 1.0


def test_pipeline_end_to_end(capsys, corpus_file, tmp_path):
    bundles = tmp_path / "bundles.jsonl"
    agg = tmp_path / "agg.jsonl"
    distilled = tmp_path / "distill.jsonl"
    with MockLLMServer() as server:
        code = main(["annotate", corpus_file, "--endpoint", server.base_url,
                     "--positive-only", "-k", "3", "--shuffle",
                     "-o", str(bundles)])
    assert code == 0
    assert len(bundles.read_text().splitlines()) == 5

    code, _ = run(capsys, "aggregate", bundles.as_posix(), "-o", agg.as_posix())
    assert code == 0

    code, stability = run(capsys, "stability", bundles.as_posix(), "-k", "3")
    assert code == 0
    # the mock backend is deterministic per document, so all runs agree
    assert stability["rates"]["global_label"]["3/3"] == 1.0

    code, analysis = run(capsys, "analyze", agg.as_posix())
    assert code == 0
    assert sum(analysis["span_histogram"].values()) + analysis["n_empty"] == 5

    code, exported = run(capsys, "export-distill", agg.as_posix(), corpus_file,
                         distilled.as_posix())
    assert code == 0 and exported == {"records": 5}
    assert len(distilled.read_text().splitlines()) == 5

    from collections import Counter
    labels = Counter(json.loads(l)["global_label"]
                     for l in distilled.read_text().splitlines())
    expected_test = sum(0 if n < 2 else max(1, round(0.2 * n)) for n in labels.values())
    code, counts = run(capsys, "split", distilled.as_posix(), "--seed", "1")
    assert code == 0
    assert counts["train"] + counts["test"] == 5 and counts["test"] == expected_test


def test_split_command(capsys, tmp_path):
    lines = []
    for i in range(10):
        lines.append({"messages": [{"role": "system", "content": "s"},
                                   {"role": "user", "content": f"u{i}"},
                                   {"role": "assistant", "content": "{}"}],
                      "global_label": "doubt"})
    path = tmp_path / "d.jsonl"
    write_jsonl(path, lines)
    code, counts = run(capsys, "split", str(path))
    assert code == 0 and counts == {"train": 8, "test": 2}
    assert len((tmp_path / "d.train.jsonl").read_text().splitlines()) == 8
    assert len((tmp_path / "d.test.jsonl").read_text().splitlines()) == 2


def test_sample_command(capsys, tmp_path):
    results = [make_result(f"d{i}", [("s", "doubt")], "doubt") for i in range(6)]
    path = tmp_path / "agg.jsonl"
    save_results_jsonl(results, path)
    code, out = run(capsys, "sample", str(path), "--include-all-below", "10")
    assert code == 0 and len(out["doc_ids"]) == 6
