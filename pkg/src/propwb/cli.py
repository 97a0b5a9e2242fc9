"""Command-line entry point tying the workbench modules together."""

from __future__ import annotations

import argparse
import json
import sys

from . import agreement as agr
from . import analytics, corpus, distill, sampling, spaneval, stats
from .errors import PropwbError
from .gateway import ChatGateway, GatewayConfig
from .prompts import PromptSpec
from .results import (RunBundle, aggregate_mode, load_results_jsonl,
                      result_from_record, result_to_record, save_results_jsonl)
from .taxonomy import default_taxonomy, load_taxonomy, validate_taxonomy


def _load_config(path):
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _taxonomy(args):
    if getattr(args, "taxonomy", None):
        return load_taxonomy(args.taxonomy)
    return default_taxonomy()


def _emit(obj, args):
    out = json.dumps(obj, indent=2, ensure_ascii=False)
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out + "\n")
    else:
        print(out)


def _load_bundles(path) -> list[RunBundle]:
    """Bundle JSONL: one line per document, {"doc_id", "k", "results": [...]}."""
    bundles = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            bundles.append(RunBundle(
                doc_id=rec["doc_id"], k=rec["k"],
                results=tuple(result_from_record(r) for r in rec["results"]),
                errors=tuple(rec.get("errors", [])),
            ))
    return bundles


def _save_bundles(bundles, path):
    with open(path, "w", encoding="utf-8") as fh:
        for b in bundles:
            fh.write(json.dumps({
                "doc_id": b.doc_id, "k": b.k,
                "results": [result_to_record(r) for r in b.results],
                "errors": list(b.errors),
            }, ensure_ascii=False) + "\n")


def cmd_ingest(args):
    c = corpus.ingest(args.input, format=args.format, taxonomy=_taxonomy(args))
    manifest_path = args.manifest or f"{args.input}.manifest.json"
    corpus.write_manifest(c, manifest_path)
    _emit(corpus.corpus_stats(c), args)


def cmd_annotate(args):
    cfg = _load_config(args.config)
    taxonomy = _taxonomy(args)
    c = corpus.ingest(args.input, format=args.format, taxonomy=taxonomy)
    if args.positive_only:
        c = corpus.filter_binary_positive(c)
    gateway = ChatGateway(GatewayConfig.from_env(
        base_url=args.endpoint or cfg.get("endpoint"),
        model=args.model or cfg.get("model"),
        temperature=cfg.get("temperature", 0.0),
        backoff_base_s=cfg.get("backoff_base_s"),
        max_in_flight=cfg.get("max_in_flight"),
    ), taxonomy)
    seed = cfg.get("seeds", {}).get("shuffle") if args.shuffle else None
    spec = PromptSpec(shuffle_seed=seed if seed is not None else (0 if args.shuffle else None))
    k = args.k or cfg.get("k_runs", 1)
    bundles = gateway.annotate_corpus(c.documents, k=k, spec=spec)
    _save_bundles(bundles, args.output)
    n_err = sum(len(b.errors) for b in bundles)
    print(f"annotated {len(bundles)} documents x {k} runs -> {args.output} ({n_err} run errors)",
          file=sys.stderr)


def cmd_aggregate(args):
    bundles = _load_bundles(args.input)
    results = [aggregate_mode(b) for b in bundles if b.results]
    save_results_jsonl(results, args.output)
    print(f"aggregated {len(results)} results -> {args.output}", file=sys.stderr)


def cmd_stability(args):
    bundles = _load_bundles(args.input)
    _emit(analytics.stability_report(bundles, k=args.k), args)


def cmd_analyze(args):
    results = load_results_jsonl(args.input)
    _emit({
        "span_histogram": analytics.span_histogram(results),
        "positional": analytics.positional_analysis(results),
        "n_results": len(results),
        "n_empty": sum(1 for r in results if not r.spans),
    }, args)


def cmd_iaa(args):
    m = agr.load_matrix_csv(args.matrix)
    _emit(agr.agreement_report(m), args)


def cmd_kappa(args):
    a = agr.load_matrix_csv(args.matrix_a)
    b = agr.load_matrix_csv(args.matrix_b) if args.matrix_b else None
    if b is None:
        cols = list(zip(*a.cells))
        report = agr.cohen_kappa(list(cols[0]), list(cols[1]))
    else:
        report = agr.cohen_kappa([r[0] for r in a.cells], [r[0] for r in b.cells])
    _emit(report, args)


def cmd_conditional(args):
    coarse = agr.load_matrix_csv(args.coarse)
    fine = agr.load_matrix_csv(args.fine)
    _emit(agr.conditional_agreement(coarse, fine, mode=args.mode), args)


def cmd_stuart_maxwell(args):
    if args.table:
        table = stats.load_table_csv(args.table)
    else:
        pairs = {}
        import csv as _csv
        with open(args.pairs, encoding="utf-8", newline="") as fh:
            reader = _csv.DictReader(fh)
            a = {}
            b = {}
            for i, row in enumerate(reader):
                a[str(i)] = row["a"]
                b[str(i)] = row["b"]
        labels = sorted(set(a.values()) | set(b.values()))
        table = stats.paired_contingency(a, b, labels)
    r = stats.stuart_maxwell(table)
    _emit({"statistic": r.statistic, "df": r.df, "p_value": r.p_value,
           "dropped_categories": list(r.dropped_categories)}, args)


def cmd_sample_size(args):
    n = stats.sample_size(stats.SampleSpec(
        population_N=args.population, confidence=args.confidence,
        margin_e=args.margin, proportion_p=args.proportion))
    _emit({"n": n}, args)


def cmd_sample(args):
    cfg = _load_config(args.config)
    results = load_results_jsonl(args.input)
    plan = sampling.StratifiedPlan(
        strata=cfg.get("strata", {}),
        default_quota=args.quota,
        include_all_below=args.include_all_below if args.include_all_below is not None
        else cfg.get("include_all_below", sampling.DEFAULT_INCLUDE_ALL_BELOW),
        seed=args.seed,
    )
    _emit({"doc_ids": sampling.stratified_sample(results, plan, _taxonomy(args))}, args)


def cmd_split(args):
    records = distill.load_distill(args.input, format=args.format)
    parts = sampling.split_80_20(records, key=lambda r: r.global_label, seed=args.seed)
    base = args.input.rsplit(".jsonl", 1)[0]
    for name in ("train", "test"):
        path = f"{base}.{name}.jsonl"
        with open(path, "w", encoding="utf-8") as fh:
            for rec in parts[name]:
                if args.format == "messages-jsonl":
                    line = {"messages": rec.prompt + [{"role": "assistant", "content": rec.completion}],
                            "global_label": rec.global_label}
                else:
                    line = {"prompt": json.dumps(rec.prompt, ensure_ascii=False),
                            "completion": rec.completion, "global_label": rec.global_label}
                fh.write(json.dumps(line, ensure_ascii=False) + "\n")
    _emit({"train": len(parts["train"]), "test": len(parts["test"])}, args)


def cmd_export_distill(args):
    taxonomy = _taxonomy(args)
    results = load_results_jsonl(args.results)
    c = corpus.ingest(args.corpus, format=args.format, taxonomy=taxonomy)
    docs_by_id = {d.id: d for d in c.documents}
    n = distill.export_distill(results, docs_by_id, PromptSpec(), args.out,
                               format=args.distill_format, taxonomy=taxonomy)
    _emit({"records": n}, args)


def cmd_eval_spans(args):
    pred = {r.doc_id: r for r in load_results_jsonl(args.predictions)}
    gold = {r.doc_id: r for r in load_results_jsonl(args.gold)}
    shared = [d for d in gold if d in pred]
    pairs = [spaneval.EvalPair(d, pred[d], gold[d]) for d in shared]
    universe = _taxonomy(args).label_set("split") if args.macro_universe == "full" else None
    report = spaneval.evaluate(pairs, threshold=args.threshold, universe=universe)
    _emit(report, args)
    cols = ("G_macro", "G_micro", "Span_e", "Span_f", "Local_e", "Local_f")
    print("  ".join(cols), file=sys.stderr)
    print("  ".join(f"{report[c]:.4f}" for c in cols), file=sys.stderr)


def cmd_validate_taxonomy(args):
    findings = validate_taxonomy(_taxonomy(args))
    _emit({"findings": findings, "ok": not findings}, args)


def cmd_serve(args):
    import uvicorn

    from .service import (ReviewService, create_app, load_qualification,
                          tasks_from_results)
    cfg = _load_config(args.config)
    taxonomy = _taxonomy(args)
    results = load_results_jsonl(args.results)
    c = corpus.ingest(args.corpus, format=args.format, taxonomy=taxonomy)
    docs_by_id = {d.id: d for d in c.documents}
    tasks = tasks_from_results([r for r in results if r.spans], docs_by_id)
    service = ReviewService(
        tasks=tasks,
        qualification=load_qualification(args.qualification),
        taxonomy=taxonomy,
        redundancy=args.redundancy or cfg.get("redundancy", 3),
        show_explanations=cfg.get("show_explanations", False),
        journal_dir=args.journal_dir,
    )
    uvicorn.run(create_app(service), host=args.host, port=args.port)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="propwb",
                                     description="Propaganda annotation workbench.")
    parser.add_argument("--taxonomy", help="Path to an alternative taxonomy JSON file.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(fn=fn)
        p.add_argument("--output", "-o", help="Write the JSON report here instead of stdout.")
        return p

    p = add("ingest", cmd_ingest, help="Ingest a corpus file and write its manifest.")
    p.add_argument("input")
    p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    p.add_argument("--manifest")

    p = add("annotate", cmd_annotate, help="Annotate a corpus through the LLM gateway.")
    p.add_argument("input")
    p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    p.add_argument("--endpoint")
    p.add_argument("--model")
    p.add_argument("--config")
    p.add_argument("-k", type=int, default=None, help="Runs per document.")
    p.add_argument("--shuffle", action="store_true",
                   help="Shuffle label definitions and few-shot order per run.")
    p.add_argument("--positive-only", action="store_true")

    p = add("aggregate", cmd_aggregate, help="Collapse run bundles by global-label mode.")
    p.add_argument("input")

    p = add("stability", cmd_stability, help="Multi-run agreement rates.")
    p.add_argument("input")
    p.add_argument("-k", type=int, default=5)

    p = add("analyze", cmd_analyze, help="Span histogram and positional analysis.")
    p.add_argument("input")

    p = add("iaa", cmd_iaa, help="Raw quorum agreement and Krippendorff's alpha.")
    p.add_argument("matrix", help="Label matrix CSV (item_id,<annotator>...).")

    p = add("kappa", cmd_kappa, help="Cohen's kappa between two label columns.")
    p.add_argument("matrix_a")
    p.add_argument("matrix_b", nargs="?")

    p = add("conditional", cmd_conditional, help="Fine agreement conditioned on coarse consensus.")
    p.add_argument("coarse")
    p.add_argument("fine")
    p.add_argument("--mode", choices=("exact", "at_least"), default="exact")

    p = add("stuart-maxwell", cmd_stuart_maxwell, help="Marginal homogeneity test.")
    p.add_argument("--pairs", help="CSV with columns a,b of paired labels.")
    p.add_argument("--table", help="Square contingency table CSV.")

    p = add("sample-size", cmd_sample_size, help="Survey sample size with finite correction.")
    p.add_argument("--population", type=int, default=None)
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--margin", type=float, default=0.05)
    p.add_argument("--proportion", type=float, default=0.5)

    p = add("sample", cmd_sample, help="Stratified sample of annotated documents.")
    p.add_argument("input", help="Aggregated results JSONL.")
    p.add_argument("--quota", type=int, default=None)
    p.add_argument("--include-all-below", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config")

    p = add("split", cmd_split, help="Stratified 80/20 split of a distillation export.")
    p.add_argument("input")
    p.add_argument("--format", choices=("messages-jsonl", "prompt-completion-jsonl"),
                   default="messages-jsonl")
    p.add_argument("--seed", type=int, default=0)

    p = add("export-distill", cmd_export_distill, help="Export teacher annotations as training pairs.")
    p.add_argument("results")
    p.add_argument("corpus")
    p.add_argument("out", help="Destination JSONL for the distillation records.")
    p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    p.add_argument("--distill-format", choices=("messages-jsonl", "prompt-completion-jsonl"),
                   default="messages-jsonl")

    p = add("eval-spans", cmd_eval_spans, help="Six-metric span/label evaluation report.")
    p.add_argument("predictions")
    p.add_argument("gold")
    p.add_argument("--threshold", type=float, default=0.8)
    p.add_argument("--macro-universe", choices=("present", "full"), default="present")

    p = add("validate-taxonomy", cmd_validate_taxonomy, help="Check taxonomy invariants.")

    p = add("serve", cmd_serve, help="Run the human-verification review service.")
    p.add_argument("results", help="Aggregated results JSONL (pre-annotations).")
    p.add_argument("corpus", help="Corpus file the results refer to.")
    p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    p.add_argument("--qualification", help="Qualification set JSON; default embedded set.")
    p.add_argument("--journal-dir", default="journals")
    p.add_argument("--redundancy", type=int, default=None)
    p.add_argument("--config")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8700)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.fn(args)
    except (PropwbError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
