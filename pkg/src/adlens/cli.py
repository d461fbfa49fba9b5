"""Command-line surface: one batch command per pipeline stage.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric error.
ADLENS_SEED overrides --seed everywhere a seed is accepted. Reports are
JSON with an embedded run manifest; two runs with identical inputs and
seed produce identical reports up to the manifest's wall time/timestamp
(compare via the embedded determinism_digest).
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import os
import sys
from pathlib import Path

import numpy as np

from adlens import __version__
from adlens import analysis
from adlens.corpus import (
    dedup_by_content,
    load_corpus_store,
    representatives,
    save_corpus_store,
)
from adlens.embed import MEAN_POOL, RECURRENT, EmbeddingModel, TrainConfig, WordVectors
from adlens.embed import synthetic_vectors, train
from adlens.errors import AdlensError, DataError, NumericError
from adlens.graph import build_graph
from adlens.infer import (
    evaluate,
    load_holdout,
    load_predictions,
    predict_corpus,
    save_predictions,
)
from adlens.lexicon import IssueLexicon, build_lexicon, load_issue_docs, match_issues
from adlens.manifest import RunTimer, build_manifest, finish_report, write_report
from adlens.synth import SynthSpec, generate, save_ads_jsonl, save_gold, save_issue_docs
from adlens.textproc import tokenize
from adlens.weaklabel import CueConfig, DEFAULT_CUES, WeakLabels, label_corpus

_ENCODER_ALIASES = {"mean-pool": MEAN_POOL, "recurrent": RECURRENT}


def _effective_seed(args) -> int:
    env = os.environ.get("ADLENS_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise DataError(f"ADLENS_SEED must be an integer, got {env!r}") from exc
    return getattr(args, "seed", 0)


def _emit(args, report: dict) -> None:
    out = getattr(args, "out", None)
    if out:
        write_report(out, report)
        print(json.dumps({"written": str(out), "digest": report["manifest"]["determinism_digest"]}))
    else:
        from adlens.manifest import _json_safe

        print(json.dumps(_json_safe(report), indent=1, sort_keys=True, ensure_ascii=False))


def _report(args, command: str, inputs: dict, payload: dict, timer: RunTimer, seed=None) -> None:
    arg_dict = {
        k: (str(v) if isinstance(v, Path) else v)
        for k, v in sorted(vars(args).items())
        if k != "func" and v is not None
    }
    manifest = build_manifest(command, arg_dict, inputs, seed, timer)
    _emit(args, finish_report(payload, manifest))


def cmd_ingest(args) -> int:
    timer = RunTimer()
    from adlens.corpus import load_ads

    corpus = load_ads(args.ads)
    deduped, dedup_map = dedup_by_content(corpus)
    save_corpus_store(args.out, corpus, dedup_map)
    summary = {
        "summary": corpus.summary.as_dict(),
        "n_ads": len(corpus),
        "n_unique_texts": len(deduped),
        "n_entities": len(corpus.entities()),
        "out": str(args.out),
    }
    manifest = build_manifest("ingest", {"ads": str(args.ads)}, {"ads": args.ads}, None, timer)
    print(json.dumps(finish_report(summary, manifest), indent=1, sort_keys=True))
    return 0


def cmd_lexicon_build(args) -> int:
    timer = RunTimer()
    docs = load_issue_docs(args.issues)
    lex = build_lexicon(docs, threshold=args.threshold)
    lex.save(args.out)
    payload: dict = {"n_entries": len(lex), "threshold": args.threshold, "out": str(args.out)}
    if args.table:
        from adlens.lexicon import ngram_count_table

        payload["ngram_table"] = ngram_count_table(docs, threshold=args.threshold)
    manifest = build_manifest(
        "lexicon build", {"issues": str(args.issues), "threshold": args.threshold},
        {"issues": args.issues}, None, timer,
    )
    print(json.dumps(finish_report(payload, manifest), indent=1, sort_keys=True))
    return 0


def cmd_weaklabel(args) -> int:
    timer = RunTimer()
    corpus, _ = load_corpus_store(args.corpus)
    cues = CueConfig.load(args.cues) if args.cues else DEFAULT_CUES
    labels = label_corpus(corpus, cues)
    labels.save(args.out)
    payload = {"counts": labels.counts(), "n_entities": len(corpus.entities()), "out": str(args.out)}
    manifest = build_manifest("weaklabel", {"corpus": str(args.corpus)}, {"corpus": args.corpus}, None, timer)
    print(json.dumps(finish_report(payload, manifest), indent=1, sort_keys=True))
    return 0


def cmd_train(args) -> int:
    timer = RunTimer()
    seed = _effective_seed(args)
    corpus, dedup_map = load_corpus_store(args.corpus)
    deduped = representatives(corpus, dedup_map)
    lexicon = IssueLexicon.load(args.lexicon)
    labels = WeakLabels.load(args.labels)
    word_vectors = WordVectors.load(args.wordvecs)

    matches = {}
    for ad in deduped.ads:
        hit = match_issues(tokenize(ad.text), lexicon)
        if hit:
            matches[ad.id] = hit
    ad_stances = {k: v for k, v in labels.ad_stances.items() if k in deduped.by_id}
    graph = build_graph(deduped, labels.entity_stances, ad_stances, matches)

    config = TrainConfig(
        dim=args.dim,
        encoder_hidden=args.hidden,
        lr=args.lr,
        max_epochs=args.max_epochs,
        patience=args.patience,
        seed=seed,
        encoder_kind=_ENCODER_ALIASES[args.encoder],
        val_fraction=args.val_fraction,
    )
    model = train(graph, config, word_vectors)
    model.save(args.out)
    payload = {
        "graph": graph.stats(),
        "history": model.history,
        "encoder": config.encoder_kind,
        "out": str(args.out),
    }
    manifest = build_manifest(
        "train",
        {"encoder": config.encoder_kind, "dim": config.dim, "max_epochs": config.max_epochs},
        {"corpus": args.corpus, "lexicon": args.lexicon, "labels": args.labels, "wordvecs": args.wordvecs},
        seed,
        timer,
    )
    print(json.dumps(finish_report(payload, manifest), indent=1, sort_keys=True))
    return 0


def cmd_infer(args) -> int:
    timer = RunTimer()
    model = EmbeddingModel.load(args.model)
    corpus, _ = load_corpus_store(args.corpus)
    predictions = predict_corpus(model, corpus, cosine=args.cosine)
    save_predictions(predictions, args.out)
    payload = {"n_predictions": len(predictions), "cosine": args.cosine, "out": str(args.out)}
    manifest = build_manifest(
        "infer", {"cosine": args.cosine}, {"model": args.model, "corpus": args.corpus}, None, timer
    )
    print(json.dumps(finish_report(payload, manifest), indent=1, sort_keys=True))
    return 0


def cmd_eval(args) -> int:
    timer = RunTimer()
    predictions = load_predictions(args.predictions)
    holdout = load_holdout(args.holdout)
    metrics = evaluate(predictions, holdout)
    _report(
        args, "eval",
        {"predictions": args.predictions, "holdout": args.holdout},
        {"metrics": metrics}, timer,
    )
    return 0


def cmd_analyze(args) -> int:
    timer = RunTimer()
    predictions = load_predictions(args.predictions)
    corpus, _ = load_corpus_store(args.corpus)
    inputs = {"predictions": args.predictions, "corpus": args.corpus}
    if args.what == "demographics":
        payload = analysis.demographics_report(predictions, corpus, one_sided=args.one_sided)
    elif args.what == "state":
        if not args.state:
            raise DataError("analyze state requires --state")
        payload = analysis.state_report(
            predictions, corpus, args.state, min_share=args.min_regional_share
        )
    elif args.what == "trigrams":
        if not args.model:
            raise DataError("analyze trigrams requires a model path")
        model = EmbeddingModel.load(args.model)
        inputs["model"] = args.model
        payload = analysis.trigram_report(
            predictions, corpus, model, issue=args.issue, top=args.top
        )
    elif args.what == "wordfreq":
        payload = {"frequencies": analysis.wordfreq_report(predictions, corpus, top=args.top)}
    else:  # unreachable through argparse
        raise DataError(f"unknown analysis {args.what!r}")
    _report(args, f"analyze {args.what}", inputs, payload, timer)
    return 0


def cmd_granger(args) -> int:
    timer = RunTimer()
    polls = analysis.load_polls(args.polls)
    predictions = load_predictions(args.predictions)
    corpus, _ = load_corpus_store(args.corpus)
    cutoff = dt.date.fromisoformat(args.cutoff)
    payload = analysis.granger_report(
        polls, predictions, corpus, max_lag=args.max_lag, cutoff=cutoff
    )
    _report(
        args, "granger",
        {"polls": args.polls, "predictions": args.predictions, "corpus": args.corpus},
        payload, timer,
    )
    return 0


def cmd_synth(args) -> int:
    timer = RunTimer()
    spec = SynthSpec.load(args.spec) if args.spec else SynthSpec()
    if args.seed is not None:
        spec.seed = args.seed
    env_seed = os.environ.get("ADLENS_SEED")
    if env_seed is not None:
        try:
            spec.seed = int(env_seed)
        except ValueError as exc:
            raise DataError(f"ADLENS_SEED must be an integer, got {env_seed!r}") from exc
    corpus, gold, issue_docs = generate(spec)
    ads_path, issues_path, gold_path = args.out
    save_ads_jsonl(corpus, ads_path)
    save_issue_docs(issue_docs, issues_path)
    save_gold(gold, gold_path)
    payload = {
        "n_ads": len(corpus),
        "n_entities": len(corpus.entities()),
        "n_issue_docs": len(issue_docs.docs),
        "seed": spec.seed,
        "outputs": [str(p) for p in args.out],
    }
    inputs = {"spec": args.spec} if args.spec else {}
    manifest = build_manifest("synth", {"seed": spec.seed}, inputs, spec.seed, timer)
    print(json.dumps(finish_report(payload, manifest), indent=1, sort_keys=True))
    return 0


def cmd_wordvecs(args) -> int:
    timer = RunTimer()
    seed = _effective_seed(args)
    corpus, _ = load_corpus_store(args.ads)
    vocab = sorted({tok for ad in corpus.ads for tok in tokenize(ad.text)})
    vectors = synthetic_vectors(vocab, dim=args.dim, seed=seed)
    vectors.save(args.out)
    payload = {"n_tokens": len(vectors), "dim": args.dim, "out": str(args.out)}
    manifest = build_manifest("wordvecs", {"dim": args.dim}, {"ads": args.ads}, seed, timer)
    print(json.dumps(finish_report(payload, manifest), indent=1, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adlens",
        description="Weakly supervised stance/issue analysis of political ad archives.",
    )
    parser.add_argument("--version", action="version", version=f"adlens {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load a JSONL ad archive, dedup, write a corpus store")
    p.add_argument("ads", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_ingest)

    lex = sub.add_parser("lexicon", help="issue-lexicon commands")
    lex_sub = lex.add_subparsers(dest="lexicon_command", required=True)
    p = lex_sub.add_parser("build", help="build a PMI lexicon from issue-tagged docs")
    p.add_argument("issues", type=Path)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--table", action="store_true", help="emit per-issue n-gram counts")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_lexicon_build)

    p = sub.add_parser("weaklabel", help="classify entities and weak-label their ads")
    p.add_argument("corpus", type=Path)
    p.add_argument("--cues", type=Path, help="JSON overriding the cue-word lists")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_weaklabel)

    p = sub.add_parser("train", help="train the joint embedding model")
    p.add_argument("corpus", type=Path)
    p.add_argument("lexicon", type=Path)
    p.add_argument("labels", type=Path)
    p.add_argument("wordvecs", type=Path)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--encoder", choices=sorted(_ENCODER_ALIASES), default="mean-pool")
    p.add_argument("--dim", type=int, default=300)
    p.add_argument("--hidden", type=int, default=150)
    p.add_argument("--lr", type=float, default=0.001)
    p.add_argument("--max-epochs", type=int, default=100)
    p.add_argument("--patience", type=int, default=10)
    p.add_argument("--val-fraction", type=float, default=0.1)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("infer", help="predict stances and issues for every ad")
    p.add_argument("model", type=Path)
    p.add_argument("corpus", type=Path)
    p.add_argument("--cosine", action="store_true", help="cosine similarity ablation")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("eval", help="score predictions against a holdout CSV")
    p.add_argument("predictions", type=Path)
    p.add_argument("holdout", type=Path)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("analyze", help="demographic/state/trigram/wordfreq reports")
    p.add_argument("what", choices=["demographics", "state", "trigrams", "wordfreq"])
    p.add_argument("predictions", type=Path)
    p.add_argument("corpus", type=Path)
    p.add_argument("model", type=Path, nargs="?", help="model.bin (trigrams only)")
    p.add_argument("--state")
    p.add_argument("--min-regional-share", type=float, default=0.10)
    p.add_argument("--issue")
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--one-sided", action="store_true")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("granger", help="Granger tests between polls and ad impressions")
    p.add_argument("polls", type=Path)
    p.add_argument("predictions", type=Path)
    p.add_argument("corpus", type=Path)
    p.add_argument("--max-lag", type=int, default=15)
    p.add_argument("--cutoff", default="2020-11-03")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_granger)

    p = sub.add_parser("synth", help="generate a synthetic corpus with gold labels")
    p.add_argument("--spec", type=Path, help="SynthSpec JSON (defaults used when omitted)")
    p.add_argument("--seed", type=int, help="override the spec seed")
    p.add_argument(
        "--out", nargs=3, type=Path, required=True,
        metavar=("ADS_JSONL", "ISSUES_JSONL", "GOLD_CSV"),
    )
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("wordvecs", help="deterministic word vectors for a corpus vocabulary")
    p.add_argument("ads", type=Path)
    p.add_argument("--dim", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_wordvecs)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(json.dumps({"error": str(exc), "exit_code": 3}), file=sys.stderr)
        return 3
    except NumericError as exc:
        print(json.dumps({"error": str(exc), "exit_code": 4}), file=sys.stderr)
        return 4
    except AdlensError as exc:
        print(json.dumps({"error": str(exc), "exit_code": 3}), file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
