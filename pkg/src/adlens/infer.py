"""Similarity inference, entity majority votes, and holdout evaluation.

Prediction is an argmax of raw dot products against the 4 stance and 13
issue node embeddings (cosine available as an ablation). "non-stance" and
"non-issue" exist only in holdout data; they are never predicted, and
rows carrying them are dropped from the corresponding metric.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from adlens.corpus import AdCorpus, FundingEntity
from adlens.errors import DataError, UndefinedStatisticError
from adlens.labels import CONSERVATIVE_STANCES, ISSUES, LIBERAL_STANCES, STANCES
from adlens.textproc import tokenize

NON_STANCE = "non-stance"
NON_ISSUE = "non-issue"


@dataclass(frozen=True)
class Prediction:
    ad_id: str
    stance: str
    stance_score: float
    issue: str
    issue_score: float


def _argmax_similarity(
    embedding: np.ndarray, table: np.ndarray, labels: tuple[str, ...], cosine: bool
) -> tuple[str, float]:
    scores = table @ embedding
    if cosine:
        norms = np.linalg.norm(table, axis=1) * np.linalg.norm(embedding)
        scores = np.divide(scores, norms, out=np.zeros_like(scores), where=norms > 0)
    best = int(np.argmax(scores))  # first max wins: label order is the tie-break
    return labels[best], float(scores[best])


def predict_stance(ad_embedding: np.ndarray, model, cosine: bool = False) -> tuple[str, float]:
    return _argmax_similarity(ad_embedding, model.node_tables["stance"], STANCES, cosine)


def predict_issue(ad_embedding: np.ndarray, model, cosine: bool = False) -> tuple[str, float]:
    return _argmax_similarity(ad_embedding, model.node_tables["issue"], ISSUES, cosine)


def predict_corpus(model, corpus: AdCorpus, cosine: bool = False) -> dict[str, Prediction]:
    """Predictions for every ad id; duplicate texts are encoded once."""
    by_text: dict[str, np.ndarray] = {}
    out: dict[str, Prediction] = {}
    for ad in corpus.ads:
        key = ad.normalized_text
        emb = by_text.get(key)
        if emb is None:
            emb = model.encode_tokens(tokenize(ad.text))
            by_text[key] = emb
        stance, s_score = predict_stance(emb, model, cosine)
        issue, i_score = predict_issue(emb, model, cosine)
        out[ad.id] = Prediction(ad.id, stance, s_score, issue, i_score)
    return out


def entity_view(
    entity: FundingEntity, predictions: dict[str, Prediction]
) -> tuple[str, float]:
    """Majority vote over the entity's ads: 'liberal' or 'conservative'.

    pro-biden/anti-trump ads vote liberal, pro-trump/anti-biden vote
    conservative; ties go to liberal. Returns (view, support fraction).
    """
    votes = {"liberal": 0, "conservative": 0}
    for ad_id in entity.ad_ids:
        pred = predictions.get(ad_id)
        if pred is None:
            continue
        if pred.stance in LIBERAL_STANCES:
            votes["liberal"] += 1
        elif pred.stance in CONSERVATIVE_STANCES:
            votes["conservative"] += 1
    total = votes["liberal"] + votes["conservative"]
    if total == 0:
        raise DataError(f"entity {entity.name!r} has no predicted ads")
    view = "liberal" if votes["liberal"] >= votes["conservative"] else "conservative"
    return view, votes[view] / total


@dataclass(frozen=True)
class HoldoutRow:
    ad_id: str
    stance: str  # one of STANCES or "non-stance"
    issue: str  # one of ISSUES or "non-issue"


HoldoutSet = list[HoldoutRow]


def load_holdout(path: str | Path) -> HoldoutSet:
    """Read an (ad_id, stance, issue) CSV with a header row."""
    rows: HoldoutSet = []
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            for lineno, raw in enumerate(csv.DictReader(fh), start=2):
                stance = raw["stance"].strip()
                issue = raw["issue"].strip()
                if stance not in STANCES and stance != NON_STANCE:
                    raise DataError(f"{path}:{lineno}: unknown stance {stance!r}")
                if issue not in ISSUES and issue != NON_ISSUE:
                    raise DataError(f"{path}:{lineno}: unknown issue {issue!r}")
                rows.append(HoldoutRow(raw["ad_id"].strip(), stance, issue))
    except OSError as exc:
        raise DataError(f"cannot read holdout from {path}: {exc}") from exc
    except KeyError as exc:
        raise DataError(f"{path}: missing column {exc}") from exc
    return rows


def save_predictions(predictions: dict[str, Prediction], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ad_id", "stance", "stance_score", "issue", "issue_score"])
        for ad_id in sorted(predictions):
            p = predictions[ad_id]
            writer.writerow([p.ad_id, p.stance, repr(p.stance_score), p.issue, repr(p.issue_score)])


def load_predictions(path: str | Path) -> dict[str, Prediction]:
    out: dict[str, Prediction] = {}
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            for raw in csv.DictReader(fh):
                out[raw["ad_id"]] = Prediction(
                    ad_id=raw["ad_id"],
                    stance=raw["stance"],
                    stance_score=float(raw["stance_score"]),
                    issue=raw["issue"],
                    issue_score=float(raw["issue_score"]),
                )
    except OSError as exc:
        raise DataError(f"cannot read predictions from {path}: {exc}") from exc
    except (KeyError, ValueError) as exc:
        raise DataError(f"{path}: bad predictions row: {exc}") from exc
    return out


def _accuracy_and_macro_f1(gold: list[str], pred: list[str]) -> tuple[float, float]:
    correct = sum(1 for g, p in zip(gold, pred) if g == p)
    accuracy = correct / len(gold)
    classes = sorted(set(gold))  # average over classes present in gold
    f1_sum = 0.0
    for cls in classes:
        tp = sum(1 for g, p in zip(gold, pred) if g == cls and p == cls)
        fp = sum(1 for g, p in zip(gold, pred) if g != cls and p == cls)
        fn = sum(1 for g, p in zip(gold, pred) if g == cls and p != cls)
        denom = 2 * tp + fp + fn
        f1_sum += (2 * tp / denom) if denom else 0.0
    return accuracy, f1_sum / len(classes)


def evaluate(predictions: dict[str, Prediction], holdout: HoldoutSet) -> dict:
    """Accuracy and macro-F1 for stances and issues against holdout labels.

    non-stance rows leave the stance metric, non-issue rows the issue
    metric; every remaining holdout id must have a prediction.
    """
    stance_gold, stance_pred = [], []
    issue_gold, issue_pred = [], []
    for row in holdout:
        pred = predictions.get(row.ad_id)
        if pred is None:
            raise DataError(f"no prediction for holdout ad {row.ad_id!r}")
        if row.stance != NON_STANCE:
            stance_gold.append(row.stance)
            stance_pred.append(pred.stance)
        if row.issue != NON_ISSUE:
            issue_gold.append(row.issue)
            issue_pred.append(pred.issue)
    out: dict = {}
    for name, gold, pred in (
        ("stance", stance_gold, stance_pred),
        ("issue", issue_gold, issue_pred),
    ):
        if not gold:
            raise UndefinedStatisticError(
                f"holdout has no usable rows for the {name} metric"
            )
        accuracy, macro_f1 = _accuracy_and_macro_f1(gold, pred)
        out[name] = {"accuracy": accuracy, "macro_f1": macro_f1, "n": len(gold)}
    return out
