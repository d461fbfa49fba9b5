"""Report builders tying predictions, corpus data, and the stats module together.

These produce the JSON-ready payloads behind the `analyze` and `granger`
CLI subcommands: contingency tables with chi-square results, impression
t-tests, trigram frequency/correlation matrices, token frequency tables,
and the two-directional Granger runs against poll series.
"""

from __future__ import annotations

import csv
import datetime as dt
from collections import Counter, defaultdict
from pathlib import Path

import numpy as np

from adlens.corpus import (
    AGE_BUCKETS,
    GENDERS,
    AdCorpus,
    AdRecord,
    REGIONAL_SHARE_THRESHOLD,
    daily_impression_series,
    dedup_by_content,
    range_mean,
    regional_share,
)
from adlens.errors import DataError, UndefinedStatisticError
from adlens.infer import Prediction
from adlens.labels import ISSUES, STANCES, stance_side
from adlens.stats import (
    ContingencyTable,
    TimeSeries,
    chi_square_test,
    granger_test,
    t_test,
    trigram_stance_correlation,
)
from adlens.stats.timeseries import align
from adlens.textproc import STOPWORDS, tokenize, top_k_ngrams

# Table-5-style hypotheses: (stance, age buckets, which gender should lead).
_TTEST_HYPOTHESES = (
    ("pro-biden", AGE_BUCKETS, "female"),
    ("anti-trump", AGE_BUCKETS, "female"),
    ("pro-trump", ("18-24", "25-34", "35-44", "45-54"), "male"),
    ("anti-biden", ("18-24", "25-34", "35-44", "45-54"), "male"),
    ("pro-trump", ("55-64", "65+"), "female"),
    ("anti-biden", ("55-64", "65+"), "female"),
)


def _prune_table(counts: np.ndarray, rows: list[str], cols: list[str]):
    """Drop all-zero rows/columns (e.g. the silent 13-17 bucket)."""
    keep_r = [i for i in range(counts.shape[0]) if counts[i].sum() > 0]
    keep_c = [j for j in range(counts.shape[1]) if counts[:, j].sum() > 0]
    pruned = counts[np.ix_(keep_r, keep_c)]
    return pruned, [rows[i] for i in keep_r], [cols[j] for j in keep_c]


def _tested_table(counts: np.ndarray, rows: list[str], cols: list[str]) -> dict:
    pruned, kept_rows, kept_cols = _prune_table(counts, rows, cols)
    entry: dict = {
        "table": {"rows": kept_rows, "cols": kept_cols, "counts": pruned.tolist()},
        "dropped_rows": sorted(set(rows) - set(kept_rows)),
        "dropped_cols": sorted(set(cols) - set(kept_cols)),
    }
    try:
        table = ContingencyTable(pruned, kept_rows, kept_cols)
        entry["chi_square"] = chi_square_test(table).as_dict()
    except (ValueError, UndefinedStatisticError) as exc:
        entry["chi_square"] = {"error": str(exc)}
    return entry


def _grouped_by_stance(
    predictions: dict[str, Prediction], corpus: AdCorpus
) -> dict[str, list[AdRecord]]:
    groups: dict[str, list[AdRecord]] = {s: [] for s in STANCES}
    for ad in corpus.ads:
        pred = predictions.get(ad.id)
        if pred is not None:
            groups[pred.stance].append(ad)
    return groups


def demographics_report(
    predictions: dict[str, Prediction],
    corpus: AdCorpus,
    one_sided: bool = False,
) -> dict:
    """Stance-by-demographic tables, chi-square tests, and impression t-tests.

    Targeting tables weight each ad by its audience shares; impression
    tables weight by share x mean impressions. AdRecord keeps marginal
    gender/age distributions, so age-restricted gender comparisons use the
    product of the two shares as the joint-cell approximation.
    """
    groups = _grouped_by_stance(predictions, corpus)
    stances = list(STANCES)

    def fill(table: np.ndarray, cols: tuple[str, ...], attr: str, weighted: bool) -> None:
        for i, stance in enumerate(stances):
            for ad in groups[stance]:
                w = range_mean(ad.impressions) if weighted else 1.0
                dist = getattr(ad, attr)
                for j, col in enumerate(cols):
                    table[i, j] += w * dist.get(col, 0.0)

    report: dict = {"n_predicted_ads": sum(len(g) for g in groups.values())}
    for name, cols, attr, weighted in (
        ("targeting_by_gender", GENDERS, "gender_dist", False),
        ("targeting_by_age", AGE_BUCKETS, "age_dist", False),
        ("impressions_by_gender", GENDERS, "gender_dist", True),
        ("impressions_by_age", AGE_BUCKETS, "age_dist", True),
    ):
        counts = np.zeros((len(stances), len(cols)))
        fill(counts, cols, attr, weighted)
        report[name] = _tested_table(counts, stances, list(cols))

    tests = []
    for stance, ages, lead_gender in _TTEST_HYPOTHESES:
        other = "male" if lead_gender == "female" else "female"
        lead_sample, other_sample = [], []
        for ad in groups[stance]:
            age_mass = sum(ad.age_dist.get(a, 0.0) for a in ages)
            imp = range_mean(ad.impressions)
            lead_sample.append(imp * ad.gender_dist.get(lead_gender, 0.0) * age_mass)
            other_sample.append(imp * ad.gender_dist.get(other, 0.0) * age_mass)
        entry = {
            "stance": stance,
            "ages": list(ages),
            "alternative": f"more {lead_gender} than {other} impressions",
            "n_ads": len(lead_sample),
        }
        try:
            result = t_test(
                lead_sample, other_sample, "greater" if one_sided else "two-sided"
            )
            entry["t_test"] = result.as_dict()
        except (UndefinedStatisticError, ValueError) as exc:
            entry["t_test"] = {"error": str(exc)}
        tests.append(entry)
    report["impression_t_tests"] = tests
    report["one_sided"] = one_sided
    return report


def state_report(
    predictions: dict[str, Prediction],
    corpus: AdCorpus,
    state: str,
    min_share: float = REGIONAL_SHARE_THRESHOLD,
) -> dict:
    """Issue/stance and demographic tables for ads focused on one state.

    Keeps ads with regional share strictly above `min_share`.
    """
    focused = AdCorpus(
        [ad for ad in corpus.ads if regional_share(ad, state) > min_share]
    )
    groups = _grouped_by_stance(predictions, focused)
    stances = list(STANCES)

    issue_counts = np.zeros((len(ISSUES), len(stances)))
    for j, stance in enumerate(stances):
        for ad in groups[stance]:
            issue_counts[ISSUES.index(predictions[ad.id].issue), j] += 1

    gender_counts = np.zeros((len(stances), len(GENDERS)))
    age_counts = np.zeros((len(stances), len(AGE_BUCKETS)))
    for i, stance in enumerate(stances):
        for ad in groups[stance]:
            for j, g in enumerate(GENDERS):
                gender_counts[i, j] += ad.gender_dist.get(g, 0.0)
            for j, a in enumerate(AGE_BUCKETS):
                age_counts[i, j] += ad.age_dist.get(a, 0.0)

    return {
        "state": state,
        "min_regional_share": min_share,
        "n_ads": len(focused),
        "issue_by_stance": _tested_table(issue_counts, list(ISSUES), stances),
        "targeting_by_gender": _tested_table(gender_counts, stances, list(GENDERS)),
        "targeting_by_age": _tested_table(age_counts, stances, list(AGE_BUCKETS)),
    }


def trigram_report(
    predictions: dict[str, Prediction],
    corpus: AdCorpus,
    model,
    issue: str | None = None,
    top: int = 10,
) -> dict:
    """Per-stance most frequent trigrams and their stance-correlation matrix.

    Counts run over distinct ad texts (dedup first) so a heavily targeted
    placement does not dominate the ranking. `issue` restricts to ads with
    that predicted issue.
    """
    deduped, _ = dedup_by_content(corpus)
    token_groups: dict[str, list[list[str]]] = {s: [] for s in STANCES}
    for ad in deduped.ads:
        pred = predictions.get(ad.id)
        if pred is None:
            continue
        if issue is not None and pred.issue != issue:
            continue
        token_groups[pred.stance].append(tokenize(ad.text))

    report: dict = {"issue": issue, "top": top, "stances": {}}
    populated = {s: seqs for s, seqs in token_groups.items() if seqs}
    for stance in STANCES:
        seqs = token_groups[stance]
        if not seqs:
            report["stances"][stance] = {"n_ads": 0, "trigrams": [], "correlation": None}
            continue
        ranked = top_k_ngrams(seqs, 3, top)
        grams = [g for g, _ in ranked]
        correlation = (
            trigram_stance_correlation(grams, populated, model) if grams else None
        )
        report["stances"][stance] = {
            "n_ads": len(seqs),
            "trigrams": [{"trigram": g, "count": c} for g, c in ranked],
            "correlation": correlation,
        }
    return report


def wordfreq_report(
    predictions: dict[str, Prediction], corpus: AdCorpus, top: int = 100
) -> dict:
    """Wordcloud-replacement data: per-stance {token: count}, stopwords removed."""
    deduped, _ = dedup_by_content(corpus)
    counts: dict[str, Counter] = {s: Counter() for s in STANCES}
    for ad in deduped.ads:
        pred = predictions.get(ad.id)
        if pred is None:
            continue
        counts[pred.stance].update(
            tok for tok in tokenize(ad.text) if tok not in STOPWORDS
        )
    return {
        stance: dict(
            sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))[:top]
        )
        for stance, counter in counts.items()
    }


def load_polls(path: str | Path) -> dict[str, TimeSeries]:
    """Read a (date, candidate, poll_average) CSV into daily poll series.

    Returns one series per candidate plus their sum under "all". Missing
    days inside a candidate's span are forward-filled (polls are sticky
    between releases); multiple rows for one day are summed.
    """
    per_candidate: dict[str, dict[dt.date, float]] = defaultdict(dict)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            for lineno, row in enumerate(csv.DictReader(fh), start=2):
                day = dt.date.fromisoformat(row["date"].strip())
                cand = row["candidate"].strip().lower()
                value = float(row["poll_average"])
                per_candidate[cand][day] = per_candidate[cand].get(day, 0.0) + value
    except OSError as exc:
        raise DataError(f"cannot read polls from {path}: {exc}") from exc
    except (KeyError, ValueError) as exc:
        raise DataError(f"{path}: bad poll row: {exc}") from exc
    if not per_candidate:
        raise DataError(f"{path}: no poll rows")

    series: dict[str, TimeSeries] = {}
    for cand, by_day in per_candidate.items():
        days = sorted(by_day)
        dates = []
        values = []
        cur = days[0]
        last = by_day[cur]
        while cur <= days[-1]:
            last = by_day.get(cur, last)
            dates.append(cur)
            values.append(last)
            cur += dt.timedelta(days=1)
        series[cand] = TimeSeries(dates=dates, values=values)
    if len(series) > 1:
        aligned = list(series.values())
        start = max(s.dates[0] for s in aligned)
        stop = min(s.dates[-1] for s in aligned)
        if start <= stop:
            total = None
            for s in aligned:
                i = (start - s.dates[0]).days
                j = (stop - s.dates[0]).days + 1
                chunk = s.values[i:j]
                total = chunk if total is None else total + chunk
            n = (stop - start).days + 1
            series["all"] = TimeSeries(
                dates=[start + dt.timedelta(days=k) for k in range(n)], values=total
            )
    return series


def granger_report(
    polls: dict[str, TimeSeries],
    predictions: dict[str, Prediction],
    corpus: AdCorpus,
    max_lag: int = 15,
    cutoff: dt.date = dt.date(2020, 11, 3),
) -> dict:
    """Both Granger directions for every (poll series, ad side) pair."""

    def side_of(ad: AdRecord) -> str | None:
        pred = predictions.get(ad.id)
        return None if pred is None else stance_side(pred.stance)

    ad_series = daily_impression_series(corpus, side_of, cutoff)
    runs = []
    for poll_name in sorted(polls):
        for side in sorted(ad_series):
            p_aligned, a_aligned = align(polls[poll_name], ad_series[side])
            for direction, x, y in (
                ("polls_to_ads", p_aligned, a_aligned),
                ("ads_to_polls", a_aligned, p_aligned),
            ):
                runs.append(
                    {
                        "polls": poll_name,
                        "side": side,
                        "direction": direction,
                        "n_days": len(x),
                        "lags": [r.as_dict() for r in granger_test(x, y, max_lag)],
                    }
                )
    return {
        "cutoff": cutoff.isoformat(),
        "max_lag": max_lag,
        "ad_series": {side: ts.as_dict() for side, ts in ad_series.items()},
        "tests": runs,
    }
