"""Ad-archive data model: ingestion, dedup, range averaging, daily series.

Input is JSONL in the ad-library API shape (one object per line). Joint
demographic cells are marginalized into gender and age distributions at
load time; per-placement impression data survives dedup untouched so the
audience analyses can use every placement.
"""

from __future__ import annotations

import datetime as dt
import json
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from adlens.errors import DataError, EmptySeriesError, InvalidRangeError
from adlens.stats.timeseries import TimeSeries

GENDERS = ("male", "female", "unknown")
AGE_BUCKETS = ("13-17", "18-24", "25-34", "35-44", "45-54", "55-64", "65+")

_DIST_SLACK = 1e-6


@dataclass(frozen=True)
class AdRecord:
    id: str
    text: str
    funding_entity: str
    created: dt.date
    delivery_start: dt.date
    delivery_stop: dt.date | None
    spend: tuple[int, int]
    impressions: tuple[int, int]
    gender_dist: dict[str, float] = field(default_factory=dict)
    age_dist: dict[str, float] = field(default_factory=dict)
    region_dist: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for name, rng in (("spend", self.spend), ("impressions", self.impressions)):
            if rng[0] > rng[1]:
                raise InvalidRangeError(f"{name} range {rng} has lower > upper")
        for name, dist in (
            ("gender_dist", self.gender_dist),
            ("age_dist", self.age_dist),
            ("region_dist", self.region_dist),
        ):
            total = 0.0
            for key, frac in dist.items():
                if not 0.0 <= frac <= 1.0:
                    raise DataError(f"{name}[{key!r}] = {frac} outside [0, 1]")
                total += frac
            if total > 1.0 + _DIST_SLACK:
                raise DataError(f"{name} sums to {total} > 1")

    @property
    def normalized_text(self) -> str:
        return " ".join(self.text.lower().split())

    def active_days(self) -> Iterable[dt.date]:
        """Calendar days the campaign ran; a missing stop means a single day."""
        stop = self.delivery_stop or self.delivery_start
        day = self.delivery_start
        while day <= stop:
            yield day
            day += dt.timedelta(days=1)


@dataclass(frozen=True)
class LoadSummary:
    n_lines: int
    n_loaded: int
    n_skipped: int
    skipped: tuple[tuple[int, str], ...] = ()

    def as_dict(self) -> dict:
        return {
            "n_lines": self.n_lines,
            "n_loaded": self.n_loaded,
            "n_skipped": self.n_skipped,
            "skipped": [list(item) for item in self.skipped],
        }


@dataclass
class FundingEntity:
    name: str
    ad_ids: list[str]
    explicit_stance: object | None = None  # filled by weaklabel


class AdCorpus:
    """Ordered ad collection with a normalized-text index and unique ids."""

    def __init__(self, ads: Iterable[AdRecord], summary: LoadSummary | None = None):
        self.ads: list[AdRecord] = list(ads)
        self.summary = summary or LoadSummary(len(self.ads), len(self.ads), 0)
        self.by_id: dict[str, AdRecord] = {}
        self.content_index: dict[str, list[str]] = defaultdict(list)
        for ad in self.ads:
            if ad.id in self.by_id:
                raise DataError(f"duplicate ad id {ad.id!r}")
            self.by_id[ad.id] = ad
            self.content_index[ad.normalized_text].append(ad.id)
        self.content_index = dict(self.content_index)

    def __len__(self) -> int:
        return len(self.ads)

    def __iter__(self):
        return iter(self.ads)

    def entities(self) -> dict[str, FundingEntity]:
        grouped: dict[str, FundingEntity] = {}
        for ad in self.ads:
            entity = grouped.get(ad.funding_entity)
            if entity is None:
                grouped[ad.funding_entity] = FundingEntity(ad.funding_entity, [ad.id])
            else:
                entity.ad_ids.append(ad.id)
        return grouped


def _parse_date(value) -> dt.date:
    # API timestamps may carry a time/zone suffix; the calendar date prefix
    # is all this toolkit uses.
    if not isinstance(value, str) or len(value) < 10:
        raise ValueError(f"not an ISO date: {value!r}")
    return dt.date.fromisoformat(value[:10])


def _parse_range(obj) -> tuple[int, int]:
    if obj is None:
        return (0, 0)
    lower = int(obj["lower_bound"])
    upper = int(obj.get("upper_bound", lower))
    return (lower, upper)


def _parse_record(raw: dict) -> AdRecord:
    ad_id = str(raw["id"])
    body = raw.get("ad_creative_body", "")
    title = raw.get("ad_creative_link_title")
    if not body and not title:
        raise ValueError("ad has no text")
    text = f"{title} {body}".strip() if title else body
    start = _parse_date(raw["ad_delivery_start_time"])
    stop_raw = raw.get("ad_delivery_stop_time")
    stop = _parse_date(stop_raw) if stop_raw else None
    created_raw = raw.get("ad_creation_time")
    created = _parse_date(created_raw) if created_raw else start

    gender_dist: dict[str, float] = defaultdict(float)
    age_dist: dict[str, float] = defaultdict(float)
    for cell in raw.get("demographic_distribution") or []:
        frac = float(cell["percentage"])
        gender_dist[str(cell["gender"])] += frac
        age_dist[str(cell["age"])] += frac
    region_dist = {
        str(cell["region"]): float(cell["percentage"])
        for cell in raw.get("region_distribution") or []
    }
    return AdRecord(
        id=ad_id,
        text=text,
        funding_entity=str(raw["funding_entity"]),
        created=created,
        delivery_start=start,
        delivery_stop=stop,
        spend=_parse_range(raw.get("spend")),
        impressions=_parse_range(raw.get("impressions")),
        gender_dist=dict(gender_dist),
        age_dist=dict(age_dist),
        region_dist=region_dist,
    )


def load_ads(path: str | Path) -> AdCorpus:
    """Read a JSONL ad archive; malformed lines are skipped and counted."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    ads: list[AdRecord] = []
    seen_ids: set[str] = set()
    skipped: list[tuple[int, str]] = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = _parse_record(json.loads(line))
            if record.id in seen_ids:
                raise ValueError(f"duplicate ad id {record.id!r}")
        except (ValueError, KeyError, TypeError, DataError) as exc:
            skipped.append((lineno, str(exc)))
            continue
        seen_ids.add(record.id)
        ads.append(record)
    summary = LoadSummary(
        n_lines=len(lines),
        n_loaded=len(ads),
        n_skipped=len(skipped),
        skipped=tuple(skipped),
    )
    return AdCorpus(ads, summary)


DedupMap = dict[str, list[str]]


def dedup_by_content(corpus: AdCorpus) -> tuple[AdCorpus, DedupMap]:
    """One representative per distinct normalized text.

    The representative is the lexicographically smallest id of its group and
    keeps its own (not merged) impression data; the map lists every id that
    shares the text, so callers can still reach each placement's record.
    """
    groups: dict[str, list[str]] = {}
    order: list[str] = []
    for ad in corpus.ads:
        key = ad.normalized_text
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(ad.id)
    dedup_map: DedupMap = {}
    representatives: list[AdRecord] = []
    for key in order:
        ids = sorted(groups[key])
        rep = ids[0]
        dedup_map[rep] = ids
        representatives.append(corpus.by_id[rep])
    return AdCorpus(representatives), dedup_map


def range_mean(rng: tuple[int, int]) -> float:
    """Midpoint of a closed integer range; exact in double precision."""
    lower, upper = rng
    if lower > upper:
        raise InvalidRangeError(f"range {rng} has lower > upper")
    return (lower + upper) / 2


def regional_share(ad: AdRecord, region: str) -> float:
    """Fraction of the ad's impressions in `region`; 0.0 when absent."""
    return ad.region_dist.get(region, 0.0)


REGIONAL_SHARE_THRESHOLD = 0.10


def record_to_json(ad: AdRecord) -> dict:
    """AdRecord back to the API-shaped JSON object (joint cells via product)."""
    obj: dict = {
        "id": ad.id,
        "ad_creative_body": ad.text,
        "funding_entity": ad.funding_entity,
        "ad_creation_time": ad.created.isoformat(),
        "ad_delivery_start_time": ad.delivery_start.isoformat(),
        "spend": {"lower_bound": ad.spend[0], "upper_bound": ad.spend[1]},
        "impressions": {
            "lower_bound": ad.impressions[0],
            "upper_bound": ad.impressions[1],
        },
    }
    if ad.delivery_stop is not None:
        obj["ad_delivery_stop_time"] = ad.delivery_stop.isoformat()
    if ad.gender_dist and ad.age_dist:
        obj["demographic_distribution"] = [
            {"percentage": g_frac * a_frac, "gender": g, "age": a}
            for g, g_frac in sorted(ad.gender_dist.items())
            for a, a_frac in sorted(ad.age_dist.items())
        ]
    elif ad.gender_dist or ad.age_dist:
        # One marginal only: emit cells against an "unknown" counterpart.
        obj["demographic_distribution"] = [
            {"percentage": frac, "gender": g, "age": "unknown"}
            for g, frac in sorted(ad.gender_dist.items())
        ] + [
            {"percentage": frac, "gender": "unknown", "age": a}
            for a, frac in sorted(ad.age_dist.items())
        ]
    if ad.region_dist:
        obj["region_distribution"] = [
            {"percentage": frac, "region": region}
            for region, frac in sorted(ad.region_dist.items())
        ]
    return obj


def save_corpus_store(
    path: str | Path,
    corpus: AdCorpus,
    dedup_map: DedupMap,
) -> None:
    """Write the ingest artifact: full records + dedup map + load summary."""
    payload = {
        "records": [record_to_json(ad) for ad in corpus.ads],
        "dedup": dedup_map,
        "summary": corpus.summary.as_dict(),
    }
    Path(path).write_text(json.dumps(payload), encoding="utf-8")


def load_corpus_store(path: str | Path) -> tuple[AdCorpus, DedupMap]:
    """Read an ingest artifact, or fall back to raw JSONL (dedup on the fly)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read corpus from {path}: {exc}") from exc
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            payload = json.loads(text)
        except ValueError:
            payload = None
        if isinstance(payload, dict) and "records" in payload:
            try:
                ads = [_parse_record(raw) for raw in payload["records"]]
                dedup = {str(k): [str(i) for i in v] for k, v in payload["dedup"].items()}
                summary_raw = payload.get("summary") or {}
                summary = LoadSummary(
                    n_lines=int(summary_raw.get("n_lines", len(ads))),
                    n_loaded=int(summary_raw.get("n_loaded", len(ads))),
                    n_skipped=int(summary_raw.get("n_skipped", 0)),
                    skipped=tuple(
                        (int(line), str(msg))
                        for line, msg in summary_raw.get("skipped", [])
                    ),
                )
                return AdCorpus(ads, summary), dedup
            except (KeyError, TypeError, ValueError, DataError) as exc:
                raise DataError(f"{path}: bad corpus store: {exc}") from exc
    corpus = load_ads(path)
    _, dedup = dedup_by_content(corpus)
    return corpus, dedup


def representatives(corpus: AdCorpus, dedup_map: DedupMap) -> AdCorpus:
    """Deduped view of a full corpus given its dedup map."""
    return AdCorpus([corpus.by_id[rep] for rep in dedup_map])


def daily_impression_series(
    corpus: AdCorpus,
    side_of: Callable[[AdRecord], str | None],
    cutoff: dt.date,
) -> dict[str, TimeSeries]:
    """Per-side daily impression totals up to `cutoff` (inclusive).

    An ad contributes the mean of its impression range on every day it is
    active; `side_of` returning None drops the ad. Both sides share one
    date axis (earliest delivery start through cutoff), zero-filled.
    """
    sided: dict[str, list[AdRecord]] = defaultdict(list)
    earliest: dt.date | None = None
    for ad in corpus.ads:
        side = side_of(ad)
        if side is None:
            continue
        if ad.delivery_start > cutoff:
            continue
        sided[side].append(ad)
        if earliest is None or ad.delivery_start < earliest:
            earliest = ad.delivery_start
    if earliest is None:
        raise EmptySeriesError("no ads with a side fall on or before the cutoff")
    n_days = (cutoff - earliest).days + 1
    dates = [earliest + dt.timedelta(days=i) for i in range(n_days)]
    out: dict[str, TimeSeries] = {}
    for side, ads in sided.items():
        values = [0.0] * n_days
        for ad in ads:
            mean = range_mean(ad.impressions)
            for day in ad.active_days():
                if day > cutoff:
                    break
                values[(day - earliest).days] += mean
        out[side] = TimeSeries(dates=list(dates), values=values)
    return out
