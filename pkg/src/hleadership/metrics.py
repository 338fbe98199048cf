"""Citation indices over one researcher's publications, plus the cohort c-score."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Iterable, Sequence

from .corpus import Corpus, Publication, ResearcherProfile, author_position
from .errors import (
    ComponentExceedsCohortMax,
    EmptyPublicationList,
    InvalidAuthorCount,
    NegativeDrop,
)
from .weights import DEFAULT_PARAMS, WeightParams, leadership_weight


@dataclass(frozen=True)
class CScoreComponents:
    total_citations: float = 0
    h_index: float = 0
    hm_index: float = 0
    cites_single: float = 0
    cites_single_or_first: float = 0
    cites_single_first_or_last: float = 0

    def values(self) -> tuple[float, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))

    @classmethod
    def elementwise_max(cls, items: Iterable["CScoreComponents"]) -> "CScoreComponents":
        best = [0.0] * 6
        for item in items:
            best = [max(a, b) for a, b in zip(best, item.values())]
        return cls(*best)


@dataclass(frozen=True)
class AuthorshipBreakdown:
    n_single: int = 0
    n_first_nonsingle: int = 0
    n_last_nonsingle: int = 0
    n_middle: int = 0

    @property
    def total(self) -> int:
        return self.n_single + self.n_first_nonsingle + self.n_last_nonsingle + self.n_middle

    @property
    def pct_first_single_last(self) -> float:
        if self.total == 0:
            return 0.0
        return 100.0 * (self.n_single + self.n_first_nonsingle + self.n_last_nonsingle) / self.total


@dataclass(frozen=True)
class MetricsRow:
    university: str
    researcher_name: str
    author_id: str
    publications: int
    total_citations: int
    median_citations: float
    median_coauthors: float
    h_index: int
    g_index: int
    i10_index: int
    hm_index: int
    hfrac_index: int
    hl_index: int
    c_score: float
    pct_first_single_last: float
    pct_drop_h_to_hl: float


def _check_counts(pairs: Sequence[tuple[int, int]]) -> None:
    for _, a in pairs:
        if a < 1:
            raise InvalidAuthorCount(f"author count {a} < 1")


def h_index(citations: Iterable[float]) -> int:
    h = 0
    for rank, c in enumerate(sorted(citations, reverse=True), start=1):
        if c >= rank:
            h = rank
        else:
            break
    return h


def g_index(citations: Iterable[int]) -> int:
    """Largest g (capped at the paper count) whose top-g papers hold >= g**2 citations."""
    g = 0
    running = 0
    for rank, c in enumerate(sorted(citations, reverse=True), start=1):
        running += c
        if running >= rank * rank:
            g = rank
    return g


def i10_index(citations: Iterable[int]) -> int:
    return sum(1 for c in citations if c >= 10)


def hm_index(pubs: Sequence[tuple[int, int]]) -> int:
    """Largest rank r with sum_{r' <= r} 1/a(r') <= c(r).

    ``pubs`` holds ``(citations, author_count)`` pairs. Papers are ranked by
    citations, descending; among equal citation counts the paper with more
    authors (smaller fractional credit) goes first, which makes the result
    independent of input order. Credits are summed exactly.
    """
    _check_counts(pubs)
    ranked = sorted(pubs, key=lambda p: (-p[0], -p[1]))
    hm = 0
    credit = Fraction(0)
    for rank, (c, a) in enumerate(ranked, start=1):
        credit += Fraction(1, a)
        if credit <= c:
            hm = rank
    return hm


def hfrac_index(pubs: Sequence[tuple[int, int]]) -> int:
    """h-index over per-paper fractional citations c / a."""
    _check_counts(pubs)
    return h_index(c / a for c, a in pubs)


def weighted_citations(
    researcher_id: str, pubs: Iterable[Publication], params: WeightParams = DEFAULT_PARAMS
) -> tuple[list[float], list[str]]:
    """Position-weighted citation counts, in input order.

    Returns ``(weighted, skipped)`` where ``skipped`` lists the ids of
    publications whose (possibly clipped) author list does not contain the
    researcher. The weight uses the declared author count, not the listed one.
    """
    weighted = []
    skipped = []
    for pub in pubs:
        pos = author_position(pub, researcher_id)
        if pos is None:
            skipped.append(pub.pub_id)
            continue
        weighted.append(pub.citations * leadership_weight(pos, pub.n_authors_declared, params))
    return weighted, skipped


def h_leadership_index(researcher_id: str, pubs: Iterable[Publication], params: WeightParams = DEFAULT_PARAMS) -> int:
    weighted, _ = weighted_citations(researcher_id, pubs, params)
    weighted.sort(reverse=True)
    hl = 0
    for i, value in enumerate(weighted, start=1):
        if value >= i:
            hl = i
        else:
            break
    return hl


def _role(pub: Publication, researcher_id: str) -> str | None:
    pos = author_position(pub, researcher_id)
    if pos is None:
        return None
    if len(pub.authors) == 1 and pub.n_authors_declared == 1:
        return "single"
    if pos == 1:
        return "first"
    # last authorship is only decidable on an unclipped list
    if pos == pub.n_authors_declared:
        return "last"
    return "middle"


def cscore_components(researcher_id: str, pubs: Sequence[Publication]) -> CScoreComponents:
    single = first = last = 0
    for pub in pubs:
        role = _role(pub, researcher_id)
        if role == "single":
            single += pub.citations
        elif role == "first":
            first += pub.citations
        elif role == "last":
            last += pub.citations
    return CScoreComponents(
        total_citations=sum(p.citations for p in pubs),
        h_index=h_index(p.citations for p in pubs),
        hm_index=hm_index([(p.citations, p.n_authors_declared) for p in pubs]),
        cites_single=single,
        cites_single_or_first=single + first,
        cites_single_first_or_last=single + first + last,
    )


def c_score(components: CScoreComponents, cohort_max: CScoreComponents) -> float:
    """Sum of log(1 + C_i) / log(1 + max C_i); a zero denominator contributes 0."""
    total = 0.0
    for name, value, top in zip(
        (f.name for f in fields(CScoreComponents)), components.values(), cohort_max.values()
    ):
        if value > top:
            raise ComponentExceedsCohortMax(f"{name}: {value} > cohort max {top}")
        denom = math.log1p(top)
        if denom > 0:
            total += math.log1p(value) / denom
    return total


def authorship_breakdown(researcher_id: str, pubs: Iterable[Publication]) -> AuthorshipBreakdown:
    counts = {"single": 0, "first": 0, "last": 0, "middle": 0}
    for pub in pubs:
        role = _role(pub, researcher_id)
        if role is not None:
            counts[role] += 1
    return AuthorshipBreakdown(counts["single"], counts["first"], counts["last"], counts["middle"])


def publication_stats(pubs: Sequence[Publication]) -> tuple[float, float]:
    """Median citation count and median declared author count."""
    if not pubs:
        raise EmptyPublicationList("median of an empty publication list")
    return (
        float(statistics.median(p.citations for p in pubs)),
        float(statistics.median(p.n_authors_declared for p in pubs)),
    )


def percent_drop(h: float, hl: float) -> float:
    if hl > h:
        raise NegativeDrop(f"hl ({hl}) exceeds h ({h})")
    if h == 0:
        return 0.0
    return 100.0 * (h - hl) / h


# -- whole-corpus evaluation ----------------------------------------------------


def _row(
    profile: ResearcherProfile, params: WeightParams, components: CScoreComponents, cohort_max: CScoreComponents
) -> MetricsRow:
    pubs = profile.publications
    cites = [p.citations for p in pubs]
    pairs = [(p.citations, p.n_authors_declared) for p in pubs]
    h = int(components.h_index)
    hl = h_leadership_index(profile.author_id, pubs, params)
    med_c, med_a = publication_stats(pubs) if pubs else (0.0, 0.0)
    return MetricsRow(
        university=profile.affiliation,
        researcher_name=profile.name,
        author_id=profile.author_id,
        publications=len(pubs),
        total_citations=sum(cites),
        median_citations=med_c,
        median_coauthors=med_a,
        h_index=h,
        g_index=g_index(cites),
        i10_index=i10_index(cites),
        hm_index=int(components.hm_index),
        hfrac_index=hfrac_index(pairs),
        hl_index=hl,
        c_score=c_score(components, cohort_max),
        pct_first_single_last=authorship_breakdown(profile.author_id, pubs).pct_first_single_last,
        pct_drop_h_to_hl=percent_drop(h, hl),
    )


def compute_metrics(
    corpus: Corpus,
    params: WeightParams = DEFAULT_PARAMS,
    cohort: str = "all",
    only: Iterable[ResearcherProfile] | None = None,
) -> list[MetricsRow]:
    """One row per researcher, universities in corpus order.

    ``cohort`` picks the c-score normalisation: ``"all"`` uses the component
    maxima over the whole corpus, ``"university"`` over each researcher's own
    affiliation. ``only`` restricts which researchers get a row; the cohort is
    unaffected.
    """
    if cohort not in ("all", "university"):
        raise ValueError(f"unknown cohort {cohort!r}")
    comps = {
        (uni, p.author_id): cscore_components(p.author_id, p.publications)
        for uni, profiles in corpus.universities.items()
        for p in profiles
    }
    global_max = CScoreComponents.elementwise_max(comps.values())
    uni_max = {
        uni: CScoreComponents.elementwise_max(comps[(uni, p.author_id)] for p in profiles)
        for uni, profiles in corpus.universities.items()
    }
    wanted = None if only is None else {(p.affiliation, p.author_id) for p in only}
    rows = []
    for uni, profiles in corpus.universities.items():
        for p in profiles:
            key = (uni, p.author_id)
            if wanted is not None and key not in wanted:
                continue
            top = global_max if cohort == "all" else uni_max[uni]
            rows.append(_row(p, params, comps[key], top))
    return rows
