"""Per-university aggregates, sampled researcher tables and plot-data files."""

from __future__ import annotations

import csv
import io
import json
import os
import statistics
from collections import Counter
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Iterable, Sequence, TypeVar

from .corpus import Corpus
from .errors import DisciplineNotFound, EmptyCorpus, IoFailure
from .metrics import MetricsRow, authorship_breakdown, compute_metrics, percent_drop
from .weights import DEFAULT_PARAMS, WeightParams

T = TypeVar("T")

METRICS_COLUMNS = tuple(f.name for f in fields(MetricsRow))
PLOT_KINDS = ("temporal", "subjects", "coauthors", "authorship_positions")

# 64-bit LCG, Knuth's MMIX constants
_LCG_A = 6364136223846793005
_LCG_C = 1442695040888963407
_MASK64 = (1 << 64) - 1


class LcgShuffle:
    """Seeded Fisher-Yates shuffle driven by a 64-bit linear congruential generator.

    ``state <- (A * state + C) mod 2**64``; the draw for a bound ``m`` is
    ``(state >> 32) % m``. Identical on every platform.
    """

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def below(self, bound: int) -> int:
        self.state = (_LCG_A * self.state + _LCG_C) & _MASK64
        return (self.state >> 32) % bound

    def shuffle(self, items: Sequence[T]) -> list[T]:
        out = list(items)
        for i in range(len(out) - 1, 0, -1):
            j = self.below(i + 1)
            out[i], out[j] = out[j], out[i]
        return out

    def sample(self, items: Sequence[T], k: int) -> list[T]:
        return self.shuffle(items)[:k]


@dataclass(frozen=True)
class UniversitySummaryRow:
    university: str
    researchers: int
    publications: int
    total_citations: int
    mean_h: float
    mean_hfrac: float
    mean_hm: float
    mean_hl: float
    mean_of_median_coauthors: float
    pct_drop: float


@dataclass(frozen=True)
class YearCount:
    year: int
    university: str
    publications: int


def university_summary(
    corpus: Corpus, params: WeightParams = DEFAULT_PARAMS, rows: Sequence[MetricsRow] | None = None
) -> list[UniversitySummaryRow]:
    """One aggregate row per university.

    Means are kept unrounded so ``pct_drop`` always equals
    ``percent_drop(mean_h, mean_hl)``; rounding happens on emission.
    """
    if len(corpus) == 0:
        raise EmptyCorpus("no researchers in corpus")
    if rows is None:
        rows = compute_metrics(corpus, params)
    out = []
    for uni in corpus.universities:
        group = [r for r in rows if r.university == uni]
        if not group:
            continue
        mean = lambda attr: statistics.fmean(getattr(r, attr) for r in group)  # noqa: E731
        mean_h, mean_hl = mean("h_index"), mean("hl_index")
        out.append(
            UniversitySummaryRow(
                university=uni,
                researchers=len(group),
                publications=sum(r.publications for r in group),
                total_citations=sum(r.total_citations for r in group),
                mean_h=mean_h,
                mean_hfrac=mean("hfrac_index"),
                mean_hm=mean("hm_index"),
                mean_hl=mean_hl,
                mean_of_median_coauthors=mean("median_coauthors"),
                pct_drop=percent_drop(mean_h, mean_hl),
            )
        )
    return out


def researcher_table(
    corpus: Corpus,
    discipline: str,
    sample_n: int,
    seed: int,
    params: WeightParams = DEFAULT_PARAMS,
    cohort: str = "all",
) -> list[MetricsRow]:
    """Up to ``sample_n`` researchers per university whose subject areas include ``discipline``.

    Universities are visited in corpus order and share one sampler stream.
    """
    if sample_n < 1:
        raise ValueError("sample_n must be >= 1")
    wanted = discipline.casefold()
    sampler = LcgShuffle(seed)
    chosen = []
    for profiles in corpus.universities.values():
        pool = [p for p in profiles if wanted in {s.casefold() for s in p.subject_areas}]
        if pool:
            chosen.extend(sampler.sample(pool, sample_n))
    if not chosen:
        raise DisciplineNotFound(f"no researcher lists subject area {discipline!r}")
    rows = {(r.university, r.author_id): r for r in compute_metrics(corpus, params, cohort, only=chosen)}
    return [rows[(p.affiliation, p.author_id)] for p in chosen]


def temporal_histogram(corpus: Corpus) -> tuple[list[YearCount], int]:
    """Publications per (university, cover year), plus the count of undated ones."""
    counts: Counter[tuple[str, int]] = Counter()
    undated = 0
    for uni, profiles in corpus.universities.items():
        for profile in profiles:
            for pub in profile.publications:
                if pub.cover_date is None:
                    undated += 1
                else:
                    counts[(uni, pub.cover_date.year)] += 1
    records = [YearCount(year, uni, n) for (uni, year), n in counts.items()]
    records.sort(key=lambda r: (r.university, r.year))
    return records, undated


def subject_area_counts(corpus: Corpus) -> list[tuple[str, int]]:
    """Each area tagged on a publication counts once for it; descending, ties by name."""
    counts: Counter[str] = Counter()
    for profile in corpus.researchers():
        for pub in profile.publications:
            counts.update(set(pub.subject_areas))
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))


def coauthor_distribution(corpus: Corpus) -> dict[str, list[int]]:
    """Declared author count of every publication, concatenated per university (no dedup)."""
    return {
        uni: [pub.n_authors_declared for p in profiles for pub in p.publications]
        for uni, profiles in corpus.universities.items()
    }


def collaborator_counts(corpus: Corpus, top: int | None = 10) -> dict[str, list[tuple[str, str, int]]]:
    """Most frequent co-authors per researcher as ``(author_id, display_name, papers)``."""
    out = {}
    for profile in corpus.researchers():
        freq: Counter[str] = Counter()
        names: dict[str, str] = {}
        for pub in profile.publications:
            for a in pub.authors:
                if a.author_id != profile.author_id and a.author_id not in names:
                    names[a.author_id] = a.display_name
            freq.update({a.author_id for a in pub.authors if a.author_id != profile.author_id})
        ranked = sorted(freq.items(), key=lambda kv: (-kv[1], kv[0]))[:top]
        out[profile.author_id] = [(aid, names[aid], n) for aid, n in ranked]
    return out


def authorship_positions(corpus: Corpus) -> list[dict[str, Any]]:
    """Single / first / last / middle publication counts per university."""
    out = []
    for uni, profiles in corpus.universities.items():
        totals = Counter()
        for p in profiles:
            b = authorship_breakdown(p.author_id, p.publications)
            totals.update(
                single=b.n_single, first=b.n_first_nonsingle, last=b.n_last_nonsingle, middle=b.n_middle
            )
        n = sum(totals.values())
        lead = totals["single"] + totals["first"] + totals["last"]
        out.append(
            {
                "university": uni,
                "single": totals["single"],
                "first": totals["first"],
                "last": totals["last"],
                "middle": totals["middle"],
                "pct_first_single_last": round(100.0 * lead / n, 2) if n else 0.0,
            }
        )
    return out


# -- emission ------------------------------------------------------------------------


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.2f}"
    return str(value)


def _write_text(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_name(f".{path.name}.tmp")
        with tmp.open("w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return path


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def emit_metrics_csv(rows: Iterable[MetricsRow], path: str | Path) -> Path:
    text = _csv_text(METRICS_COLUMNS, ([getattr(r, c) for c in METRICS_COLUMNS] for r in rows))
    return _write_text(Path(path), text)


def read_metrics_csv(path: str | Path) -> list[MetricsRow]:
    types = {f.name: f.type for f in fields(MetricsRow)}
    out = []
    with Path(path).open(encoding="utf-8", newline="") as fh:
        for rec in csv.DictReader(fh):
            kwargs = {}
            for name, raw in rec.items():
                kind = types[name]
                kwargs[name] = int(raw) if kind == "int" else float(raw) if kind == "float" else raw
            out.append(MetricsRow(**kwargs))
    return out


def emit_summary_csv(rows: Iterable[UniversitySummaryRow], path: str | Path) -> Path:
    """Means rounded to integers, ``pct_drop`` to two decimals."""
    header = [f.name for f in fields(UniversitySummaryRow)]
    body = []
    for r in rows:
        d = asdict(r)
        for key in ("mean_h", "mean_hfrac", "mean_hm", "mean_hl", "mean_of_median_coauthors"):
            d[key] = int(round(d[key]))
        body.append([d[h] for h in header])
    return _write_text(Path(path), _csv_text(header, body))


def plot_records(artifact: str, corpus: Corpus) -> dict[str, Any]:
    if artifact == "temporal":
        years, undated = temporal_histogram(corpus)
        return {"kind": "temporal", "records": [asdict(y) for y in years], "undated": undated}
    if artifact == "subjects":
        return {
            "kind": "subjects",
            "records": [{"subject_area": s, "publications": n} for s, n in subject_area_counts(corpus)],
        }
    if artifact == "coauthors":
        collab = collaborator_counts(corpus)
        records = []
        for uni, samples in coauthor_distribution(corpus).items():
            records.append(
                {
                    "university": uni,
                    "author_counts": samples,
                    "collaborators": [
                        {
                            "author_id": p.author_id,
                            "name": p.name,
                            "top": [{"author_id": a, "display_name": n, "papers": k} for a, n, k in collab[p.author_id]],
                        }
                        for p in corpus.universities[uni]
                    ],
                }
            )
        return {"kind": "coauthors", "records": records}
    if artifact == "authorship_positions":
        return {"kind": "authorship_positions", "records": authorship_positions(corpus)}
    raise ValueError(f"unknown plot artifact {artifact!r}; expected one of {PLOT_KINDS}")


def emit_plot_data(artifact: str, corpus: Corpus, out_dir: str | Path) -> Path:
    doc = plot_records(artifact, corpus)
    text = json.dumps(doc, ensure_ascii=False, indent=2) + "\n"
    return _write_text(Path(out_dir) / f"{artifact}.json", text)

