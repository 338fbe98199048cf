"""Domain model, ``affiliations.json`` parsing and stored-record I/O.

A stored researcher record is one JSON file per researcher::

    {"author_id", "name", "affiliation", "city", "country", "document_count",
     "subject_areas": [...],
     "publications": [{"pub_id", "title", "authors": [{"author_id",
         "display_name", "affiliation_id"}], "citations", "n_authors_declared",
         "venue", "venue_type", "cover_date", "subject_areas", "doi"}]}

Author positions are 1-indexed everywhere.
"""

from __future__ import annotations

import datetime as dt
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

from .errors import MalformedConfig, MissingField, NoSuchDirectory, ParseFailure

logger = logging.getLogger(__name__)

VENUE_TYPES = ("journal", "conference", "book", "report", "trade_journal", "unknown")

_CONFIG_FIELDS = ("affiliation", "scopus_id", "city", "country", "researchers")


@dataclass(frozen=True, slots=True)
class AuthorRef:
    author_id: str
    display_name: str = ""
    affiliation_id: str | None = None

    def __post_init__(self):
        if not self.author_id:
            raise ValueError("author_id must be non-empty")


@dataclass(frozen=True, slots=True)
class Publication:
    pub_id: str
    authors: tuple[AuthorRef, ...]
    citations: int
    n_authors_declared: int | None = None
    title: str = ""
    venue: str = ""
    venue_type: str = "unknown"
    cover_date: dt.date | None = None
    subject_areas: tuple[str, ...] = ()
    doi: str | None = None
    issn: str | None = None

    def __post_init__(self):
        if not isinstance(self.authors, tuple):
            object.__setattr__(self, "authors", tuple(self.authors))
        if not isinstance(self.subject_areas, tuple):
            object.__setattr__(self, "subject_areas", tuple(self.subject_areas))
        if self.n_authors_declared is None:
            object.__setattr__(self, "n_authors_declared", len(self.authors))
        if self.citations < 0:
            raise ValueError(f"{self.pub_id}: negative citation count")
        if not self.authors:
            raise ValueError(f"{self.pub_id}: empty author list")
        if self.n_authors_declared < len(self.authors):
            raise ValueError(f"{self.pub_id}: n_authors_declared below listed authors")
        if self.venue_type not in VENUE_TYPES:
            raise ValueError(f"{self.pub_id}: unknown venue_type {self.venue_type!r}")

    @property
    def is_clipped(self) -> bool:
        return self.n_authors_declared > len(self.authors)


@dataclass(frozen=True, slots=True)
class ResearcherProfile:
    author_id: str
    name: str
    affiliation: str
    city: str = ""
    country: str = ""
    document_count: int = 0
    subject_areas: tuple[str, ...] = ()
    publications: tuple[Publication, ...] = ()

    def __post_init__(self):
        if not isinstance(self.subject_areas, tuple):
            object.__setattr__(self, "subject_areas", tuple(self.subject_areas))
        if not isinstance(self.publications, tuple):
            object.__setattr__(self, "publications", tuple(self.publications))
        if not self.author_id:
            raise ValueError("author_id must be non-empty")
        if self.document_count < 0:
            raise ValueError("document_count must be non-negative")


@dataclass(frozen=True, slots=True)
class AffiliationConfig:
    affiliation_name: str
    affiliation_id: str
    scopus_ids: tuple[str, ...]
    city: str
    country: str
    researcher_names: dict[str, str]


@dataclass
class Corpus:
    """Researchers grouped by affiliation name."""

    universities: dict[str, list[ResearcherProfile]] = field(default_factory=dict)

    def researchers(self) -> Iterable[ResearcherProfile]:
        for profiles in self.universities.values():
            yield from profiles

    def n_publications(self) -> int:
        return sum(len(r.publications) for r in self.researchers())

    def __len__(self) -> int:
        return sum(len(v) for v in self.universities.values())

    def add(self, profile: ResearcherProfile) -> bool:
        """Append ``profile``; returns False if its author_id is already present."""
        bucket = self.universities.setdefault(profile.affiliation, [])
        if any(p.author_id == profile.author_id for p in bucket):
            return False
        bucket.append(profile)
        return True


@dataclass
class LoadReport:
    failures: list[tuple[str, str]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def author_position(pub: Publication, author_id: str) -> int | None:
    for i, author in enumerate(pub.authors, start=1):
        if author.author_id == author_id:
            return i
    return None


def duplicate_authors(pub: Publication) -> list[str]:
    seen: set[str] = set()
    dups = []
    for a in pub.authors:
        if a.author_id in seen:
            dups.append(a.author_id)
        seen.add(a.author_id)
    return dups


# -- affiliations.json --------------------------------------------------------


def parse_affiliations_config(raw: bytes | str) -> list[AffiliationConfig]:
    """Parse an ``affiliations.json`` document.

    Each top-level key is one institution. ``scopus_id`` holds the institution's
    Scopus affiliation ids; the first one doubles as ``affiliation_id``.
    """
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedConfig(f"config is not UTF-8: {exc}") from exc
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MalformedConfig(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedConfig("config root must be an object")

    configs = []
    for key, entry in doc.items():
        if not isinstance(entry, dict):
            raise MalformedConfig(f"institution {key!r} must map to an object")
        for name in _CONFIG_FIELDS:
            if name not in entry:
                raise MissingField(name, key)
        ids = entry["scopus_id"]
        if isinstance(ids, str):
            ids = [ids]
        if not isinstance(ids, list) or not all(isinstance(i, (str, int)) for i in ids):
            raise MalformedConfig(f"institution {key!r}: scopus_id must be a list of ids")
        ids = [str(i) for i in ids if str(i)]
        if not ids:
            raise MissingField("scopus_id", key)
        researchers = entry["researchers"]
        if not isinstance(researchers, dict):
            raise MalformedConfig(f"institution {key!r}: researchers must be an object")
        if not researchers:
            raise MissingField("researchers", key)
        configs.append(
            AffiliationConfig(
                affiliation_name=str(entry["affiliation"]),
                affiliation_id=ids[0],
                scopus_ids=tuple(ids),
                city=str(entry["city"]),
                country=str(entry["country"]),
                researcher_names={str(k): str(v) for k, v in researchers.items()},
            )
        )
    return configs


# -- stored researcher records --------------------------------------------------


def parse_date(value: Any) -> dt.date | None:
    if not value or not isinstance(value, str):
        return None
    try:
        return dt.date.fromisoformat(value[:10])
    except ValueError:
        return None


def publication_to_record(pub: Publication) -> dict[str, Any]:
    return {
        "pub_id": pub.pub_id,
        "title": pub.title,
        "authors": [
            {"author_id": a.author_id, "display_name": a.display_name, "affiliation_id": a.affiliation_id}
            for a in pub.authors
        ],
        "citations": pub.citations,
        "n_authors_declared": pub.n_authors_declared,
        "venue": pub.venue,
        "venue_type": pub.venue_type,
        "cover_date": pub.cover_date.isoformat() if pub.cover_date else None,
        "subject_areas": list(pub.subject_areas),
        "doi": pub.doi,
        "issn": pub.issn,
    }


def publication_from_record(rec: Mapping[str, Any]) -> Publication:
    authors = tuple(
        AuthorRef(
            author_id=str(a["author_id"]),
            display_name=a.get("display_name") or "",
            affiliation_id=a.get("affiliation_id"),
        )
        for a in rec["authors"]
    )
    declared = rec.get("n_authors_declared")
    return Publication(
        pub_id=str(rec["pub_id"]),
        title=rec.get("title") or "",
        authors=authors,
        citations=int(rec["citations"]),
        n_authors_declared=int(declared) if declared is not None else None,
        venue=rec.get("venue") or "",
        venue_type=rec.get("venue_type") or "unknown",
        cover_date=parse_date(rec.get("cover_date")),
        subject_areas=tuple(rec.get("subject_areas") or ()),
        doi=rec.get("doi"),
        issn=rec.get("issn"),
    )


def profile_to_record(profile: ResearcherProfile) -> dict[str, Any]:
    return {
        "author_id": profile.author_id,
        "name": profile.name,
        "affiliation": profile.affiliation,
        "city": profile.city,
        "country": profile.country,
        "document_count": profile.document_count,
        "subject_areas": list(profile.subject_areas),
        "publications": [publication_to_record(p) for p in profile.publications],
    }


def profile_from_record(rec: Mapping[str, Any]) -> ResearcherProfile:
    return ResearcherProfile(
        author_id=str(rec["author_id"]),
        name=rec.get("name") or "",
        affiliation=rec["affiliation"],
        city=rec.get("city") or "",
        country=rec.get("country") or "",
        document_count=int(rec.get("document_count") or 0),
        subject_areas=tuple(rec.get("subject_areas") or ()),
        publications=tuple(publication_from_record(p) for p in rec.get("publications") or ()),
    )


def dumps_record(profile: ResearcherProfile) -> str:
    """Canonical serialization: fixed key order, two-space indent, trailing newline."""
    return json.dumps(profile_to_record(profile), ensure_ascii=False, indent=2) + "\n"


def records_dir(data_dir: Path) -> Path:
    """Records live in ``<data>/Scopus``; a bare directory of records also works."""
    sub = data_dir / "Scopus"
    return sub if sub.is_dir() else data_dir


def load_corpus(data_dir: str | Path) -> tuple[Corpus, LoadReport]:
    """Load every ``*.json`` record under ``data_dir``.

    Unreadable files are collected in the report rather than raised.
    Universities come back sorted by name; researchers keep file-name order.
    """
    data_dir = Path(data_dir)
    if not data_dir.is_dir():
        raise NoSuchDirectory(f"no such directory: {data_dir}")
    report = LoadReport()
    corpus = Corpus()
    for path in sorted(records_dir(data_dir).glob("*.json")):
        if path.name == "affiliations.json":
            continue
        try:
            with path.open(encoding="utf-8") as fh:
                rec = json.load(fh)
            profile = profile_from_record(rec)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            err = ParseFailure(f"{path.name}: {exc}")
            report.failures.append((str(path), str(err)))
            logger.warning("skipping %s: %s", path, exc)
            continue
        for pub in profile.publications:
            for dup in duplicate_authors(pub):
                report.warnings.append(f"{path.name}: {pub.pub_id} lists {dup} more than once")
        if not corpus.add(profile):
            report.warnings.append(f"{path.name}: duplicate author_id {profile.author_id} ignored")
    corpus.universities = dict(sorted(corpus.universities.items()))
    return corpus, report
