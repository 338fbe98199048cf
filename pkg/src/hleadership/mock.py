"""Deterministic in-memory stand-in for the two Scopus search endpoints.

The mock answers from two tables: author candidates keyed by surname and raw
publication entries keyed by author id. Individual requests can be scripted to
fail by their 1-based sequence number, e.g. ``faults={2: Response(429, {"Retry-After": "5"})}``.
Every request is logged in ``requests`` for assertions.
"""

from __future__ import annotations

import json
import re
import urllib.parse
from pathlib import Path
from typing import Any, Iterable, Mapping

from .corpus import Corpus, Publication, ResearcherProfile
from .scopus import AUTHOR_SEARCH_PATH, SCOPUS_SEARCH_PATH, Request, Response, split_name

_LAST = re.compile(r"AUTHLASTNAME\(([^)]*)\)")
_AUID = re.compile(r"AU-ID\(([^)]*)\)")


def _json(status: int, doc: Any, headers: Mapping[str, str] | None = None) -> Response:
    return Response(status, dict(headers or {}), json.dumps(doc).encode("utf-8"))


def author_entry(
    author_id: str,
    surname: str,
    given: str,
    *,
    document_count: int = 100,
    subject_areas: Iterable[str] = (),
    city: str = "",
    country: str = "",
    affiliation_name: str = "",
    affiliation_id: str = "",
) -> dict[str, Any]:
    return {
        "dc:identifier": f"AUTHOR_ID:{author_id}",
        "preferred-name": {"surname": surname, "given-name": given},
        "document-count": str(document_count),
        "subject-area": [{"@abbrev": s[:4].upper(), "$": s} for s in subject_areas],
        "affiliation-current": {
            "affiliation-id": affiliation_id,
            "affiliation-name": affiliation_name,
            "affiliation-city": city,
            "affiliation-country": country,
        },
    }


_AGGREGATION = {
    "journal": "Journal",
    "conference": "Conference Proceeding",
    "book": "Book",
    "report": "Report",
    "trade_journal": "Trade Journal",
    "unknown": "",
}


def publication_entry(pub: Publication) -> dict[str, Any]:
    """Raw search entry that maps back onto ``pub``."""
    entry: dict[str, Any] = {
        "dc:identifier": f"SCOPUS_ID:{pub.pub_id}",
        "dc:title": pub.title,
        "citedby-count": str(pub.citations),
        "prism:publicationName": pub.venue,
        "prism:aggregationType": _AGGREGATION[pub.venue_type],
        "prism:coverDate": pub.cover_date.isoformat() if pub.cover_date else "",
        "author-count": {"@limit": "100", "@total": str(pub.n_authors_declared), "$": str(len(pub.authors))},
        "author": [
            {
                "@seq": str(i),
                "authid": a.author_id,
                "authname": a.display_name,
                "afid": [{"$": a.affiliation_id}] if a.affiliation_id else [],
            }
            for i, a in enumerate(pub.authors, start=1)
        ],
        "subject-area": [{"$": s} for s in pub.subject_areas],
    }
    if pub.doi:
        entry["prism:doi"] = pub.doi
    if pub.issn:
        entry["prism:issn"] = pub.issn
    return entry


class MockTransport:
    def __init__(
        self,
        authors: Mapping[str, list[dict]] | None = None,
        publications: Mapping[str, list[dict]] | None = None,
        faults: Mapping[int, Response] | None = None,
        api_key: str | None = None,
        rate_limit: int | None = None,
    ):
        self.authors = {k.casefold(): list(v) for k, v in (authors or {}).items()}
        self.publications = {k: list(v) for k, v in (publications or {}).items()}
        self.faults = dict(faults or {})
        self.api_key = api_key
        self.rate_limit = rate_limit
        self.requests: list[Request] = []

    def _rate_headers(self) -> dict[str, str]:
        if self.rate_limit is None:
            return {}
        left = max(0, self.rate_limit - len(self.requests))
        return {"X-RateLimit-Limit": str(self.rate_limit), "X-RateLimit-Remaining": str(left)}

    def execute(self, request: Request) -> Response:
        self.requests.append(request)
        seq = len(self.requests)
        if seq in self.faults:
            return self.faults[seq]
        if self.api_key is not None and request.headers.get("X-ELS-APIKey") != self.api_key:
            return _json(401, {"service-error": {"status": {"statusCode": "AUTHENTICATION_ERROR"}}})
        path = urllib.parse.urlparse(request.url).path
        query = str(request.params.get("query", ""))
        if path.endswith(AUTHOR_SEARCH_PATH):
            m = _LAST.search(query)
            hits = self.authors.get(m.group(1).strip().casefold(), []) if m else []
            return _json(200, self._page(hits, 0, len(hits) or 1), self._rate_headers())
        if path.endswith(SCOPUS_SEARCH_PATH):
            m = _AUID.search(query)
            entries = self.publications.get(m.group(1), []) if m else []
            start = int(request.params.get("start", 0))
            count = int(request.params.get("count", 25))
            return _json(200, self._page(entries, start, count), self._rate_headers())
        return _json(404, {"error": f"no route for {path}"})

    @staticmethod
    def _page(entries: list[dict], start: int, count: int) -> dict:
        chunk = entries[start : start + count]
        return {
            "search-results": {
                "opensearch:totalResults": str(len(entries)),
                "opensearch:startIndex": str(start),
                "opensearch:itemsPerPage": str(len(chunk)),
                "entry": chunk if chunk else [{"@_fa": "true", "error": "Result set was empty"}],
            }
        }

    # -- construction helpers --------------------------------------------------------------

    @classmethod
    def from_corpus(cls, corpus: Corpus, **kwargs) -> "MockTransport":
        """Serve every researcher of ``corpus`` back as search results."""
        authors: dict[str, list[dict]] = {}
        pubs: dict[str, list[dict]] = {}
        for profile in corpus.researchers():
            surname, given = split_name(profile.name)
            authors.setdefault(surname.casefold(), []).append(_profile_entry(profile, surname, given))
            pubs[profile.author_id] = [publication_entry(p) for p in profile.publications]
        return cls(authors, pubs, **kwargs)

    @classmethod
    def from_file(cls, path: str | Path, **kwargs) -> "MockTransport":
        """Load ``{"authors": ..., "publications": ..., "faults": {"<n>": {"status", "headers"}}}``."""
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        faults = {
            int(k): Response(int(v["status"]), dict(v.get("headers") or {}), json.dumps(v.get("body", {})).encode())
            for k, v in (doc.get("faults") or {}).items()
        }
        return cls(doc.get("authors"), doc.get("publications"), faults, **kwargs)


def _profile_entry(profile: ResearcherProfile, surname: str, given: str) -> dict[str, Any]:
    return author_entry(
        profile.author_id,
        surname,
        given,
        document_count=profile.document_count,
        subject_areas=profile.subject_areas,
        city=profile.city,
        country=profile.country,
        affiliation_name=profile.affiliation,
    )
