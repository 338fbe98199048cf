"""Affiliation-driven retrieval of researcher profiles and publications.

For every researcher name in ``affiliations.json`` the author-search endpoint
is queried within the institution's affiliation ids. Candidates must pass all
of subject area, minimum document count, country and city. Each match's
publications are then paged out of the Scopus search endpoint 25 at a time and
stored as one JSON record per researcher under ``<data>/Scopus``.

All HTTP goes through a ``Transport`` (``execute(Request) -> Response``), so
the whole pipeline runs offline against :class:`hleadership.mock.MockTransport`.

Raw search entry -> stored publication field mapping:

============================  =====================================================
``dc:identifier``             ``pub_id`` (``SCOPUS_ID:`` prefix dropped; ``eid`` fallback)
``dc:title``                  ``title``
``citedby-count``             ``citations``
``author[]`` (by ``@seq``)    ``authors``: ``authid``, ``authname``, first ``afid``
``author-count.@total``       ``n_authors_declared`` (else ``$``, else listed length)
``prism:publicationName``     ``venue``
``prism:aggregationType``     ``venue_type`` (see ``VENUE_TYPE_MAP``)
``prism:coverDate``           ``cover_date``
``subject-area[].$``          ``subject_areas`` (else the researcher's own areas)
``prism:doi`` / ``prism:issn``  ``doi`` / ``issn``
============================  =====================================================

Author lists longer than 100 arrive clipped by the source; the declared total
is kept so weights are computed against the true author count.
"""

from __future__ import annotations

import datetime as dt
import json
import logging
import math
import os
import re
import tempfile
import time
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping, Protocol

from .corpus import (
    AffiliationConfig,
    AuthorRef,
    Publication,
    ResearcherProfile,
    dumps_record,
    parse_date,
)
from .errors import (
    AuthFailure,
    IngestError,
    IoFailure,
    MalformedResponse,
    NoMatch,
    QuotaExhausted,
    TransportError,
)

logger = logging.getLogger(__name__)

DEFAULT_BASE_URL = "https://api.elsevier.com"
AUTHOR_SEARCH_PATH = "/content/search/author"
SCOPUS_SEARCH_PATH = "/content/search/scopus"
DEFAULT_PAGE_SIZE = 25
DEFAULT_WEEKLY_BUDGET = 5000
DEFAULT_WAIT = 60.0
MAX_ATTEMPTS = 3

VENUE_TYPE_MAP = {
    "journal": "journal",
    "conference proceeding": "conference",
    "book": "book",
    "book series": "book",
    "report": "report",
    "trade journal": "trade_journal",
}


@dataclass(frozen=True)
class Request:
    url: str
    params: Mapping[str, Any] = field(default_factory=dict)
    headers: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Response:
    status: int
    headers: Mapping[str, str] = field(default_factory=dict)
    body: bytes = b""

    def header(self, name: str) -> str | None:
        lname = name.lower()
        for k, v in self.headers.items():
            if k.lower() == lname:
                return v
        return None

    def json(self) -> Any:
        return json.loads(self.body.decode("utf-8"))


class Transport(Protocol):
    def execute(self, request: Request) -> Response: ...


class UrllibTransport:
    """Live HTTP transport on top of ``urllib``."""

    def __init__(self, timeout: float = 30.0):
        self.timeout = timeout

    def execute(self, request: Request) -> Response:
        url = request.url
        if request.params:
            url = f"{url}?{urllib.parse.urlencode(request.params)}"
        req = urllib.request.Request(url, headers=dict(request.headers))
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                return Response(resp.status, dict(resp.headers.items()), resp.read())
        except urllib.error.HTTPError as exc:
            return Response(exc.code, dict(exc.headers.items()) if exc.headers else {}, exc.read() or b"")
        except (urllib.error.URLError, OSError) as exc:
            raise TransportError(str(exc)) from exc


# -- rate limiting -------------------------------------------------------------------


@dataclass
class RateLimitState:
    remaining_quota: int = DEFAULT_WEEKLY_BUDGET
    reset_at: float | None = None
    weekly_budget: int = DEFAULT_WEEKLY_BUDGET


@dataclass(frozen=True)
class Decision:
    action: str  # "proceed" | "wait" | "abort"
    duration: float = 0.0


PROCEED = Decision("proceed")
ABORT = Decision("abort")


def _header(headers: Mapping[str, str], name: str) -> str | None:
    lname = name.lower()
    for k, v in headers.items():
        if k.lower() == lname:
            return v
    return None


def rate_limit_gate(state: RateLimitState, status: int, headers: Mapping[str, str], now: float) -> Decision:
    """Update ``state`` from one response and decide what the client does next.

    ``weekly_budget`` counts requests the client may still issue; the client
    decrements it, the gate only reads it.
    """
    remaining = _header(headers, "X-RateLimit-Remaining")
    if remaining is not None and remaining.strip().lstrip("-").isdigit():
        state.remaining_quota = max(0, int(remaining))
    elif status < 400:
        state.remaining_quota = max(0, state.remaining_quota - 1)
    reset = _header(headers, "X-RateLimit-Reset")
    if reset is not None:
        try:
            state.reset_at = float(reset)
        except ValueError:
            pass
    retry_after = _header(headers, "Retry-After")
    if retry_after is not None:
        try:
            state.reset_at = now + float(retry_after)
        except ValueError:
            pass

    if state.weekly_budget <= 0:
        return ABORT
    if status == 429 or state.remaining_quota == 0:
        if state.reset_at is None:
            return Decision("wait", DEFAULT_WAIT)
        return Decision("wait", max(0.0, state.reset_at - now))
    return PROCEED


# -- client ----------------------------------------------------------------------------


class ScopusClient:
    """Sequential, budget-aware access to the two search endpoints."""

    def __init__(
        self,
        transport: Transport,
        api_key: str | None = None,
        base_url: str = DEFAULT_BASE_URL,
        page_size: int = DEFAULT_PAGE_SIZE,
        state: RateLimitState | None = None,
        sleep: Callable[[float], None] = time.sleep,
        clock: Callable[[], float] = time.time,
        backoff: float = 1.0,
    ):
        if page_size < 1:
            raise ValueError("page_size must be >= 1")
        self.transport = transport
        self.api_key = api_key
        self.base_url = base_url.rstrip("/")
        self.page_size = page_size
        self.state = state or RateLimitState()
        self.sleep = sleep
        self.clock = clock
        self.backoff = backoff
        self.requests_issued = 0
        self.pauses: list[float] = []

    def _pause(self, seconds: float) -> None:
        self.pauses.append(seconds)
        logger.info("rate limited, pausing %.1fs", seconds)
        self.sleep(seconds)

    def get(self, path: str, params: Mapping[str, Any]) -> Any:
        headers = {"Accept": "application/json"}
        if self.api_key:
            headers["X-ELS-APIKey"] = self.api_key
        request = Request(self.base_url + path, dict(params), headers)
        server_errors = 0
        while True:
            if self.state.weekly_budget <= 0:
                raise QuotaExhausted(f"request budget exhausted after {self.requests_issued} requests")
            self.state.weekly_budget -= 1
            self.requests_issued += 1
            try:
                resp = self.transport.execute(request)
            except TransportError:
                server_errors += 1
                if server_errors >= MAX_ATTEMPTS:
                    raise
                self.sleep(self.backoff * 2 ** (server_errors - 1))
                continue
            if resp.status in (401, 403):
                raise AuthFailure(f"HTTP {resp.status} from {path}")
            decision = rate_limit_gate(self.state, resp.status, resp.headers, self.clock())
            if resp.status == 429:
                if decision.action == "abort":
                    raise QuotaExhausted("HTTP 429 with no request budget left")
                self._pause(decision.duration)
                continue
            if resp.status >= 500:
                server_errors += 1
                if server_errors >= MAX_ATTEMPTS:
                    raise TransportError(f"HTTP {resp.status} from {path} after {MAX_ATTEMPTS} attempts")
                self.sleep(self.backoff * 2 ** (server_errors - 1))
                continue
            if resp.status >= 400:
                raise TransportError(f"HTTP {resp.status} from {path}")
            if decision.action == "wait":
                self._pause(decision.duration)
            try:
                return resp.json()
            except (ValueError, UnicodeDecodeError) as exc:
                raise MalformedResponse(f"invalid JSON from {path}: {exc}", params.get("start")) from exc


# -- author search -------------------------------------------------------------------------


@dataclass(frozen=True)
class MatchCriteria:
    target_subject_area: str | None
    min_document_count: int
    target_country: str
    target_city: str

    def __post_init__(self):
        if self.min_document_count < 0:
            raise ValueError("min_document_count must be >= 0")


@dataclass(frozen=True)
class AuthorCandidate:
    author_id: str
    name: str
    document_count: int
    subject_areas: tuple[str, ...]
    city: str
    country: str


def split_name(name: str) -> tuple[str, str]:
    """``"Surname, Given"`` or ``"Given Surname"`` -> (surname, given)."""
    if "," in name:
        last, first = name.split(",", 1)
        return last.strip(), first.strip()
    parts = name.split()
    if not parts:
        return "", ""
    return parts[-1], " ".join(parts[:-1])


def author_query(name: str, affiliation_ids: tuple[str, ...]) -> str:
    last, first = split_name(name)
    terms = [f"AUTHLASTNAME({last})"]
    if first:
        terms.append(f"AUTHFIRST({first})")
    terms.append("(" + " OR ".join(f"AF-ID({a})" for a in affiliation_ids) + ")")
    return " AND ".join(terms)


def _text(value: Any) -> str:
    if isinstance(value, dict):
        return str(value.get("$", ""))
    return "" if value is None else str(value)


def _as_list(value: Any) -> list:
    if value is None:
        return []
    return value if isinstance(value, list) else [value]


def _entries(doc: Any, where: str, offset: int | None = None) -> tuple[list[dict], int | None]:
    try:
        results = doc["search-results"]
    except (KeyError, TypeError) as exc:
        raise MalformedResponse(f"{where}: missing search-results", offset) from exc
    entries = [e for e in _as_list(results.get("entry")) if isinstance(e, dict) and "error" not in e]
    total = results.get("opensearch:totalResults")
    try:
        total = int(total) if total is not None else None
    except (TypeError, ValueError) as exc:
        raise MalformedResponse(f"{where}: bad totalResults {total!r}", offset) from exc
    return entries, total


def parse_author_entry(entry: Mapping[str, Any]) -> AuthorCandidate:
    author_id = _text(entry.get("dc:identifier")).removeprefix("AUTHOR_ID:")
    if not author_id:
        raise MalformedResponse("author entry without dc:identifier")
    pref = entry.get("preferred-name") or {}
    name = ", ".join(x for x in (pref.get("surname", ""), pref.get("given-name", "")) if x)
    aff = entry.get("affiliation-current") or {}
    if isinstance(aff, list):
        aff = aff[0] if aff else {}
    try:
        docs = int(entry.get("document-count") or 0)
    except (TypeError, ValueError) as exc:
        raise MalformedResponse(f"author {author_id}: bad document-count") from exc
    return AuthorCandidate(
        author_id=author_id,
        name=name,
        document_count=docs,
        subject_areas=tuple(_text(s) for s in _as_list(entry.get("subject-area")) if _text(s)),
        city=str(aff.get("affiliation-city") or ""),
        country=str(aff.get("affiliation-country") or ""),
    )


def passes(candidate: AuthorCandidate, criteria: MatchCriteria) -> bool:
    fold = str.casefold
    if criteria.target_subject_area and fold(criteria.target_subject_area) not in {
        fold(s) for s in candidate.subject_areas
    }:
        return False
    return (
        candidate.document_count >= criteria.min_document_count
        and fold(candidate.country) == fold(criteria.target_country)
        and fold(candidate.city) == fold(criteria.target_city)
    )


def match_researcher(
    name: str, config: AffiliationConfig, criteria: MatchCriteria, client: ScopusClient
) -> list[ResearcherProfile]:
    """Profiles (without publications) for every candidate passing ``criteria``."""
    doc = client.get(
        AUTHOR_SEARCH_PATH,
        {"query": author_query(name, config.scopus_ids), "count": client.page_size},
    )
    entries, _ = _entries(doc, f"author search for {name!r}")
    matched = []
    for entry in entries:
        cand = parse_author_entry(entry)
        if passes(cand, criteria):
            matched.append(
                ResearcherProfile(
                    author_id=cand.author_id,
                    name=name,
                    affiliation=config.affiliation_name,
                    city=cand.city,
                    country=cand.country,
                    document_count=cand.document_count,
                    subject_areas=cand.subject_areas,
                )
            )
    if not matched:
        raise NoMatch(f"{name!r}: no candidate among {len(entries)} passed the match criteria")
    return matched


def search_and_match_authors(
    config: AffiliationConfig, criteria: MatchCriteria, client: ScopusClient
) -> tuple[list[ResearcherProfile], list[str]]:
    """Match every researcher name of one institution.

    Returns ``(profiles, unmatched_names)``.
    """
    profiles: list[ResearcherProfile] = []
    unmatched: list[str] = []
    for name in config.researcher_names:
        try:
            profiles.extend(match_researcher(name, config, criteria, client))
        except NoMatch as exc:
            logger.info("no match: %s", exc)
            unmatched.append(name)
    return profiles, unmatched


# -- publications --------------------------------------------------------------------------


def parse_publication_entry(entry: Mapping[str, Any], default_areas: tuple[str, ...] = ()) -> Publication | None:
    """Map one raw search entry; returns None for entries without an author list."""
    raw_authors = _as_list(entry.get("author"))
    if raw_authors and all("@seq" in a for a in raw_authors):
        raw_authors = sorted(raw_authors, key=lambda a: int(a["@seq"]))
    authors = []
    for a in raw_authors:
        afids = _as_list(a.get("afid"))
        authors.append(
            AuthorRef(
                author_id=str(a["authid"]),
                display_name=str(a.get("authname") or ""),
                affiliation_id=_text(afids[0]) if afids else None,
            )
        )
    pub_id = _text(entry.get("dc:identifier")).removeprefix("SCOPUS_ID:") or _text(entry.get("eid"))
    if not authors:
        logger.warning("publication %s has no author list; skipped", pub_id)
        return None
    count = entry.get("author-count")
    declared = None
    if isinstance(count, dict):
        declared = count.get("@total") or count.get("$")
    elif count is not None:
        declared = count
    declared = max(int(declared), len(authors)) if declared not in (None, "") else len(authors)
    areas = tuple(_text(s) for s in _as_list(entry.get("subject-area")) if _text(s)) or default_areas
    return Publication(
        pub_id=pub_id,
        title=str(entry.get("dc:title") or ""),
        authors=tuple(authors),
        citations=int(entry.get("citedby-count") or 0),
        n_authors_declared=declared,
        venue=str(entry.get("prism:publicationName") or ""),
        venue_type=VENUE_TYPE_MAP.get(str(entry.get("prism:aggregationType") or "").casefold(), "unknown"),
        cover_date=parse_date(entry.get("prism:coverDate")),
        subject_areas=areas,
        doi=entry.get("prism:doi"),
        issn=entry.get("prism:issn"),
    )


def fetch_publications(
    author_id: str, client: ScopusClient, default_areas: tuple[str, ...] = ()
) -> list[Publication]:
    """Page through every publication of ``author_id``.

    Paging stops once ``start`` reaches ``opensearch:totalResults``, or on an
    empty page. Without a total the page is assumed final when it comes back
    short.
    """
    pubs: list[Publication] = []
    start = 0
    while True:
        doc = client.get(
            SCOPUS_SEARCH_PATH,
            {"query": f"AU-ID({author_id})", "start": start, "count": client.page_size, "view": "COMPLETE"},
        )
        entries, total = _entries(doc, f"publications of {author_id}", start)
        for entry in entries:
            try:
                pub = parse_publication_entry(entry, default_areas)
            except (KeyError, TypeError, ValueError) as exc:
                raise MalformedResponse(f"publications of {author_id}: {exc}", start) from exc
            if pub is not None:
                pubs.append(pub)
        start += client.page_size
        if not entries:
            break
        if total is not None:
            if start >= total:
                break
        elif len(entries) < client.page_size:
            break
    return pubs


# -- persistence ------------------------------------------------------------------------------


def persist_researcher(profile: ResearcherProfile, data_dir: str | Path) -> Path:
    """Atomically write ``<data_dir>/Scopus/<author_id>.json``."""
    target_dir = Path(data_dir) / "Scopus"
    target = target_dir / f"{profile.author_id}.json"
    try:
        target_dir.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=target_dir, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(dumps_record(profile))
            os.replace(tmp, target)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
    except OSError as exc:
        raise IoFailure(f"cannot write {target}: {exc}") from exc
    return target


def record_failure(context: str, error: BaseException | str, log_path: str | Path, now: dt.datetime | None = None) -> None:
    """Append ``<ISO time>\\t<context>\\t<error>`` to the failure log. Never raises."""
    when = (now or dt.datetime.now(dt.timezone.utc)).isoformat(timespec="seconds")
    if isinstance(error, BaseException):
        error = f"{type(error).__name__}: {error}"
    clean = lambda s: re.sub(r"[\t\r\n]+", " ", str(s))  # noqa: E731
    try:
        path = Path(log_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("a", encoding="utf-8") as fh:
            fh.write(f"{when}\t{clean(context)}\t{clean(error)}\n")
    except Exception:  # best effort by contract
        logger.debug("could not write failure log %s", log_path, exc_info=True)


# -- pipeline ----------------------------------------------------------------------------------


@dataclass
class FetchReport:
    persisted: list[Path] = field(default_factory=list)
    no_match: list[tuple[str, str]] = field(default_factory=list)
    failed: list[tuple[str, str, str]] = field(default_factory=list)
    fatal: IngestError | None = None


def run_fetch(
    configs: list[AffiliationConfig],
    client: ScopusClient,
    data_dir: str | Path,
    subject_area: str | None = None,
    min_document_count: int = 0,
) -> FetchReport:
    """Fetch and persist every configured researcher.

    Each name ends persisted, in ``no_match``, or logged to
    ``<data_dir>/failures.txt``. Auth and quota failures stop the run; the
    names not yet processed are logged as failures too.
    """
    data_dir = Path(data_dir)
    log_path = data_dir / "failures.txt"
    report = FetchReport()
    todo = [(cfg, name) for cfg in configs for name in cfg.researcher_names]

    def fail(cfg: AffiliationConfig, name: str, stage: str, err: BaseException | str) -> None:
        record_failure(f"{stage}:{cfg.affiliation_name}:{name}", err, log_path)
        report.failed.append((cfg.affiliation_name, name, str(err)))

    for i, (cfg, name) in enumerate(todo):
        criteria = MatchCriteria(subject_area, min_document_count, cfg.country, cfg.city)
        stage = "search"
        try:
            profiles = match_researcher(name, cfg, criteria, client)
            stage = "fetch"
            for profile in profiles:
                pubs = fetch_publications(profile.author_id, client, profile.subject_areas)
                complete = ResearcherProfile(
                    author_id=profile.author_id,
                    name=profile.name,
                    affiliation=profile.affiliation,
                    city=profile.city,
                    country=profile.country,
                    document_count=profile.document_count,
                    subject_areas=profile.subject_areas,
                    publications=tuple(pubs),
                )
                stage = "persist"
                report.persisted.append(persist_researcher(complete, data_dir))
                logger.info("stored %s (%s): %d publications", name, profile.author_id, len(pubs))
        except NoMatch:
            report.no_match.append((cfg.affiliation_name, name))
        except (AuthFailure, QuotaExhausted) as exc:
            fail(cfg, name, stage, exc)
            for rest_cfg, rest_name in todo[i + 1 :]:
                fail(rest_cfg, rest_name, "skipped", exc)
            report.fatal = exc
            break
        except (IngestError, IoFailure) as exc:
            fail(cfg, name, stage, exc)
    return report


def expected_requests(n_results: int, page_size: int = DEFAULT_PAGE_SIZE) -> int:
    """Publication-search requests needed for ``n_results`` entries."""
    return max(1, math.ceil(n_results / page_size))
