"""Seeded synthetic corpora and brute-force definitional oracles.

Nothing in here imports :mod:`hleadership.metrics` or :mod:`hleadership.weights`.
The oracles evaluate each index by testing every candidate value ``k`` in
``0..n`` against the metric's defining predicate and keeping the largest one
that holds. Rankings, where a definition needs them, are obtained by pairwise
comparison counts rather than sorting.

Randomness comes from SplitMix64 so a ``CorpusSpec`` yields the same corpus on
every platform and Python version.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import AuthorRef, Corpus, Publication, ResearcherProfile

MASK64 = (1 << 64) - 1
SCOPUS_CLIP = 100

SUBJECT_AREAS = (
    "Medicine",
    "Engineering",
    "Physics and Astronomy",
    "Biochemistry, Genetics and Molecular Biology",
    "Computer Science",
    "Materials Science",
    "Neuroscience",
    "Mathematics",
)
_VENUES = (("journal", 0.90), ("conference", 0.05), ("book", 0.03), ("report", 0.01), ("trade_journal", 0.01))
_POOL_SIZE = 211  # prime, > SCOPUS_CLIP, so strided pool walks never repeat within a list


class SplitMix64:
    """Steele, Lea & Flood's SplitMix64 generator."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in the closed range [lo, hi]."""
        span = hi - lo + 1
        return lo + (self.next_u64() * span >> 64)


@dataclass(frozen=True)
class CorpusSpec:
    n_universities: int = 2
    researchers_per_university: int = 3
    max_pubs: int = 50
    max_authors: int = 150
    max_citations: int = 100_000
    seed: int = 0

    def __post_init__(self):
        for name in ("n_universities", "researchers_per_university", "max_pubs", "max_authors", "max_citations"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


def _draw_author_count(rng: SplitMix64, max_authors: int) -> int:
    u = rng.random()
    if u < 0.08:
        hi = 1
    elif u < 0.55:
        hi = 6
    elif u < 0.85:
        hi = 20
    elif u < 0.95:
        hi = 60
    else:
        hi = max_authors
    return rng.randint(1, min(hi, max_authors))


def _draw_citations(rng: SplitMix64, max_citations: int) -> int:
    if rng.random() < 0.12:
        return 0
    # Pareto tail, alpha = 1.1
    u = 1.0 - rng.random()
    value = int(8.0 * (u ** (-1.0 / 1.1) - 1.0))
    return min(value, max_citations)


def _draw_venue(rng: SplitMix64) -> str:
    u = rng.random()
    acc = 0.0
    for kind, p in _VENUES:
        acc += p
        if u < acc:
            return kind
    return "unknown"


def generate_corpus(spec: CorpusSpec) -> Corpus:
    rng = SplitMix64(spec.seed)
    pool = tuple(AuthorRef(f"C{i:04d}", f"Coauthor {i}") for i in range(_POOL_SIZE))
    corpus = Corpus()
    for u in range(spec.n_universities):
        uni = f"University {u + 1:02d}"
        for r in range(spec.researchers_per_university):
            rid = f"U{u + 1:02d}R{r + 1:04d}"
            me = AuthorRef(rid, f"Researcher {u + 1}-{r + 1}", f"AF{u + 1:02d}")
            n_areas = rng.randint(1, 3)
            areas = tuple(sorted({SUBJECT_AREAS[rng.randint(0, len(SUBJECT_AREAS) - 1)] for _ in range(n_areas)}))
            pubs = []
            for p in range(rng.randint(1, spec.max_pubs)):
                declared = _draw_author_count(rng, spec.max_authors)
                position = rng.randint(1, declared)
                listed = min(declared, SCOPUS_CLIP)
                start = rng.randint(0, _POOL_SIZE - 1)
                step = rng.randint(1, _POOL_SIZE - 1)
                others = [pool[(start + k * step) % _POOL_SIZE] for k in range(listed)]
                # positions past the clip window leave the researcher unlisted
                if position <= listed:
                    others[position - 1] = me
                if rng.random() < 0.05:
                    cover = None
                else:
                    cover = dt.date(rng.randint(1990, 2024), rng.randint(1, 12), rng.randint(1, 28))
                pub_areas = tuple(sorted({areas[rng.randint(0, len(areas) - 1)] for _ in range(rng.randint(1, 2))}))
                pubs.append(
                    Publication(
                        pub_id=f"{rid}-P{p + 1:04d}",
                        title=f"Synthetic paper {p + 1} of {rid}",
                        authors=tuple(others),
                        citations=_draw_citations(rng, spec.max_citations),
                        n_authors_declared=declared,
                        venue=f"Journal {rng.randint(1, 40)}",
                        venue_type=_draw_venue(rng),
                        cover_date=cover,
                        subject_areas=pub_areas,
                    )
                )
            corpus.add(
                ResearcherProfile(
                    author_id=rid,
                    name=me.display_name,
                    affiliation=uni,
                    city=f"City {u + 1}",
                    country="Australia",
                    document_count=len(pubs),
                    subject_areas=areas,
                    publications=tuple(pubs),
                )
            )
    return corpus


# -- oracles ------------------------------------------------------------------------


def _oracle_weight(slot: int, declared: int, mu: float, sigma: float, floor: float) -> float:
    # distance from the front end and from the back end (declared length), 1-based
    from_front = slot + 1
    from_back = declared - slot
    dist = from_front if from_front < from_back else from_back
    if dist >= mu:
        return floor
    z = (dist - mu) / sigma
    return 1.0 - (1.0 - floor) * math.exp(-0.5 * z * z)


def _largest(candidates: np.ndarray, holds: np.ndarray) -> int:
    ok = candidates[holds]
    return int(ok.max()) if ok.size else 0


def _oracle_h(values: np.ndarray) -> int:
    ks = np.arange(len(values) + 1)
    counts = (values[None, :] >= ks[:, None]).sum(axis=1)
    return _largest(ks, counts >= ks)


def _oracle_g(cites: np.ndarray) -> int:
    n = len(cites)
    if n == 0:
        return 0
    ge = (cites[None, :] >= cites[:, None]).sum(axis=1)  # papers with at least my count
    gt = (cites[None, :] > cites[:, None]).sum(axis=1)
    best = 0
    for k in range(1, n + 1):
        # the k-th largest citation value t satisfies gt < k <= ge
        t = int(cites[(gt < k) & (k <= ge)][0])
        above = cites[cites > t]
        top_k_total = int(above.sum()) + (k - len(above)) * t
        if top_k_total >= k * k:
            best = k
    return best


def _oracle_hm(cites: np.ndarray, counts: np.ndarray) -> int:
    """Largest rank r with sum_{r'<=r} 1/a(r') <= c(r), ties broken by larger author count first."""
    n = len(cites)
    if n == 0:
        return 0
    ci, cj = cites[:, None], cites[None, :]
    ai, aj = counts[:, None], counts[None, :]
    idx = np.arange(n)
    before = (cj > ci) | ((cj == ci) & (aj > ai)) | ((cj == ci) & (aj == ai) & (idx[None, :] < idx[:, None]))
    rank = before.sum(axis=1) + 1
    lcm = 1
    for a in counts.tolist():
        lcm = lcm * a // math.gcd(lcm, a)
    shares = [lcm // a for a in counts.tolist()]
    best = 0
    for k in range(1, n + 1):
        in_top = rank <= k
        total = sum(s for s, keep in zip(shares, in_top.tolist()) if keep)
        c_k = int(cites[rank == k][0])
        if total <= c_k * lcm:
            best = k
    return best


def oracle_index(kind: str, researcher_id: str, pubs: Sequence[Publication], params=None) -> float:
    """Brute-force evaluation of ``kind`` in {h, g, i10, hm, hfrac, hl}.

    ``params`` may be any object with ``mu``, ``sigma`` and ``floor`` attributes;
    the defaults 50 / 15 / 0.3 apply when it is None.
    """
    mu = getattr(params, "mu", 50.0)
    sigma = getattr(params, "sigma", 15.0)
    floor = getattr(params, "floor", 0.3)
    cites = np.array([p.citations for p in pubs], dtype=np.int64)
    counts = np.array([p.n_authors_declared for p in pubs], dtype=np.int64)

    if kind == "h":
        return _oracle_h(cites)
    if kind == "i10":
        return int((cites >= 10).sum())
    if kind == "g":
        return _oracle_g(cites)
    if kind == "hm":
        return _oracle_hm(cites, counts)
    if kind == "hfrac":
        # c / a >= k  <=>  c >= k * a, kept in integers
        ks = np.arange(len(pubs) + 1)
        holds = (cites[None, :] >= ks[:, None] * counts[None, :]).sum(axis=1) >= ks
        return _largest(ks, holds)
    if kind == "hl":
        weighted = []
        for p in pubs:
            ids = [a.author_id for a in p.authors]
            if researcher_id not in ids:
                continue
            slot = ids.index(researcher_id)
            weighted.append(p.citations * _oracle_weight(slot, p.n_authors_declared, mu, sigma, floor))
        return _oracle_h(np.array(weighted, dtype=float))
    raise ValueError(f"unknown index kind {kind!r}")
