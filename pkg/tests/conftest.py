from pathlib import Path

import pytest

from hleadership.corpus import AuthorRef, Corpus, Publication, load_corpus

FIXTURES = Path(__file__).parent / "fixtures"
F1_DIR = FIXTURES / "f1"


def make_pub(pub_id, author_ids, citations, declared=None, **kw):
    return Publication(
        pub_id=pub_id,
        authors=tuple(AuthorRef(a) for a in author_ids),
        citations=citations,
        n_authors_declared=declared,
        **kw,
    )


@pytest.fixture
def f1_corpus() -> Corpus:
    corpus, report = load_corpus(F1_DIR)
    assert not report.failures
    return corpus


@pytest.fixture
def f1_profile(f1_corpus):
    return f1_corpus.universities["Test University"][0]


@pytest.fixture
def f1_pubs(f1_profile):
    return list(f1_profile.publications)
