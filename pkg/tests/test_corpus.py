import datetime as dt
import json

import pytest
from hypothesis import given, strategies as st

from hleadership.corpus import (
    AuthorRef,
    Publication,
    ResearcherProfile,
    author_position,
    dumps_record,
    load_corpus,
    parse_affiliations_config,
    profile_from_record,
    profile_to_record,
)
from hleadership.errors import MalformedConfig, MissingField, NoSuchDirectory
from hleadership.synth import CorpusSpec, generate_corpus

from conftest import F1_DIR, make_pub

EXAMPLE_CONFIG = """
{
    "Institution Name": {
        "affiliation": "Institution Name",
        "scopus_id": [
            "Scopus ID 1",
            "Scopus ID 2",
            "Scopus ID 3"
        ],
        "city": "City Name",
        "country": "Country Name",
        "researchers": {
            "Researcher Name 1": "...",
            "Researcher Name 2": "...",
            "Researcher Name 3": "..."
        }
    }
}
"""


def test_parse_documented_example():
    (cfg,) = parse_affiliations_config(EXAMPLE_CONFIG.encode())
    assert cfg.affiliation_name == "Institution Name"
    assert cfg.scopus_ids == ("Scopus ID 1", "Scopus ID 2", "Scopus ID 3")
    assert cfg.affiliation_id == "Scopus ID 1"
    assert (cfg.city, cfg.country) == ("City Name", "Country Name")
    assert list(cfg.researcher_names) == ["Researcher Name 1", "Researcher Name 2", "Researcher Name 3"]
    assert cfg.researcher_names["Researcher Name 2"] == "..."


def test_parse_empty_object():
    assert parse_affiliations_config(b"{}") == []


def test_parse_missing_country():
    doc = json.loads(EXAMPLE_CONFIG)
    del doc["Institution Name"]["country"]
    with pytest.raises(MissingField) as info:
        parse_affiliations_config(json.dumps(doc))
    assert info.value.field == "country"
    assert info.value.institution == "Institution Name"


@pytest.mark.parametrize("raw", [b"{not json", b"[1, 2]", b'{"X": 3}', b"\xff\xfe"])
def test_parse_malformed(raw):
    with pytest.raises(MalformedConfig):
        parse_affiliations_config(raw)


def test_parse_keeps_every_institution():
    doc = json.loads(EXAMPLE_CONFIG)
    doc["Second"] = dict(doc["Institution Name"], affiliation="Second")
    configs = parse_affiliations_config(json.dumps(doc))
    assert [c.affiliation_name for c in configs] == ["Institution Name", "Second"]


def test_parse_empty_researchers_rejected():
    doc = json.loads(EXAMPLE_CONFIG)
    doc["Institution Name"]["researchers"] = {}
    with pytest.raises(MissingField):
        parse_affiliations_config(json.dumps(doc))


def test_load_f1(f1_corpus):
    assert list(f1_corpus.universities) == ["Test University"]
    (profile,) = f1_corpus.universities["Test University"]
    assert profile.author_id == "A1"
    assert len(profile.publications) == 4
    assert profile.publications[0].cover_date == dt.date(2020, 3, 1)


def test_load_empty_dir(tmp_path):
    corpus, report = load_corpus(tmp_path)
    assert len(corpus) == 0 and report.failures == []


def test_load_missing_dir(tmp_path):
    with pytest.raises(NoSuchDirectory):
        load_corpus(tmp_path / "nope")


def test_load_reports_corrupt_file(tmp_path):
    (tmp_path / "A1.json").write_text((F1_DIR / "Scopus" / "A1.json").read_text())
    (tmp_path / "bad.json").write_text("{ truncated")
    corpus, report = load_corpus(tmp_path)
    assert len(corpus) == 1
    assert len(report.failures) == 1 and "bad.json" in report.failures[0][0]


def test_load_warns_on_duplicate_listing(tmp_path):
    prof = ResearcherProfile("X", "X", "U", publications=(make_pub("p", ["X", "Y", "X"], 3),))
    (tmp_path / "X.json").write_text(dumps_record(prof))
    _, report = load_corpus(tmp_path)
    assert any("more than once" in w for w in report.warnings)


def test_unparseable_date_kept_as_unknown(tmp_path):
    rec = json.loads((F1_DIR / "Scopus" / "A1.json").read_text())
    rec["publications"][0]["cover_date"] = "sometime in spring"
    (tmp_path / "A1.json").write_text(json.dumps(rec))
    corpus, _ = load_corpus(tmp_path)
    pubs = corpus.universities["Test University"][0].publications
    assert len(pubs) == 4 and pubs[0].cover_date is None


def test_author_position(f1_pubs):
    p1, p2 = f1_pubs[0], f1_pubs[1]
    assert author_position(p1, "A1") == 1
    assert author_position(p2, "A1") == 2
    assert author_position(p1, "Z9") is None


def test_author_position_first_occurrence_wins():
    assert author_position(make_pub("p", ["Y", "X", "X"], 1), "X") == 2


@given(st.lists(st.sampled_from("ABCDEFG"), min_size=1, max_size=12), st.sampled_from("ABCDEFGZ"))
def test_author_position_range(ids, who):
    pub = make_pub("p", ids, 1)
    pos = author_position(pub, who)
    assert pos is None or 1 <= pos <= len(ids)
    assert (pos is None) == (who not in ids)


def test_publication_invariants():
    with pytest.raises(ValueError):
        make_pub("p", [], 1)
    with pytest.raises(ValueError):
        make_pub("p", ["X"], -1)
    with pytest.raises(ValueError):
        make_pub("p", ["X", "Y"], 1, declared=1)
    with pytest.raises(ValueError):
        AuthorRef("")
    assert make_pub("p", ["X", "Y"], 1).n_authors_declared == 2


def test_record_round_trip(tmp_path):
    corpus = generate_corpus(CorpusSpec(2, 3, max_pubs=15, seed=4))
    for prof in corpus.researchers():
        (tmp_path / f"{prof.author_id}.json").write_text(dumps_record(prof), encoding="utf-8")
    loaded, report = load_corpus(tmp_path)
    assert not report.failures
    assert loaded.universities == corpus.universities


def test_record_dict_round_trip(f1_profile):
    assert profile_from_record(profile_to_record(f1_profile)) == f1_profile
    assert isinstance(f1_profile.publications[0], Publication)
