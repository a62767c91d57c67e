"""Record deduplication: DOI identity, fuzzy closure, group merging."""

from __future__ import annotations

import random

from bibatlas.corpus.dedup import dedup
from bibatlas.corpus.normalize import normalize_title, token_set_ratio

from corpus60 import FUZZY_DUP_TARGETS, build_records, fuzzy_variant, _title
from conftest import record


class TestDoiPass:
    def test_same_doi_merges_despite_titles(self):
        records = [
            record("Completely unrelated words here", doi="10.1/x", authors=["A B"]),
            record("Nothing shared at all", doi="10.1/x", authors=["C D"],
                   source="doi-registry"),
        ]
        papers, rmap = dedup(records)
        assert len(papers) == 1
        assert rmap[0] == rmap[1] == papers[0].paper_id

    def test_doi_normalization_applies(self):
        records = [
            record("T one", doi="https://doi.org/10.1/Y"),
            record("T two", doi="10.1/y", source="doi-registry"),
        ]
        papers, _ = dedup(records)
        assert len(papers) == 1

    def test_different_dois_stay_apart(self):
        records = [
            record("Same title words", doi="10.1/a", authors=["A B"]),
            record("Same title words", doi="10.1/b", authors=["C D"], year=2016),
        ]
        papers, _ = dedup(records)
        assert len(papers) == 2


class TestFuzzyPass:
    def test_subset_title_with_shared_surname_merges(self):
        records = [
            record("Graph clustering at scale", authors=["Ada Silva"]),
            record("Graph clustering at scale (Extended Abstract)",
                   authors=["Ada Silva"], source="doi-registry"),
        ]
        papers, _ = dedup(records)
        assert len(papers) == 1

    def test_needs_surname_overlap(self):
        records = [
            record("Graph clustering at scale", authors=["Ada Silva"]),
            record("Graph clustering at scale", authors=["Bo Chen"],
                   source="doi-registry"),
        ]
        papers, _ = dedup(records)
        assert len(papers) == 2

    def test_needs_same_year(self):
        records = [
            record("Graph clustering at scale", authors=["Ada Silva"], year=2015),
            record("Graph clustering at scale", authors=["Ada Silva"], year=2016,
                   source="doi-registry"),
        ]
        papers, _ = dedup(records)
        assert len(papers) == 2

    def test_threshold_is_strict(self):
        # Identical pair scores 100 and merges at threshold 99, not at 100.
        records = [
            record("Graph clustering", authors=["Ada Silva"]),
            record("Graph clustering", authors=["Ada Silva"], source="doi-registry"),
        ]
        assert len(dedup(records, ratio_threshold=99)[0]) == 1
        assert len(dedup(records, ratio_threshold=100)[0]) == 2

    def test_transitive_closure_across_passes(self):
        # a~b by DOI, b~c by fuzzy title: one paper.
        records = [
            record("Spectral methods primer", doi="10.2/z", authors=["Ada Silva"]),
            record("Totally different storyline", doi="10.2/z", authors=["Ada Silva"]),
            record("Totally different storyline (extended abstract)",
                   authors=["Ada Silva"], source="doi-registry"),
        ]
        papers, rmap = dedup(records)
        assert len(papers) == 1
        assert len(set(rmap)) == 1


class TestMergeGroup:
    def test_citations_keep_per_source_max(self):
        records = [
            record("Shared work", doi="10.3/c", citations=7),
            record("Shared work", doi="10.3/c", citations=9, source="doi-registry"),
            record("Shared work", doi="10.3/c", citations=5, source="ieee-backfill"),
        ]
        papers, _ = dedup(records)
        p = papers[0]
        assert p.citations_by_source == {
            "primary-index": 7,
            "doi-registry": 9,
            "ieee-backfill": 5,
        }
        assert p.citations == 9
        assert p.source_flags == ["doi-registry", "ieee-backfill", "primary-index"]

    def test_representative_prefers_primary_index(self):
        records = [
            record("registry title", doi="10.4/d", source="doi-registry",
                   authors=["Ada Silva", "Bo Petrov", "Cy Novak"]),
            record("Primary Title", doi="10.4/d", authors=["Ada Silva"]),
        ]
        papers, _ = dedup(records)
        assert papers[0].title == "Primary Title"

    def test_year_majority_breaks_low(self):
        records = [
            record("W", doi="10.5/e", year=2014),
            record("W", doi="10.5/e", year=2015, source="doi-registry"),
        ]
        papers, _ = dedup(records)
        assert papers[0].year == 2014

    def test_output_sorted_by_year_then_id(self):
        records = [
            record("Late paper words", year=2019, authors=["A B"]),
            record("Early paper words", year=2011, authors=["C D"]),
            record("Middle paper words", year=2015, authors=["E F"]),
        ]
        papers, _ = dedup(records)
        assert [p.year for p in papers] == [2011, 2015, 2019]


class TestSixtyRecordFixture:
    def test_exactly_42_papers(self):
        records, expected = build_records()
        assert len(records) == 60
        papers, rmap = dedup(records)
        assert len(papers) == expected == 42
        assert set(rmap) == {p.paper_id for p in papers}

    def test_fuzzy_pairs_score_100(self):
        for k, i in enumerate(FUZZY_DUP_TARGETS):
            a = normalize_title(_title(i))
            b = normalize_title(fuzzy_variant(k, _title(i)))
            assert token_set_ratio(a, b) == 100

    def test_permutation_invariant(self):
        records, _ = build_records()
        papers_a, rmap_a = dedup(records)
        rng = random.Random(7)
        order = list(range(len(records)))
        rng.shuffle(order)
        shuffled = [records[i] for i in order]
        papers_b, rmap_b = dedup(shuffled)
        assert {p.paper_id for p in papers_a} == {p.paper_id for p in papers_b}
        for pos, orig_idx in enumerate(order):
            assert rmap_b[pos] == rmap_a[orig_idx]
